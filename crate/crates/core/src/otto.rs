//! Four-stroke quantum Otto refrigerator with an optional Mpemba step
//! before the heat-exchange stroke.
//!
//! The working qubit starts thermal with a cold bath under `-2πν₀σ_x`, is
//! ramped to `ν₁` along `x`, exchanges heat through the protocol channel whose
//! fixed point is the Gibbs state of `-2πν₁σ_z` at the hot temperature, is
//! ramped back along `x` and finally reset to the cold Gibbs state.

use rayon::prelude::*;

use crate::channels::{apply_channel, build_heat_exchange, max_delay_ms, ThermalEnvironment};
use crate::error::{Error, Result};
use crate::liouville::DensityMatrix;
use crate::mpemba::{mpemba_unitary, reference_generator};
use crate::numerics::pauli::{qubit_hamiltonian, Axis};
use crate::numerics::{linspace, ComplexMatrix};
use crate::scalar::{cx, Real};
use crate::thermo::{detect_crossing, gibbs_state, mean_energy, GibbsSpec, Observable, RelaxationTrajectory};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleConfig<T: Real> {
    /// kHz.
    pub nu0: T,
    /// kHz.
    pub nu1: T,
    /// Hz.
    pub j_coupling: T,
    /// kHz.
    pub t_hot: T,
    /// kHz.
    pub t_cold: T,
    /// Stroke durations in ms.
    pub tau1: T,
    pub tau3: T,
    pub tau4: T,
    /// Cycle time without the heat-exchange stroke, ms.
    pub tau_bar: T,
    pub use_mpemba: bool,
    /// Duration of the Mpemba pulse, ms; added to `tau_bar` on the mb branch.
    pub mpemba_duration: T,
}

impl<T: Real> Default for CycleConfig<T> {
    fn default() -> Self {
        let j = T::lit(215.1);
        Self {
            nu0: T::one(),
            nu1: T::lit(2.0),
            j_coupling: j,
            t_hot: T::lit(4.77),
            t_cold: T::lit(2.38),
            tau1: T::lit(0.1),
            tau3: T::lit(0.1),
            tau4: max_delay_ms(j),
            tau_bar: T::lit(4.65),
            use_mpemba: true,
            mpemba_duration: T::zero(),
        }
    }
}

impl<T: Real> CycleConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        let all = [
            self.nu0,
            self.nu1,
            self.j_coupling,
            self.t_hot,
            self.t_cold,
            self.tau1,
            self.tau3,
            self.tau4,
            self.tau_bar,
            self.mpemba_duration,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(self.nu0 > T::zero() && self.nu1 > self.nu0) {
            return bad("frequencies must satisfy nu1 > nu0 > 0");
        }
        if !(self.t_hot > T::zero() && self.t_cold > T::zero()) {
            return bad("temperatures must be positive");
        }
        if !(self.j_coupling > T::zero()) {
            return bad("coupling must be positive");
        }
        if !(self.tau1 > T::zero() && self.tau3 > T::zero() && self.tau4 > T::zero() && self.tau_bar > T::zero()) {
            return bad("stroke durations must be positive");
        }
        if self.mpemba_duration < T::zero() {
            return bad("Mpemba pulse duration must be non-negative");
        }
        Ok(())
    }

    pub fn max_tau2(&self) -> T {
        max_delay_ms(self.j_coupling)
    }

    pub fn hot_environment(&self) -> Result<ThermalEnvironment<T>> {
        ThermalEnvironment::new(self.t_hot, self.nu1)
    }

    /// `-2πν₀σ_x`.
    pub fn cold_hamiltonian(&self) -> ComplexMatrix<T> {
        qubit_hamiltonian(self.nu0, Axis::X)
    }

    /// `-2πν₁σ_z`, the energy basis of the heat-exchange stroke.
    pub fn cooling_hamiltonian(&self) -> ComplexMatrix<T> {
        qubit_hamiltonian(self.nu1, Axis::Z)
    }

    pub fn cold_gibbs(&self) -> Result<DensityMatrix<T>> {
        gibbs_state(&GibbsSpec::new(self.cold_hamiltonian(), self.t_cold)?)
    }
}

/// Exact propagator of `H(t) = -2πν(t)σ` for `ν` ramped linearly from
/// `nu_start` to `nu_end`: `exp(iφσ)` with `φ = 2π (ν_s + ν_e)/2 · duration`.
pub fn ramp_unitary<T: Real>(nu_start: T, nu_end: T, duration: T, axis: Axis) -> ComplexMatrix<T> {
    let phi = T::TAU() * (nu_start + nu_end) * T::lit(0.5) * duration;
    let (s, c) = phi.sin_cos();
    &ComplexMatrix::identity(2).scale_real(c) + &axis.matrix::<T>().scale(cx(T::zero(), s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrokeKind {
    Expansion,
    Mpemba,
    Cooling,
    Compression,
    HotReset,
}

impl StrokeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrokeKind::Expansion => "EXPANSION",
            StrokeKind::Mpemba => "MPEMBA",
            StrokeKind::Cooling => "COOLING",
            StrokeKind::Compression => "COMPRESSION",
            StrokeKind::HotReset => "HOT_RESET",
        }
    }

    /// Unitary strokes exchange work, the others heat.
    pub fn is_unitary(self) -> bool {
        matches!(self, StrokeKind::Expansion | StrokeKind::Mpemba | StrokeKind::Compression)
    }
}

#[derive(Clone, Debug)]
pub struct StrokeRecord<T: Real> {
    pub name: StrokeKind,
    /// ms.
    pub duration: T,
    /// `Tr(Hρ)/2π` at the start of the stroke, kHz.
    pub energy_in: T,
    /// `Tr(Hρ)/2π` at the end of the stroke, kHz.
    pub energy_out: T,
    pub state_after: DensityMatrix<T>,
}

/// The state entering the heat-exchange stroke, with or without the Mpemba
/// unitary.
pub fn pre_cooling_state<T: Real>(cfg: &CycleConfig<T>, with_mpemba: bool) -> Result<DensityMatrix<T>> {
    let rho0 = cfg.cold_gibbs()?;
    let expanded = rho0.conjugate_by(&ramp_unitary(cfg.nu0, cfg.nu1, cfg.tau1, Axis::X))?;
    if !with_mpemba {
        return Ok(expanded);
    }
    let env = cfg.hot_environment()?;
    let dec = reference_generator(&env, cfg.j_coupling)?;
    Ok(mpemba_unitary(&expanded, &cfg.cooling_hamiltonian(), cfg.t_hot, &dec)?.target_state)
}

/// Runs one closed cycle.
///
/// Boundary energies are evaluated with the Hamiltonian in force at that
/// boundary: `H_x(ν₀)` before expansion and after compression, `H_z(ν₁)`
/// around the heat-exchange stroke. The basis change between the two is
/// booked as work of the ramp that crosses it.
pub fn run_cycle<T: Real>(cfg: &CycleConfig<T>, tau2: T) -> Result<Vec<StrokeRecord<T>>> {
    cfg.validate()?;
    let max = cfg.max_tau2();
    let slack = T::tolerance(1e-12) * max;
    if !(tau2 >= -slack && tau2 <= max + slack) {
        return Err(Error::Tau2OutOfRange {
            tau2: tau2.to_f64_lossy(),
            max: max.to_f64_lossy(),
        });
    }
    let h_cold = cfg.cold_hamiltonian();
    let h_cool = cfg.cooling_hamiltonian();
    let env = cfg.hot_environment()?;
    let mut records = Vec::with_capacity(5);

    let rho0 = cfg.cold_gibbs()?;
    let expanded = rho0.conjugate_by(&ramp_unitary(cfg.nu0, cfg.nu1, cfg.tau1, Axis::X))?;
    records.push(StrokeRecord {
        name: StrokeKind::Expansion,
        duration: cfg.tau1,
        energy_in: mean_energy(&rho0, &h_cold),
        energy_out: mean_energy(&expanded, &h_cool),
        state_after: expanded.clone(),
    });

    let mut current = expanded;
    if cfg.use_mpemba {
        let dec = reference_generator(&env, cfg.j_coupling)?;
        let t = mpemba_unitary(&current, &h_cool, cfg.t_hot, &dec)?;
        records.push(StrokeRecord {
            name: StrokeKind::Mpemba,
            duration: cfg.mpemba_duration,
            energy_in: mean_energy(&current, &h_cool),
            energy_out: mean_energy(&t.target_state, &h_cool),
            state_after: t.target_state.clone(),
        });
        current = t.target_state;
    }

    let cooled = apply_channel(&build_heat_exchange(&env, cfg.j_coupling, tau2.max(T::zero()).min(max))?, &current)?;
    records.push(StrokeRecord {
        name: StrokeKind::Cooling,
        duration: tau2,
        energy_in: mean_energy(&current, &h_cool),
        energy_out: mean_energy(&cooled, &h_cool),
        state_after: cooled.clone(),
    });

    let compressed = cooled.conjugate_by(&ramp_unitary(cfg.nu1, cfg.nu0, cfg.tau3, Axis::X))?;
    records.push(StrokeRecord {
        name: StrokeKind::Compression,
        duration: cfg.tau3,
        energy_in: mean_energy(&cooled, &h_cool),
        energy_out: mean_energy(&compressed, &h_cold),
        state_after: compressed.clone(),
    });

    records.push(StrokeRecord {
        name: StrokeKind::HotReset,
        duration: cfg.tau4,
        energy_in: mean_energy(&compressed, &h_cold),
        energy_out: mean_energy(&rho0, &h_cold),
        state_after: rho0,
    });
    Ok(records)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatReport<T: Real> {
    /// `Tr[H_x(ν₁) ρ_c]/2π - Tr[H_x(ν₀) ρ_{τ₃}]/2π`, kHz.
    pub q_c: T,
    /// Energy change summed over channel strokes, kHz.
    pub heat: T,
    /// Energy change summed over unitary strokes, kHz.
    pub work: T,
}

impl<T: Real> HeatReport<T> {
    /// `heat + work`, zero for a closed cycle.
    pub fn net(&self) -> T {
        self.heat + self.work
    }
}

/// Heat extracted from the cold side, with stroke-resolved bookkeeping.
///
/// `ρ_c` is taken from the reset stroke (the cold Gibbs state that also
/// starts the cycle) and `ρ_{τ₃}` from the compression stroke.
pub fn heat_extracted<T: Real>(records: &[StrokeRecord<T>], cfg: &CycleConfig<T>) -> Result<HeatReport<T>> {
    let find = |kind: StrokeKind, name: &'static str| {
        records
            .iter()
            .find(|r| r.name == kind)
            .ok_or(Error::MissingStroke(name))
    };
    let compressed = &find(StrokeKind::Compression, "COMPRESSION")?.state_after;
    let cold = &find(StrokeKind::HotReset, "HOT_RESET")?.state_after;
    find(StrokeKind::Expansion, "EXPANSION")?;
    find(StrokeKind::Cooling, "COOLING")?;
    let q_c = mean_energy(cold, &qubit_hamiltonian(cfg.nu1, Axis::X)) - mean_energy(compressed, &cfg.cold_hamiltonian());
    let (mut heat, mut work) = (T::zero(), T::zero());
    for r in records {
        let d = r.energy_out - r.energy_in;
        if r.name.is_unitary() {
            work += d;
        } else {
            heat += d;
        }
    }
    Ok(HeatReport { q_c, heat, work })
}

/// Trace distance to the hot Gibbs state after the heat-exchange stroke,
/// without (`.0`) and with (`.1`) the Mpemba step.
pub fn distance_curves<T: Real>(
    cfg: &CycleConfig<T>,
    tau2_grid: &[T],
) -> Result<(RelaxationTrajectory<T>, RelaxationTrajectory<T>)> {
    cfg.validate()?;
    let max = cfg.max_tau2();
    let slack = T::tolerance(1e-12) * max;
    if let Some(&bad) = tau2_grid.iter().find(|&&t| !(t >= -slack && t <= max + slack)) {
        return Err(Error::Tau2OutOfRange {
            tau2: bad.to_f64_lossy(),
            max: max.to_f64_lossy(),
        });
    }
    let env = cfg.hot_environment()?;
    let h = cfg.cooling_hamiltonian();
    let reference = env.gibbs_state();
    let curve = |mb: bool| -> Result<RelaxationTrajectory<T>> {
        let start = pre_cooling_state(cfg, mb)?;
        let states = tau2_grid
            .par_iter()
            .map(|&t| apply_channel(&build_heat_exchange(&env, cfg.j_coupling, t)?, &start))
            .collect::<Result<Vec<_>>>()?;
        RelaxationTrajectory::from_states(
            if mb { "mb" } else { "plain" },
            tau2_grid.to_vec(),
            states,
            &h,
            cfg.t_hot,
            &reference,
        )
    };
    Ok((curve(false)?, curve(true)?))
}

/// `n` evenly spaced delays over `[0, (2J)⁻¹]`.
pub fn default_tau2_grid<T: Real>(cfg: &CycleConfig<T>, n: usize) -> Vec<T> {
    linspace(T::zero(), cfg.max_tau2(), n)
}

fn first_reach<T: Real>(times: &[T], values: &[T], delta: T) -> Option<T> {
    let tol = T::lit(1e-12);
    let i = values.iter().position(|&v| v <= delta + tol)?;
    if i == 0 {
        return Some(times[0]);
    }
    let (v0, v1) = (values[i - 1], values[i]);
    let frac = ((v0 - delta) / (v0 - v1)).max(T::zero()).min(T::one());
    Some(times[i - 1] + (times[i] - times[i - 1]) * frac)
}

/// Earliest delays at which the plain and mb curves first reach `delta`.
pub fn threshold_times<T: Real>(
    curves: &(RelaxationTrajectory<T>, RelaxationTrajectory<T>),
    delta: T,
) -> Result<(T, T)> {
    let (plain, mb) = curves;
    let unreachable = |curve: &str| Error::ThresholdUnreachable {
        delta: delta.to_f64_lossy(),
        curve: curve.to_string(),
    };
    let tp = first_reach(&plain.times, &plain.trace_dist, delta).ok_or_else(|| unreachable("plain"))?;
    let tm = first_reach(&mb.times, &mb.trace_dist, delta).ok_or_else(|| unreachable("mb"))?;
    Ok((tp, tm))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerReport<T: Real> {
    pub delta: T,
    /// ms.
    pub tau2_plain: T,
    /// ms.
    pub tau2_mb: T,
    pub ratio: T,
}

/// Threshold window `(0, δ_cross]` in which the mb curve sits below the
/// plain one: `δ_cross` is the common distance at the curves' crossing.
pub fn qme_window<T: Real>(curves: &(RelaxationTrajectory<T>, RelaxationTrajectory<T>)) -> Result<Option<T>> {
    let (plain, mb) = curves;
    let report = detect_crossing(mb, plain, Observable::TraceDist)?;
    let Some(t) = report.t_cross else {
        return Ok(None);
    };
    let times = &plain.times;
    let i = times.iter().position(|&x| x >= t).unwrap_or(times.len() - 1).max(1);
    let frac = (t - times[i - 1]) / (times[i] - times[i - 1]);
    let d = &plain.trace_dist;
    Ok(Some(d[i - 1] + (d[i] - d[i - 1]) * frac))
}

/// Cooling-power ratio `(τ̄ + τ₂⁰)/(τ̄ + t_mb + τ₂^mb)` per threshold.
pub fn power_ratio_from_curves<T: Real>(
    cfg: &CycleConfig<T>,
    curves: &(RelaxationTrajectory<T>, RelaxationTrajectory<T>),
    delta_grid: &[T],
) -> Result<Vec<PowerReport<T>>> {
    delta_grid
        .iter()
        .map(|&delta| {
            let (tp, tm) = threshold_times(curves, delta)?;
            Ok(PowerReport {
                delta,
                tau2_plain: tp,
                tau2_mb: tm,
                ratio: (cfg.tau_bar + tp) / (cfg.tau_bar + cfg.mpemba_duration + tm),
            })
        })
        .collect()
}

/// Grid resolution used by [`power_ratio`] for the distance curves.
pub const POWER_GRID_POINTS: usize = 2049;

/// [`power_ratio_from_curves`] on distance curves sampled at
/// [`POWER_GRID_POINTS`] delays.
pub fn power_ratio<T: Real>(cfg: &CycleConfig<T>, delta_grid: &[T]) -> Result<Vec<PowerReport<T>>> {
    let curves = distance_curves(cfg, &default_tau2_grid(cfg, POWER_GRID_POINTS))?;
    power_ratio_from_curves(cfg, &curves, delta_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::expm;
    use crate::thermo::trace_distance;

    fn cfg() -> CycleConfig<f64> {
        CycleConfig {
            use_mpemba: false,
            ..CycleConfig::default()
        }
    }

    #[test]
    fn ramp_examples() {
        let id = ramp_unitary(0.0, 0.0, 0.1, Axis::X);
        assert!(id.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let u = ramp_unitary(1.0, 2.0, 0.1, Axis::X);
        let phi = 0.3 * std::f64::consts::PI;
        let expected = expm(&crate::numerics::pauli::sigma_x::<f64>().scale(cx(0.0, phi))).unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-14);
        let back = ramp_unitary(2.0, 1.0, 0.1, Axis::X);
        let twice = expm(&crate::numerics::pauli::sigma_x::<f64>().scale(cx(0.0, 2.0 * phi))).unwrap();
        assert!(back.matmul(&u).max_abs_diff(&twice) < 1e-14);
    }

    #[test]
    fn ramp_matches_piecewise_product() {
        let (a, b, d) = (1.0, 2.0, 0.1);
        let n = 1000;
        let dt = d / n as f64;
        let mut u = ComplexMatrix::<f64>::identity(2);
        for k in 0..n {
            let nu = a + (b - a) * (k as f64 + 0.5) / n as f64;
            let step = expm(&qubit_hamiltonian(nu, Axis::Z).scale(cx(0.0, -dt))).unwrap();
            u = step.matmul(&u);
        }
        assert!(u.max_abs_diff(&ramp_unitary(a, b, d, Axis::Z)) < 1e-8);
    }

    #[test]
    fn defaults_are_valid() {
        let c = CycleConfig::<f64>::default();
        c.validate().unwrap();
        assert!((c.tau4 - 2.3245002324500232).abs() < 1e-12);
        let bad = CycleConfig { nu1: 0.5, ..c };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn full_delay_reaches_hot_gibbs() {
        let c = cfg();
        let rec = run_cycle(&c, c.max_tau2()).unwrap();
        let cooled = &rec.iter().find(|r| r.name == StrokeKind::Cooling).unwrap().state_after;
        let hot = c.hot_environment().unwrap().gibbs_state();
        assert!(cooled.matrix().max_abs_diff(hot.matrix()) < 1e-10);
    }

    #[test]
    fn cycle_closes_and_balances() {
        for mb in [false, true] {
            let c = CycleConfig { use_mpemba: mb, ..cfg() };
            for tau2 in [0.0, 0.3, 1.1, c.max_tau2()] {
                let rec = run_cycle(&c, tau2).unwrap();
                assert_eq!(rec.len(), if mb { 5 } else { 4 });
                let last = &rec.last().unwrap().state_after;
                assert!(last.matrix().max_abs_diff(c.cold_gibbs().unwrap().matrix()) < 1e-10);
                let rep = heat_extracted(&rec, &c).unwrap();
                assert!(rep.net().abs() < 1e-8);
            }
        }
        assert!(matches!(run_cycle(&cfg(), 3.0), Err(Error::Tau2OutOfRange { .. })));
    }

    #[test]
    fn zero_delay_heat_from_gap_difference() {
        let c = cfg();
        let rec = run_cycle(&c, 0.0).unwrap();
        let q = heat_extracted(&rec, &c).unwrap().q_c;
        let x = c.cold_gibbs().unwrap().bloch()[0];
        assert!((q + (c.nu1 - c.nu0) * x).abs() < 1e-12);
        assert!(q < 0.0);
    }

    #[test]
    fn missing_stroke_detected() {
        let c = cfg();
        let mut rec = run_cycle(&c, 0.5).unwrap();
        rec.retain(|r| r.name != StrokeKind::Compression);
        assert_eq!(heat_extracted(&rec, &c), Err(Error::MissingStroke("COMPRESSION")));
    }

    #[test]
    fn distance_curves_end_at_zero() {
        let c = cfg();
        let grid = default_tau2_grid(&c, 64);
        let curves = distance_curves(&c, &grid).unwrap();
        assert!(curves.0.trace_dist[63] < 1e-10 && curves.1.trace_dist[63] < 1e-10);
        let hot = c.hot_environment().unwrap().gibbs_state();
        let start = pre_cooling_state(&c, false).unwrap();
        assert!((curves.0.trace_dist[0] - trace_distance(&start, &hot)).abs() < 1e-15);
    }

    #[test]
    fn thresholds() {
        let c = cfg();
        let curves = distance_curves(&c, &default_tau2_grid(&c, 64)).unwrap();
        let (tp, tm) = threshold_times(&curves, 0.0).unwrap();
        assert!((tp - c.max_tau2()).abs() < 1e-9 && (tm - c.max_tau2()).abs() < 1e-9);
        let (tp, tm) = threshold_times(&curves, 0.9).unwrap();
        assert_eq!((tp, tm), (0.0, 0.0));
        assert!(threshold_times(&curves, -0.1).is_err());
    }

    #[test]
    fn ratio_at_least_one_in_window() {
        let c = cfg();
        let curves = distance_curves(&c, &default_tau2_grid(&c, 257)).unwrap();
        let top = qme_window(&curves).unwrap().unwrap();
        let deltas = linspace(top / 40.0, top, 40);
        for r in power_ratio_from_curves(&c, &curves, &deltas).unwrap() {
            assert!(r.ratio >= 1.0 - 1e-12, "{r:?}");
        }
    }
}
