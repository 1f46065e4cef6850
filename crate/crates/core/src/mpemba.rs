//! The Mpemba unitary, rotated initial-state families and the cooling
//! sweeps built on them.

use rayon::prelude::*;

use crate::channels::{apply_channel, build_heat_exchange, max_delay_ms, KrausChannel, ThermalEnvironment};
use crate::error::{Error, Result};
use crate::liouville::{decompose, extract_generator, mode_overlap, DensityMatrix, SpectralDecomposition};
use crate::numerics::pauli::{rotation, Axis};
use crate::numerics::{eigh, fix_phase, ComplexMatrix};
use crate::scalar::{re, Cx, Real};
use crate::thermo::{f_neq, RelaxationTrajectory};

#[derive(Clone, Debug)]
pub struct MpembaTransform<T: Real> {
    pub unitary: ComplexMatrix<T>,
    pub source_state: DensityMatrix<T>,
    pub target_state: DensityMatrix<T>,
    /// `F_neq(target) - F_neq(source)`, kHz.
    pub f_neq_gain: T,
    /// Largest-magnitude overlap with a slow mode, before and after.
    pub slow_overlap_before: Cx<T>,
    pub slow_overlap_after: Cx<T>,
    /// Overlaps with every slow mode, in `slow_modes()` order.
    pub slow_overlaps_before: Vec<Cx<T>>,
    pub slow_overlaps_after: Vec<Cx<T>>,
}

/// Unitary taking the eigenvectors of `rho` onto the energy eigenvectors of
/// `h`, largest population onto the highest level.
///
/// Eigenvector phases on both sides are fixed so that the first nonzero
/// component is real positive. Slow-mode overlaps are taken against `dec`.
pub fn mpemba_unitary<T: Real>(
    rho: &DensityMatrix<T>,
    h: &ComplexMatrix<T>,
    temperature: T,
    dec: &SpectralDecomposition<T>,
) -> Result<MpembaTransform<T>> {
    if rho.dim() != h.nrows() || !h.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "state of dimension {} with a {}x{} Hamiltonian",
            rho.dim(),
            h.nrows(),
            h.ncols()
        )));
    }
    let he = eigh(h)?;
    let scale = he.values.iter().fold(T::zero(), |m, x| m.max(x.abs())).max(T::one());
    if he.values.windows(2).any(|w| w[1] - w[0] <= T::tolerance(1e-10) * scale) {
        return Err(Error::DegenerateHamiltonian);
    }
    let re_ = eigh(rho.matrix())?;
    let n = rho.dim();
    // both spectra ascending: largest population onto the highest level
    let mut u = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let v = fix_phase(re_.vector(k));
        let e = fix_phase(he.vector(k));
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] += e[i] * v[j].conj();
            }
        }
    }
    let target = rho.conjugate_by(&u)?;
    let gain = f_neq(&target, h, temperature) - f_neq(rho, h, temperature);

    let slow = dec.slow_modes();
    let before = slow
        .iter()
        .map(|&k| mode_overlap(dec, k, rho))
        .collect::<Result<Vec<_>>>()?;
    let after = slow
        .iter()
        .map(|&k| mode_overlap(dec, k, &target))
        .collect::<Result<Vec<_>>>()?;
    let largest = |v: &[Cx<T>]| {
        v.iter()
            .copied()
            .fold(re(T::zero()), |m, z| if z.norm() > m.norm() { z } else { m })
    };
    Ok(MpembaTransform {
        unitary: u,
        source_state: rho.clone(),
        target_state: target,
        f_neq_gain: gain,
        slow_overlap_before: largest(&before),
        slow_overlap_after: largest(&after),
        slow_overlaps_before: before,
        slow_overlaps_after: after,
    })
}

impl<T: Real> MpembaTransform<T> {
    /// `max |U†U - I|`.
    pub fn unitarity_error(&self) -> T {
        let n = self.unitary.nrows();
        self.unitary
            .adjoint()
            .matmul(&self.unitary)
            .max_abs_diff(&ComplexMatrix::identity(n))
    }
}

/// Spectral decomposition of the heat-exchange generator, extracted at half
/// the maximal delay. Its eigenvectors do not depend on the delay chosen.
pub fn reference_generator<T: Real>(env: &ThermalEnvironment<T>, j_hz: T) -> Result<SpectralDecomposition<T>> {
    let tau = max_delay_ms(j_hz) * T::lit(0.5);
    let ch = build_heat_exchange(env, j_hz, tau)?;
    decompose(&extract_generator(&ch, tau)?)
}

/// `ρ(0) = p₊|x₊⟩⟨x₊| + p₋|x₋⟩⟨x₋|`.
pub fn x_basis_state<T: Real>(p_plus: T, p_minus: T) -> Result<DensityMatrix<T>> {
    if (p_plus + p_minus - T::one()).abs() > T::tolerance(1e-12) {
        return Err(Error::InvalidState(format!("populations {p_plus}, {p_minus} do not sum to one")));
    }
    DensityMatrix::from_bloch(p_plus - p_minus, T::zero(), T::zero())
}

#[derive(Clone, Debug)]
pub struct ThetaFamily<T: Real> {
    pub base_state: DensityMatrix<T>,
    /// Radians.
    pub angles: Vec<T>,
    pub rotated_states: Vec<DensityMatrix<T>>,
}

/// `ρ_θ = R_y(θ) ρ R_y(-θ)` for every angle.
pub fn build_theta_family<T: Real>(base: &DensityMatrix<T>, theta_grid: &[T]) -> Result<ThetaFamily<T>> {
    if base.dim() != 2 {
        return Err(Error::ShapeMismatch("rotation family is defined for qubits".into()));
    }
    let rotated_states = theta_grid
        .iter()
        .map(|&theta| {
            if !theta.is_finite() {
                return Err(Error::NonFinite);
            }
            base.conjugate_by(&rotation(Axis::Y, theta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThetaFamily {
        base_state: base.clone(),
        angles: theta_grid.to_vec(),
        rotated_states,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint<T: Real> {
    pub theta: T,
    /// ms.
    pub tau: T,
    /// kHz.
    pub f_neq: T,
}

/// `F_neq` of every family member after every delay, θ-major.
pub fn free_energy_surface<T, F>(
    family: &ThetaFamily<T>,
    channel_builder: F,
    tau_grid: &[T],
    h: &ComplexMatrix<T>,
    temperature: T,
) -> Result<Vec<SurfacePoint<T>>>
where
    T: Real,
    F: Fn(T) -> Result<KrausChannel<T>>,
{
    if family.angles.is_empty() || tau_grid.is_empty() {
        return Err(Error::InvalidParameter("surface grids must be nonempty".into()));
    }
    let channels = tau_grid.iter().map(|&t| channel_builder(t)).collect::<Result<Vec<_>>>()?;
    let rows = family
        .angles
        .par_iter()
        .zip(family.rotated_states.par_iter())
        .map(|(&theta, rho)| {
            tau_grid
                .iter()
                .zip(&channels)
                .map(|(&tau, ch)| {
                    let out = apply_channel(ch, rho)?;
                    Ok(SurfacePoint {
                        theta,
                        tau,
                        f_neq: f_neq(&out, h, temperature),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Heat-exchange trajectory of `rho0`, optionally after the Mpemba unitary
/// toward the environment's energy basis.
pub fn cooling_curves<T: Real>(
    rho0: &DensityMatrix<T>,
    env: &ThermalEnvironment<T>,
    j_hz: T,
    tau_grid: &[T],
    with_mpemba: bool,
) -> Result<RelaxationTrajectory<T>> {
    let h = env.hamiltonian();
    let start = if with_mpemba {
        let dec = reference_generator(env, j_hz)?;
        mpemba_unitary(rho0, &h, env.temperature, &dec)?.target_state
    } else {
        rho0.clone()
    };
    let states = tau_grid
        .par_iter()
        .map(|&tau| apply_channel(&build_heat_exchange(env, j_hz, tau)?, &start))
        .collect::<Result<Vec<_>>>()?;
    RelaxationTrajectory::from_states(
        if with_mpemba { "mb" } else { "rho0" },
        tau_grid.to_vec(),
        states,
        &h,
        env.temperature,
        &env.gibbs_state(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linspace;
    use crate::thermo::{detect_crossing, equilibrium_free_energy, Observable};
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    const J: f64 = 215.1;

    fn env() -> ThermalEnvironment<f64> {
        ThermalEnvironment::new(4.77, 2.0).unwrap()
    }

    fn rho0() -> DensityMatrix<f64> {
        x_basis_state(0.3, 0.7).unwrap()
    }

    #[test]
    fn x_basis_state_matrix() {
        let m = ComplexMatrix::from_real(2, 2, &[0.5, -0.2, -0.2, 0.5]);
        assert!(rho0().matrix().max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn inversion_of_paper_state() {
        let e = env();
        let dec = reference_generator(&e, J).unwrap();
        let t = mpemba_unitary(&rho0(), &e.hamiltonian(), e.temperature, &dec).unwrap();
        let p = t.target_state.populations();
        assert!((p[0] - 0.3).abs() < 1e-12 && (p[1] - 0.7).abs() < 1e-12);
        assert!(t.target_state.matrix()[(0, 1)].norm() < 1e-12);
        assert!(t.unitarity_error() < 1e-12);
        assert!(t.f_neq_gain > 0.0);
        assert!(t.slow_overlap_after.norm() <= 1e-10);
        assert!((t.slow_overlap_before.norm() - 0.2).abs() < 1e-10);
        assert_eq!(t.slow_overlaps_after.len(), 2);
    }

    #[test]
    fn inversion_of_gibbs_state() {
        let e = env();
        let dec = reference_generator(&e, J).unwrap();
        let g = e.gibbs_state();
        let h = e.hamiltonian();
        let t = mpemba_unitary(&g, &h, e.temperature, &dec).unwrap();
        let p = t.target_state.populations();
        assert!((p[0] - e.excited_population).abs() < 1e-12);
        let mean = crate::thermo::mean_energy(&g, &h);
        assert!((t.f_neq_gain - 2.0 * mean.abs()).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_gains_nothing() {
        let e = env();
        let dec = reference_generator(&e, J).unwrap();
        let t = mpemba_unitary(&DensityMatrix::maximally_mixed(2), &e.hamiltonian(), e.temperature, &dec).unwrap();
        assert!(t.f_neq_gain.abs() < 1e-14);
        assert!(t.unitarity_error() < 1e-12);
    }

    #[test]
    fn degenerate_hamiltonian_rejected() {
        let e = env();
        let dec = reference_generator(&e, J).unwrap();
        let h = ComplexMatrix::<f64>::identity(2);
        assert!(matches!(
            mpemba_unitary(&rho0(), &h, 4.77, &dec),
            Err(Error::DegenerateHamiltonian)
        ));
    }

    #[test]
    fn theta_family_examples() {
        let fam = build_theta_family(&rho0(), &[0.0, FRAC_PI_2, TAU]).unwrap();
        let base = rho0();
        assert!(fam.rotated_states[0].matrix().max_abs_diff(base.matrix()) < 1e-15);
        assert!(fam.rotated_states[2].matrix().max_abs_diff(base.matrix()) < 1e-12);
        let b = fam.rotated_states[1].bloch();
        assert!(b[0].abs() < 1e-15 && (b[2].abs() - 0.4).abs() < 1e-15);
        assert!(build_theta_family(&base, &[f64::NAN]).is_err());
    }

    #[test]
    fn surface_properties() {
        let e = env();
        let h = e.hamiltonian();
        let thetas = linspace(0.0, TAU, 73);
        let taus = linspace(0.0, max_delay_ms(J), 64);
        let fam = build_theta_family(&rho0(), &thetas).unwrap();
        let rows = free_energy_surface(&fam, |t| build_heat_exchange(&e, J, t), &taus, &h, e.temperature).unwrap();
        assert_eq!(rows.len(), 73 * 64);
        assert_eq!(rows[64].theta, thetas[1]);
        let feq = equilibrium_free_energy(&h, e.temperature).unwrap();
        for r in rows.iter().filter(|r| r.tau == taus[63]) {
            assert!((r.f_neq - feq).abs() < 1e-6);
        }
        let initial: Vec<_> = rows.iter().filter(|r| r.tau == 0.0).collect();
        let argmin = initial
            .iter()
            .min_by(|a, b| a.f_neq.partial_cmp(&b.f_neq).unwrap())
            .unwrap();
        assert!((argmin.theta - FRAC_PI_2).abs() < 1e-12);
        let argmax = initial
            .iter()
            .max_by(|a, b| a.f_neq.partial_cmp(&b.f_neq).unwrap())
            .unwrap();
        assert!((argmax.theta - 1.5 * PI).abs() <= TAU / 72.0 + 1e-12);
    }

    #[test]
    fn cooling_pair_shows_persistent_crossing() {
        let e = env();
        let taus = linspace(0.0, max_delay_ms(J), 64);
        let plain = cooling_curves(&rho0(), &e, J, &taus, false).unwrap();
        let mb = cooling_curves(&rho0(), &e, J, &taus, true).unwrap();
        let (dp, dm) = (plain.delta_f(), mb.delta_f());
        assert!(dm[0] > dp[0] && dp[0] > 0.0);
        let r = detect_crossing(&mb, &plain, Observable::FNeq).unwrap();
        assert!(r.exists && r.persistent);
        let t = r.t_cross.unwrap();
        assert!(t > 0.0 && t < max_delay_ms(J));
    }

    #[test]
    fn gibbs_start_gives_flat_curve() {
        let e = env();
        let taus = linspace(0.0, max_delay_ms(J), 16);
        let c = cooling_curves(&e.gibbs_state(), &e, J, &taus, false).unwrap();
        assert!(c.delta_f().iter().all(|d| d.abs() < 1e-12));
    }
}
