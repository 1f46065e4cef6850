//! Thermodynamic functionals of qudit states and the relaxation-crossing
//! detector.
//!
//! Hamiltonians are angular (`-2πν σ`); energies and free energies come out
//! in kHz, i.e. `Tr(Hρ)/2π`, so that `β = 1/T` with `T = k_B T / h` in kHz.

use crate::error::{Error, Result};
use crate::liouville::DensityMatrix;
use crate::numerics::{eigh, ComplexMatrix};
use crate::scalar::{re, Cx, Real};

/// Eigenvalues below this contribute nothing to `Tr ρ ln ρ`.
pub const ENTROPY_CUTOFF: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct GibbsSpec<T: Real> {
    pub hamiltonian: ComplexMatrix<T>,
    /// `k_B T / h` in kHz.
    pub temperature: T,
}

impl<T: Real> GibbsSpec<T> {
    pub fn new(hamiltonian: ComplexMatrix<T>, temperature: T) -> Result<Self> {
        if !(temperature > T::zero()) {
            return Err(Error::InvalidParameter(format!("temperature must be positive, got {temperature}")));
        }
        hamiltonian.require_square("Hamiltonian")?;
        Ok(Self { hamiltonian, temperature })
    }
}

/// Mean energy `Tr(Hρ)/2π` in kHz.
pub fn mean_energy<T: Real>(rho: &DensityMatrix<T>, h: &ComplexMatrix<T>) -> T {
    h.matmul(rho.matrix()).trace().re / T::TAU()
}

pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    let cutoff = T::lit(ENTROPY_CUTOFF);
    -rho.eigenvalues()
        .into_iter()
        .filter(|&x| x > cutoff)
        .map(|x| x * x.ln())
        .sum::<T>()
}

pub fn gibbs_state<T: Real>(spec: &GibbsSpec<T>) -> Result<DensityMatrix<T>> {
    let e = eigh(&spec.hamiltonian)?;
    // shift by the ground energy to keep the exponentials bounded
    let e0 = e.values[0];
    let scale = T::TAU() * spec.temperature;
    let weights: Vec<T> = e.values.iter().map(|&x| (-(x - e0) / scale).exp()).collect();
    let z: T = weights.iter().copied().sum();
    let rho = e.apply(|x| (-(x - e0) / scale).exp() / z);
    DensityMatrix::new(rho.hermitian_part())
}

/// `F_eq = -T ln Z` in kHz.
pub fn equilibrium_free_energy<T: Real>(h: &ComplexMatrix<T>, temperature: T) -> Result<T> {
    let e = eigh(h)?;
    let energies: Vec<T> = e.values.iter().map(|&x| x / T::TAU()).collect();
    let e0 = energies[0];
    let z_shifted: T = energies.iter().map(|&x| (-(x - e0) / temperature).exp()).sum();
    Ok(e0 - temperature * z_shifted.ln())
}

/// `F_neq = Tr(Hρ)/2π - T S(ρ)` in kHz.
pub fn f_neq<T: Real>(rho: &DensityMatrix<T>, h: &ComplexMatrix<T>, temperature: T) -> T {
    mean_energy(rho, h) - temperature * von_neumann_entropy(rho)
}

/// `Tr[ρ (ln ρ - ln σ)]`.
pub fn kl_divergence<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    let se = eigh(sigma.matrix())?;
    let min = se.values[0];
    if min <= T::lit(1e-12) {
        return Err(Error::SingularReference {
            min_eigenvalue: min.to_f64_lossy(),
        });
    }
    let ln_sigma = se.apply(|x| x.ln());
    let cross = rho.matrix().matmul(&ln_sigma).trace().re;
    Ok(-von_neumann_entropy(rho) - cross)
}

/// `½ Tr|ρ - σ|`.
pub fn trace_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> T {
    let diff = (rho.matrix() - sigma.matrix()).hermitian_part();
    let vals = eigh(&diff).map(|e| e.values).unwrap_or_default();
    T::lit(0.5) * vals.into_iter().map(|x| x.abs()).sum::<T>()
}

/// Passive state with the spectrum of `rho`: populations sorted so that the
/// largest sits on the lowest energy level of `h`.
pub fn passive_state<T: Real>(rho: &DensityMatrix<T>, h: &ComplexMatrix<T>) -> Result<DensityMatrix<T>> {
    let mut p = rho.eigenvalues();
    p.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let he = eigh(h)?;
    let n = p.len();
    let diag: Vec<Cx<T>> = p.iter().map(|&x| re(x)).collect();
    let v = &he.vectors;
    let m = v.matmul(&ComplexMatrix::from_diagonal(&diag)).matmul(&v.adjoint());
    debug_assert_eq!(m.nrows(), n);
    DensityMatrix::new(m.hermitian_part())
}

/// A relaxation curve sampled on an ascending time grid.
#[derive(Clone, Debug)]
pub struct RelaxationTrajectory<T: Real> {
    pub label: String,
    /// ms, strictly ascending.
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
    /// kHz.
    pub f_neq: Vec<T>,
    /// Trace distance to the reference (fixed-point) state.
    pub trace_dist: Vec<T>,
    /// Equilibrium free energy of the reference, kHz.
    pub f_eq: T,
}

impl<T: Real> RelaxationTrajectory<T> {
    /// Evaluates free energy and trace distance to `reference` at every state.
    pub fn from_states(
        label: impl Into<String>,
        times: Vec<T>,
        states: Vec<DensityMatrix<T>>,
        h: &ComplexMatrix<T>,
        temperature: T,
        reference: &DensityMatrix<T>,
    ) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::GridMismatch);
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("trajectory times must be strictly ascending".into()));
        }
        let f_eq = equilibrium_free_energy(h, temperature)?;
        let f_neq: Vec<T> = states.iter().map(|s| f_neq(s, h, temperature)).collect();
        if let Some(bad) = f_neq.iter().find(|&&f| f < f_eq - T::tolerance(1e-9)) {
            return Err(Error::InvalidState(format!(
                "free energy {bad} below equilibrium value {f_eq}"
            )));
        }
        let trace_dist = states.iter().map(|s| trace_distance(s, reference)).collect();
        Ok(Self {
            label: label.into(),
            times,
            states,
            f_neq,
            trace_dist,
            f_eq,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `ΔF_neq = F_neq - F_eq`.
    pub fn delta_f(&self) -> Vec<T> {
        self.f_neq.iter().map(|&f| f - self.f_eq).collect()
    }

    pub fn observable(&self, which: Observable) -> &[T] {
        match which {
            Observable::FNeq => &self.f_neq,
            Observable::TraceDist => &self.trace_dist,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    FNeq,
    TraceDist,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingReport<T: Real> {
    pub exists: bool,
    /// Linearly interpolated crossing time (ms).
    pub t_cross: Option<T>,
    /// `a < b` at every later grid time, ignoring a terminal stretch where
    /// both curves have merged at the common fixed point.
    pub persistent: bool,
}

/// Earliest sign change of `a - b` in the chosen observable.
pub fn detect_crossing<T: Real>(
    a: &RelaxationTrajectory<T>,
    b: &RelaxationTrajectory<T>,
    observable: Observable,
) -> Result<CrossingReport<T>> {
    if a.times.len() != b.times.len()
        || a.times
            .iter()
            .zip(&b.times)
            .any(|(x, y)| (*x - *y).abs() > T::tolerance(1e-12) * x.abs().max(T::one()))
    {
        return Err(Error::GridMismatch);
    }
    let tol = T::lit(1e-12);
    let d: Vec<T> = a
        .observable(observable)
        .iter()
        .zip(b.observable(observable))
        .map(|(x, y)| *x - *y)
        .collect();
    let sign = |x: T| {
        if x > tol {
            1
        } else if x < -tol {
            -1
        } else {
            0
        }
    };
    let times = &a.times;

    let mut last: Option<usize> = None;
    let mut crossing: Option<(usize, T)> = None;
    for (i, &di) in d.iter().enumerate() {
        let s = sign(di);
        if s == 0 {
            continue;
        }
        if let Some(j) = last {
            if sign(d[j]) == -s {
                let frac = d[j] / (d[j] - di);
                crossing = Some((i, times[j] + (times[i] - times[j]) * frac));
                break;
            }
        }
        last = Some(i);
    }

    let Some((first_after, t_cross)) = crossing else {
        return Ok(CrossingReport {
            exists: false,
            t_cross: None,
            persistent: false,
        });
    };
    // trailing points where the curves coincide (shared fixed point)
    let merged_from = (0..d.len())
        .rev()
        .take_while(|&i| sign(d[i]) == 0)
        .last()
        .unwrap_or(d.len());
    let persistent = (first_after..merged_from).all(|i| d[i] < -tol) && first_after < merged_from;
    Ok(CrossingReport {
        exists: true,
        t_cross: Some(t_cross),
        persistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::pauli::{qubit_hamiltonian, Axis};

    fn h1() -> ComplexMatrix<f64> {
        qubit_hamiltonian(2.0, Axis::Z)
    }

    #[test]
    fn infinite_temperature_gibbs_is_maximally_mixed() {
        let g = gibbs_state(&GibbsSpec::new(h1(), 1e6).unwrap()).unwrap();
        assert!(g.matrix().max_abs_diff(DensityMatrix::<f64>::maximally_mixed(2).matrix()) < 1e-5);
    }

    #[test]
    fn hot_gibbs_populations() {
        let g = gibbs_state(&GibbsSpec::new(h1(), 4.77).unwrap()).unwrap();
        let (a, b) = ((2.0f64 / 4.77).exp(), (-2.0f64 / 4.77).exp());
        let p = g.populations();
        assert!((p[0] - a / (a + b)).abs() < 1e-14);
        assert!((p[0] - 0.698).abs() < 1e-3 && (p[1] - 0.302).abs() < 1e-3);
    }

    #[test]
    fn cold_gibbs_along_x() {
        let h = qubit_hamiltonian(1.0, Axis::X);
        let g = gibbs_state(&GibbsSpec::new(h, 2.38).unwrap()).unwrap();
        // populations on |x+>, |x-> from the Bloch x component
        let x = g.bloch()[0];
        let p_plus = 0.5 * (1.0 + x);
        let (a, b) = ((1.0f64 / 2.38).exp(), (-1.0f64 / 2.38).exp());
        assert!((p_plus - a / (a + b)).abs() < 1e-14);
        assert!((p_plus - 0.698).abs() < 1e-3);
        assert!(g.bloch()[2].abs() < 1e-15);
    }

    #[test]
    fn free_energy_examples() {
        let t = 4.77;
        let g = gibbs_state(&GibbsSpec::new(h1(), t).unwrap()).unwrap();
        let feq = equilibrium_free_energy(&h1(), t).unwrap();
        assert!((f_neq(&g, &h1(), t) - feq).abs() < 1e-13);
        let mm = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((f_neq(&mm, &h1(), t) + t * 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn kl_examples() {
        let s = DensityMatrix::<f64>::diagonal(&[0.698, 0.302]).unwrap();
        assert!(kl_divergence(&s, &s).unwrap().abs() < 1e-15);
        let g = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        assert!((kl_divergence(&g, &s).unwrap() + 0.698f64.ln()).abs() < 1e-14);
        assert!((kl_divergence(&g, &s).unwrap() - 0.3596).abs() < 1e-4);
        assert!(matches!(kl_divergence(&s, &g), Err(Error::SingularReference { .. })));
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::<f64>::diagonal(&[0.0, 1.0]).unwrap();
        assert!(trace_distance(&a, &a).abs() < 1e-15);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-15);
        let c = DensityMatrix::<f64>::diagonal(&[0.7, 0.3]).unwrap();
        let d = DensityMatrix::<f64>::diagonal(&[0.698, 0.302]).unwrap();
        assert!((trace_distance(&c, &d) - 0.002).abs() < 1e-14);
    }

    #[test]
    fn passive_state_orders_populations() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[0.5, -0.2, -0.2, 0.5])).unwrap();
        let ps = passive_state(&rho, &h1()).unwrap();
        let p = ps.populations();
        assert!((p[0] - 0.7).abs() < 1e-14 && (p[1] - 0.3).abs() < 1e-14);
    }

    fn traj(label: &str, values: &[f64]) -> RelaxationTrajectory<f64> {
        let n = values.len();
        RelaxationTrajectory {
            label: label.into(),
            times: (0..n).map(|i| i as f64).collect(),
            states: vec![DensityMatrix::maximally_mixed(2); n],
            f_neq: values.to_vec(),
            trace_dist: values.to_vec(),
            f_eq: 0.0,
        }
    }

    #[test]
    fn crossing_detection() {
        let a = traj("a", &[1.0, 0.5, 0.2, 0.05, 0.0]);
        assert!(!detect_crossing(&a, &a, Observable::FNeq).unwrap().exists);

        let b = traj("b", &[0.5, 0.4, 0.3, 0.2, 0.0]);
        let r = detect_crossing(&a, &b, Observable::FNeq).unwrap();
        assert!(r.exists && r.persistent);
        // d = 0.1 at t=1, -0.1 at t=2
        assert!((r.t_cross.unwrap() - 1.5).abs() < 1e-12);

        let c = traj("c", &[1.0, 0.2, 0.35, 0.3, 0.0]);
        let r = detect_crossing(&c, &b, Observable::TraceDist).unwrap();
        assert!(r.exists && !r.persistent);

        let short = traj("s", &[1.0, 0.0]);
        assert_eq!(detect_crossing(&a, &short, Observable::FNeq), Err(Error::GridMismatch));
    }
}
