//! Heat-exchange protocol as a qubit Kraus channel.
//!
//! Free evolution under a `σ_z ⊗ σ_z` scalar coupling `J` for a delay `τ`,
//! with an auxiliary qubit prepared thermally, acts on the working qubit as
//! four Kraus operators built from `cos(πJτ)` and `sin(πJτ)`. For
//! `τ ∈ [0, (2J)⁻¹]` this is a generalized amplitude damping map with decay
//! parameter `η = sin²(πJτ)` whose fixed point is the auxiliary's thermal state.

use crate::error::{Error, Result};
use crate::liouville::{DensityMatrix, SuperOperator};
use crate::numerics::{eigh, pauli, ComplexMatrix};
use crate::scalar::{re, Cx, Real};

/// Longest delay of the protocol, `(2J)⁻¹`, in ms for `J` in Hz.
pub fn max_delay_ms<T: Real>(j_hz: T) -> T {
    T::lit(1000.0) / (T::lit(2.0) * j_hz)
}

/// Thermal state of a qubit with Hamiltonian `-2πν σ_z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalEnvironment<T: Real> {
    /// `k_B T / h` in kHz.
    pub temperature: T,
    /// `ν` in kHz.
    pub gap_frequency: T,
    pub excited_population: T,
}

impl<T: Real> ThermalEnvironment<T> {
    pub fn new(temperature_khz: T, gap_frequency_khz: T) -> Result<Self> {
        if !(temperature_khz > T::zero()) || !temperature_khz.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {temperature_khz}"
            )));
        }
        if !(gap_frequency_khz > T::zero()) || !gap_frequency_khz.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gap frequency must be positive, got {gap_frequency_khz}"
            )));
        }
        let boltz = (-T::lit(2.0) * gap_frequency_khz / temperature_khz).exp();
        Ok(Self {
            temperature: temperature_khz,
            gap_frequency: gap_frequency_khz,
            excited_population: boltz / (T::one() + boltz),
        })
    }

    pub fn hamiltonian(&self) -> ComplexMatrix<T> {
        pauli::qubit_hamiltonian(self.gap_frequency, pauli::Axis::Z)
    }

    /// `diag(1 - p, p)`.
    pub fn gibbs_state(&self) -> DensityMatrix<T> {
        let p = self.excited_population;
        DensityMatrix::from_trusted(ComplexMatrix::from_diagonal(&[re(T::one() - p), re(p)]))
    }
}

#[derive(Clone, Debug)]
pub struct KrausChannel<T: Real> {
    pub operators: Vec<ComplexMatrix<T>>,
    pub labels: Vec<String>,
    /// Delay time in ms; zero for channels not built from the protocol.
    pub tau: T,
    pub p_aux: T,
    /// Scalar coupling in Hz.
    pub coupling_j: T,
}

impl<T: Real> KrausChannel<T> {
    /// Arbitrary Kraus set; completeness is checked.
    pub fn new(operators: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let ch = Self {
            labels: (1..=operators.len()).map(|i| format!("K{i}")).collect(),
            operators,
            tau: T::zero(),
            p_aux: T::zero(),
            coupling_j: T::zero(),
        };
        let err = ch.completeness_error()?;
        if err > T::tolerance(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "Kraus operators are not trace preserving (deviation {err:.3e})"
            )));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(dim)],
            labels: vec!["K1".into()],
            tau: T::zero(),
            p_aux: T::zero(),
            coupling_j: T::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    /// `max |Σ K†K - I|`.
    pub fn completeness_error(&self) -> Result<T> {
        let first = self
            .operators
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty Kraus set".into()))?;
        let d = first.nrows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &self.operators {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::ShapeMismatch("Kraus operators differ in shape".into()));
            }
            sum = &sum + &k.adjoint().matmul(k);
        }
        Ok(sum.max_abs_diff(&ComplexMatrix::identity(d)))
    }

    pub fn transfer_matrix(&self) -> Result<SuperOperator<T>> {
        SuperOperator::from_kraus(&self.operators)
    }

    /// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi_matrix(&self) -> ComplexMatrix<T> {
        let d = self.dim();
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let eij = ComplexMatrix::from_fn(d, d, |a, b| {
                    if a == i && b == j {
                        re(T::one())
                    } else {
                        re(T::zero())
                    }
                });
                let img = self.apply_operator(&eij);
                choi = &choi + &eij.kron(&img);
            }
        }
        choi
    }

    pub fn choi_min_eigenvalue(&self) -> Result<T> {
        Ok(eigh(&self.choi_matrix())?.values[0])
    }

    /// `Σ K X K†` on any operator.
    pub fn apply_operator(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let d = x.nrows();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &k.matmul(x).matmul(&k.adjoint()))
    }
}

/// The four Kraus operators of the heat-exchange protocol at delay `tau_ms`.
pub fn build_heat_exchange<T: Real>(env: &ThermalEnvironment<T>, j_hz: T, tau_ms: T) -> Result<KrausChannel<T>> {
    let max = max_delay_ms(j_hz);
    let slack = T::tolerance(1e-12) * max.abs().max(T::one());
    if !(tau_ms >= -slack && tau_ms <= max + slack) {
        return Err(Error::TauOutOfRange {
            tau: tau_ms.to_f64_lossy(),
            max: max.to_f64_lossy(),
        });
    }
    let p = env.excited_population;
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidParameter(format!("auxiliary population {p} outside [0, 1]")));
    }
    let angle = T::PI() * j_hz * tau_ms / T::lit(1000.0);
    let (s, c) = angle.sin_cos();
    let a = (T::one() - p).sqrt();
    let b = p.sqrt();
    let (o, i) = (T::zero(), T::one());
    let operators = vec![
        ComplexMatrix::from_real(2, 2, &[i, o, o, c]).scale_real(a),
        ComplexMatrix::from_real(2, 2, &[o, s, o, o]).scale_real(a),
        ComplexMatrix::from_real(2, 2, &[c, o, o, i]).scale_real(b),
        ComplexMatrix::from_real(2, 2, &[o, o, -s, o]).scale_real(b),
    ];
    Ok(KrausChannel {
        operators,
        labels: ["K1", "K2", "K3", "K4"].iter().map(|s| s.to_string()).collect(),
        tau: tau_ms,
        p_aux: p,
        coupling_j: j_hz,
    })
}

pub fn apply_channel<T: Real>(ch: &KrausChannel<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(ch.apply_operator(rho.matrix()).hermitian_part())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GadReport<T: Real> {
    /// Fitted decay parameter.
    pub eta: T,
    /// Fitted excited population of the fixed point.
    pub p: T,
    pub max_deviation: T,
    pub pass: bool,
}

/// Reference generalized amplitude damping action, written directly from
/// its standard Kraus form.
pub fn gad_reference<T: Real>(eta: T, p: T, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (o, i) = (T::zero(), T::one());
    let keep = (i - eta).sqrt();
    let jump = eta.sqrt();
    let ops = [
        ComplexMatrix::from_real(2, 2, &[i, o, o, keep]).scale_real((i - p).sqrt()),
        ComplexMatrix::from_real(2, 2, &[o, jump, o, o]).scale_real((i - p).sqrt()),
        ComplexMatrix::from_real(2, 2, &[keep, o, o, i]).scale_real(p.sqrt()),
        ComplexMatrix::from_real(2, 2, &[o, o, jump, o]).scale_real(p.sqrt()),
    ];
    ops.iter()
        .fold(ComplexMatrix::zeros(2, 2), |acc, k| &acc + &k.matmul(rho).matmul(&k.adjoint()))
}

/// Fits `(η, p)` from the images of `|0⟩` and `|1⟩` and compares the channel
/// with the reference map on a tomographically complete input set.
pub fn verify_gad_equivalence<T: Real>(ch: &KrausChannel<T>) -> Result<GadReport<T>> {
    if ch.dim() != 2 {
        return Err(Error::ShapeMismatch("generalized amplitude damping is a qubit map".into()));
    }
    let ground = ComplexMatrix::from_real(2, 2, &[T::one(), T::zero(), T::zero(), T::zero()]);
    let excited = ComplexMatrix::from_real(2, 2, &[T::zero(), T::zero(), T::zero(), T::one()]);
    let from_ground = ch.apply_operator(&ground)[(1, 1)].re;
    let from_excited = ch.apply_operator(&excited)[(1, 1)].re;
    let eta = (T::one() - (from_excited - from_ground)).max(T::zero()).min(T::one());
    let p = if eta > T::tolerance(1e-12) {
        from_ground / eta
    } else {
        ch.p_aux
    };

    let h = T::lit(0.5);
    let inputs = [
        ground,
        excited,
        ComplexMatrix::from_real(2, 2, &[h, h, h, h]),
        ComplexMatrix::from_vec(2, 2, vec![re(h), Cx::new(T::zero(), -h), Cx::new(T::zero(), h), re(h)])?,
        // off-diagonal unit operators complete the operator basis
        ComplexMatrix::from_real(2, 2, &[T::zero(), T::one(), T::zero(), T::zero()]),
        ComplexMatrix::from_real(2, 2, &[T::zero(), T::zero(), T::one(), T::zero()]),
    ];
    let max_deviation = inputs
        .iter()
        .map(|x| ch.apply_operator(x).max_abs_diff(&gad_reference(eta, p, x)))
        .fold(T::zero(), T::max);
    Ok(GadReport {
        eta,
        p,
        max_deviation,
        pass: max_deviation < T::tolerance(1e-10),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DaviesReport<T: Real> {
    /// Largest coupling between population and coherence indices.
    pub max_coupling: T,
    pub pass: bool,
}

/// Checks that a generator, expressed in the eigenbasis given by the columns
/// of `energy_basis`, has no population–coherence coupling.
pub fn verify_davies_blocks<T: Real>(gen: &SuperOperator<T>, energy_basis: &ComplexMatrix<T>) -> DaviesReport<T> {
    let d = gen.dim();
    let l = gen.in_basis(energy_basis);
    let is_pop = |idx: usize| idx / d == idx % d;
    let mut worst = T::zero();
    for r in 0..d * d {
        for c in 0..d * d {
            if is_pop(r) != is_pop(c) {
                worst = worst.max(l.matrix()[(r, c)].norm());
            }
        }
    }
    DaviesReport {
        max_coupling: worst,
        pass: worst < T::tolerance(1e-9),
    }
}
