//! Liouville-space representation of qudit dynamics.
//!
//! States are flattened row by row (`ROW_STACKING`), so that
//! `vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ)`. Every superoperator in the crate is
//! built in that convention, and channel transfer matrices are checked
//! against direct Kraus action rather than trusted symbolically.

use std::cmp::Ordering;

use log::debug;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::numerics::{eig_general, eigh, expm, logm_principal, ComplexMatrix};
use crate::scalar::{re, Cx, Real};

/// Vectorization convention tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    RowStacking,
}

pub const ROW_STACKING: Convention = Convention::RowStacking;

/// Hermitian, unit-trace, positive semidefinite `d × d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        matrix
            .require_square("density matrix")
            .map_err(|e| Error::InvalidState(e.to_string()))?;
        let herm = matrix.hermiticity_error();
        if herm > T::tolerance(1e-12) {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - re(T::one())).norm() > T::tolerance(1e-12) {
            return Err(Error::InvalidState(format!("trace {:.15} != 1", tr.re)));
        }
        let matrix = matrix.hermitian_part();
        let min = eigh(&matrix)?.values[0];
        if min < -T::tolerance(1e-10) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix<T>) -> Self {
        Self { matrix }
    }

    /// `diag(p)` with `p` summing to one.
    pub fn diagonal(populations: &[T]) -> Result<Self> {
        let d: Vec<Cx<T>> = populations.iter().map(|&p| re(p)).collect();
        Self::new(ComplexMatrix::from_diagonal(&d))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / T::lit(dim as f64);
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(w),
        }
    }

    /// `|ψ⟩⟨ψ|` of a normalized copy of `psi`.
    pub fn pure(psi: &[Cx<T>]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let n = psi.len();
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm)))
    }

    /// Qubit state `(I + r·σ)/2`.
    pub fn from_bloch(x: T, y: T, z: T) -> Result<Self> {
        let half = T::lit(0.5);
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                re(half * (T::one() + z)),
                Cx::new(half * x, -half * y),
                Cx::new(half * x, half * y),
                re(half * (T::one() - z)),
            ],
        )?;
        Self::new(m)
    }

    /// Bloch vector `(Tr ρσx, Tr ρσy, Tr ρσz)` of a qubit state.
    pub fn bloch(&self) -> [T; 3] {
        let m = &self.matrix;
        let two = T::lit(2.0);
        [two * m[(0, 1)].re, -two * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re]
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        eigh(&self.matrix).map(|e| e.values).unwrap_or_default()
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        Self::new(u.matmul(&self.matrix).matmul(&u.adjoint()).hermitian_part())
    }

    pub fn populations(&self) -> Vec<T> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }
}

/// Row-stacked amplitudes of a `d × d` operator.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorizedState<T: Real> {
    pub dim: usize,
    pub amplitudes: Vec<Cx<T>>,
    pub convention: Convention,
}

impl<T: Real> VectorizedState<T> {
    pub fn from_operator(m: &ComplexMatrix<T>) -> Self {
        Self {
            dim: m.nrows(),
            amplitudes: m.as_slice().to_vec(),
            convention: ROW_STACKING,
        }
    }

    pub fn to_operator(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_fn(self.dim, self.dim, |i, j| self.amplitudes[i * self.dim + j])
    }

    /// Validates the unstacked operator as a density matrix.
    pub fn devectorize(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.to_operator())
    }
}

pub fn vectorize<T: Real>(rho: &DensityMatrix<T>) -> VectorizedState<T> {
    VectorizedState::from_operator(rho.matrix())
}

/// `d² × d²` linear map on vectorized operators.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator<T: Real> {
    dim: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> SuperOperator<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        matrix.require_square("superoperator")?;
        let n = matrix.nrows();
        let dim = (n as f64).sqrt().round() as usize;
        if dim * dim != n {
            return Err(Error::ShapeMismatch(format!("superoperator size {n} is not a square d^2")));
        }
        Ok(Self { dim, matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// Transfer matrix `Σ_j K_j ⊗ K_j*` of a Kraus map.
    pub fn from_kraus(operators: &[ComplexMatrix<T>]) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty Kraus set".into()))?;
        let d = first.nrows();
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for k in operators {
            m = &m + &k.kron(&k.conj());
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, v: &VectorizedState<T>) -> VectorizedState<T> {
        VectorizedState {
            dim: self.dim,
            amplitudes: self.matrix.matvec(&v.amplitudes),
            convention: ROW_STACKING,
        }
    }

    pub fn apply_operator(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.apply(&VectorizedState::from_operator(m)).to_operator()
    }

    /// `max |⟨⟨I| L|_j|` for a generator, i.e. the violation of `⟨⟨I|L = 0`.
    pub fn trace_preservation_error(&self) -> T {
        let ident = VectorizedState::from_operator(&ComplexMatrix::<T>::identity(self.dim));
        self.matrix
            .vecmat(&ident.amplitudes)
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// Representation of the same map in the basis given by the columns of `u`:
    /// `(U† ⊗ Uᵀ) L (U ⊗ U*)`.
    pub fn in_basis(&self, u: &ComplexMatrix<T>) -> Self {
        let forward = u.kron(&u.conj());
        let back = u.adjoint().kron(&u.transpose());
        Self {
            dim: self.dim,
            matrix: back.matmul(&self.matrix).matmul(&forward),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn exp(&self, t: T) -> Result<Self> {
        Ok(Self {
            dim: self.dim,
            matrix: expm(&self.matrix.scale_real(t))?,
        })
    }
}

impl<T: Real> std::ops::Add for &SuperOperator<T> {
    type Output = SuperOperator<T>;

    fn add(self, rhs: Self) -> SuperOperator<T> {
        SuperOperator {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

/// Jump operator with its non-negative rate.
#[derive(Clone, Debug)]
pub struct Jump<T: Real> {
    pub operator: ComplexMatrix<T>,
    pub rate: T,
}

impl<T: Real> Jump<T> {
    pub fn new(operator: ComplexMatrix<T>, rate: T) -> Self {
        Self { operator, rate }
    }
}

/// `L = -i(H ⊗ I - I ⊗ Hᵀ) + Σ γ (A ⊗ A* - ½ A†A ⊗ I - ½ I ⊗ (A†A)ᵀ)`.
///
/// `h` is in angular units, so the commutator carries no extra 2π.
pub fn build_lindbladian<T: Real>(h: &ComplexMatrix<T>, jumps: &[Jump<T>]) -> Result<SuperOperator<T>> {
    h.require_square("Hamiltonian")?;
    if !h.is_hermitian(T::tolerance(1e-12) * h.max_abs().max(T::one())) {
        return Err(Error::InvalidParameter("Hamiltonian is not Hermitian".into()));
    }
    let d = h.nrows();
    let ident = ComplexMatrix::<T>::identity(d);
    let minus_i = Cx::new(T::zero(), -T::one());
    let mut l = (&h.kron(&ident) - &ident.kron(&h.transpose())).scale(minus_i);
    let half = T::lit(0.5);
    for (index, jump) in jumps.iter().enumerate() {
        if jump.rate < T::zero() || !jump.rate.is_finite() {
            return Err(Error::NegativeRate {
                index,
                rate: jump.rate.to_f64_lossy(),
            });
        }
        let a = &jump.operator;
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::ShapeMismatch("jump operator dimension differs from Hamiltonian".into()));
        }
        let ada = a.adjoint().matmul(a);
        let anti = &ada.kron(&ident) + &ident.kron(&ada.transpose());
        let term = &a.kron(&a.conj()) - &anti.scale_real(half);
        l = &l + &term.scale_real(jump.rate);
    }
    SuperOperator::new(l)
}

/// Relaxation mode classification by where a right mode's weight lives in
/// the basis the generator is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    Stationary,
    Population,
    Coherence,
    Mixed,
}

impl ModeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Stationary => "stationary",
            ModeKind::Population => "population",
            ModeKind::Coherence => "coherence",
            ModeKind::Mixed => "mixed",
        }
    }
}

/// Eigen-decomposition of a generator sorted by `|Re λ|` ascending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub eigenvalues: Vec<Cx<T>>,
    /// `|ζ_k⟩⟩`, with the stationary mode scaled to unit trace.
    pub right_modes: Vec<Vec<Cx<T>>>,
    /// `⟨⟨ξ_k|`, biorthonormal to `right_modes`.
    pub left_modes: Vec<Vec<Cx<T>>>,
    pub fixed_point: DensityMatrix<T>,
    pub condition_estimate: T,
    dim: usize,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// 1-based mode access, matching the usual `λ_1 = 0` labelling.
    pub fn eigenvalue(&self, k: usize) -> Result<Cx<T>> {
        self.check_index(k)?;
        Ok(self.eigenvalues[k - 1])
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.len() {
            Err(Error::IndexOutOfRange { index: k, len: self.len() })
        } else {
            Ok(())
        }
    }

    /// 1-based indices of all modes whose eigenvalue equals `λ_2` to tolerance
    /// (the slow pair for a qubit generalized amplitude damping generator).
    pub fn slow_modes(&self) -> Vec<usize> {
        if self.len() < 2 {
            return Vec::new();
        }
        let lam2 = self.eigenvalues[1];
        let tol = T::tolerance(1e-8) * lam2.norm().max(T::one());
        (2..=self.len())
            .filter(|&k| (self.eigenvalues[k - 1].re.abs() - lam2.re.abs()).abs() <= tol)
            .collect()
    }

    pub fn classify(&self, k: usize) -> Result<ModeKind> {
        self.check_index(k)?;
        if k == 1 {
            return Ok(ModeKind::Stationary);
        }
        let d = self.dim;
        let v = &self.right_modes[k - 1];
        let (mut pop, mut coh) = (T::zero(), T::zero());
        for i in 0..d {
            for j in 0..d {
                let w = v[i * d + j].norm_sqr();
                if i == j {
                    pop += w;
                } else {
                    coh += w;
                }
            }
        }
        let total = pop + coh;
        let tol = T::tolerance(1e-10) * total;
        Ok(if coh <= tol {
            ModeKind::Population
        } else if pop <= tol {
            ModeKind::Coherence
        } else {
            ModeKind::Mixed
        })
    }
}

pub fn decompose<T: Real>(l: &SuperOperator<T>) -> Result<SpectralDecomposition<T>> {
    let sys = eig_general(l.matrix())?;
    let n = sys.dim();
    let d = l.dim();
    let scale = l.matrix().frobenius_norm().max(T::one());

    // Group numerically equal eigenvalues, then order groups by
    // (|Re|, |Im|, Im); members of a group keep their eigensolver order,
    // which is canonical for degenerate spaces.
    let gap = T::tolerance(1e-9) * scale;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups
            .iter_mut()
            .find(|g| (sys.eigenvalues[g[0]] - sys.eigenvalues[k]).norm() <= gap)
        {
            Some(g) => g.push(k),
            None => groups.push(vec![k]),
        }
    }
    let key = |g: &Vec<usize>| {
        let z = sys.eigenvalues[g[0]];
        (z.re.abs(), z.im.abs(), z.im)
    };
    let cmp_t = |a: T, b: T| a.partial_cmp(&b).unwrap_or(Ordering::Equal);
    groups.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        cmp_t(ka.0, kb.0)
            .then(cmp_t(ka.1, kb.1))
            .then(cmp_t(ka.2, kb.2))
    });
    for g in groups.iter_mut() {
        g.sort_by_key(|&k| leading_index(&sys.right(k)));
    }
    let order: Vec<usize> = groups.into_iter().flatten().collect();

    let eigenvalues: Vec<Cx<T>> = order.iter().map(|&k| sys.eigenvalues[k]).collect();
    let mut right_modes: Vec<Vec<Cx<T>>> = order.iter().map(|&k| sys.right(k)).collect();
    let mut left_modes: Vec<Vec<Cx<T>>> = order.iter().map(|&k| sys.left(k)).collect();

    let min_re = eigenvalues[0].re.abs();
    if min_re > T::lit(1e-8) {
        return Err(Error::NoStationaryMode {
            min_re: min_re.to_f64_lossy(),
        });
    }

    let trace: Cx<T> = (0..d).map(|i| right_modes[0][i * d + i]).fold(re(T::zero()), |a, b| a + b);
    if trace.norm() <= T::tolerance(1e-12) {
        return Err(Error::InvalidState("stationary mode has zero trace".into()));
    }
    for z in right_modes[0].iter_mut() {
        *z /= trace;
    }
    for z in left_modes[0].iter_mut() {
        *z *= trace;
    }
    let fp = VectorizedState {
        dim: d,
        amplitudes: right_modes[0].clone(),
        convention: ROW_STACKING,
    }
    .to_operator();
    let fixed_point = DensityMatrix::new(fp.hermitian_part())?;

    Ok(SpectralDecomposition {
        eigenvalues,
        right_modes,
        left_modes,
        fixed_point,
        condition_estimate: sys.condition_estimate,
        dim: d,
    })
}

fn leading_index<T: Real>(v: &[Cx<T>]) -> usize {
    let tol = T::tolerance(1e-8);
    v.iter().position(|z| z.norm() > tol).unwrap_or(v.len())
}

/// `⟨⟨ξ_k|ρ⟩⟩` for 1-based `k`.
pub fn mode_overlap<T: Real>(dec: &SpectralDecomposition<T>, k: usize, rho: &DensityMatrix<T>) -> Result<Cx<T>> {
    dec.check_index(k)?;
    let v = vectorize(rho);
    Ok(dec.left_modes[k - 1]
        .iter()
        .zip(&v.amplitudes)
        .fold(re(T::zero()), |acc, (&l, &x)| acc + l * x))
}

/// `|ρ(t)⟩⟩ = Σ_k e^{tλ_k} |ζ_k⟩⟩⟨⟨ξ_k|ρ(0)⟩⟩`, re-Hermitized.
pub fn propagate_spectral<T: Real>(
    dec: &SpectralDecomposition<T>,
    rho0: &DensityMatrix<T>,
    t: T,
) -> Result<DensityMatrix<T>> {
    if t < T::zero() {
        return Err(Error::InvalidParameter(format!("negative time {t}")));
    }
    if t == T::zero() {
        return Ok(rho0.clone());
    }
    let v0 = vectorize(rho0);
    let n = dec.len();
    let mut out = vec![re(T::zero()); n];
    for k in 0..n {
        let c = dec.left_modes[k]
            .iter()
            .zip(&v0.amplitudes)
            .fold(re(T::zero()), |acc, (&l, &x)| acc + l * x);
        let w = (dec.eigenvalues[k] * t).exp() * c;
        for (o, &r) in out.iter_mut().zip(&dec.right_modes[k]) {
            *o += w * r;
        }
    }
    let m = VectorizedState {
        dim: dec.dim,
        amplitudes: out,
        convention: ROW_STACKING,
    }
    .to_operator();
    rehermitize(m)
}

/// `ρ(t) = devec(exp(tL) vec ρ0)`, the direct route used to cross-check
/// spectral propagation.
pub fn propagate_expm<T: Real>(l: &SuperOperator<T>, rho0: &DensityMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
    let e = l.exp(t)?;
    rehermitize(e.apply_operator(rho0.matrix()))
}

fn rehermitize<T: Real>(m: ComplexMatrix<T>) -> Result<DensityMatrix<T>> {
    let deviation = m.hermiticity_error();
    if deviation > T::tolerance(1e-8) {
        return Err(Error::HermiticityLoss {
            deviation: deviation.to_f64_lossy(),
        });
    }
    if deviation > T::zero() {
        debug!("re-Hermitized propagated state, deviation {:.3e}", deviation.to_f64_lossy());
    }
    DensityMatrix::new(m.hermitian_part())
}

/// `L = ln(Σ_j K_j ⊗ K_j*) / t`, the Markovian generator reproducing the
/// channel after time `t`.
pub fn extract_generator<T: Real>(channel: &KrausChannel<T>, t: T) -> Result<SuperOperator<T>> {
    if !(t > T::zero()) {
        return Err(Error::InvalidParameter(format!("generator time must be positive, got {t}")));
    }
    let transfer = channel.transfer_matrix()?;
    let log = logm_principal(transfer.matrix())?;
    SuperOperator::new(log.scale_real(T::one() / t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::pauli::{lowering, qubit_hamiltonian, raising, sigma_x, Axis};

    fn rho0() -> DensityMatrix<f64> {
        DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[0.5, -0.2, -0.2, 0.5])).unwrap()
    }

    #[test]
    fn vectorize_examples() {
        let mm = DensityMatrix::<f64>::maximally_mixed(2);
        let v: Vec<f64> = vectorize(&mm).amplitudes.iter().map(|z| z.re).collect();
        assert_eq!(v, vec![0.5, 0.0, 0.0, 0.5]);
        let g = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        let v: Vec<f64> = vectorize(&g).amplitudes.iter().map(|z| z.re).collect();
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0]);
        let v = vectorize(&rho0());
        let want = [0.5, -0.2, -0.2, 0.5];
        for (z, w) in v.amplitudes.iter().zip(want) {
            assert!((z.re - w).abs() < 1e-15 && z.im == 0.0);
        }
        assert_eq!(v.devectorize().unwrap(), rho0());
    }

    #[test]
    fn rho0_is_mixture_of_x_eigenstates() {
        // 0.3|x+><x+| + 0.7|x-><x-|
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let xp = DensityMatrix::pure(&[re(s), re(s)]).unwrap();
        let xm = DensityMatrix::pure(&[re(s), re(-s)]).unwrap();
        let mix = &xp.matrix().scale_real(0.3) + &xm.matrix().scale_real(0.7);
        assert!(mix.max_abs_diff(rho0().matrix()) < 1e-15);
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(DensityMatrix::<f64>::diagonal(&[0.6, 0.6]).is_err());
        assert!(DensityMatrix::<f64>::diagonal(&[1.2, -0.2]).is_err());
        let nh = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]);
        assert!(DensityMatrix::new(nh).is_err());
    }

    #[test]
    fn zero_lindbladian() {
        let h = ComplexMatrix::<f64>::zeros(2, 2);
        let l = build_lindbladian(&h, &[]).unwrap();
        assert_eq!(l, SuperOperator::zero(2));
    }

    #[test]
    fn negative_rate_rejected() {
        let h = ComplexMatrix::<f64>::zeros(2, 2);
        let r = build_lindbladian(&h, &[Jump::new(lowering(), -1.0)]);
        assert!(matches!(r, Err(Error::NegativeRate { index: 0, .. })));
    }

    #[test]
    fn amplitude_damping_generator() {
        // analytic: λ = 0, -γ/2, -γ/2, -γ; fixed point |0><0|
        let h = ComplexMatrix::<f64>::zeros(2, 2);
        let l = build_lindbladian(&h, &[Jump::new(lowering(), 1.0)]).unwrap();
        assert!(l.trace_preservation_error() < 1e-15);
        let dec = decompose(&l).unwrap();
        let want = [0.0, -0.5, -0.5, -1.0];
        for (z, w) in dec.eigenvalues.iter().zip(want) {
            assert!((z.re - w).abs() < 1e-12 && z.im.abs() < 1e-12, "{z}");
        }
        let fp = dec.fixed_point.populations();
        assert!((fp[0] - 1.0).abs() < 1e-12 && fp[1].abs() < 1e-12);
        assert_eq!(dec.classify(2).unwrap(), ModeKind::Coherence);
        assert_eq!(dec.classify(4).unwrap(), ModeKind::Population);
        assert_eq!(dec.slow_modes(), vec![2, 3]);
    }

    #[test]
    fn detailed_balance_fixed_point() {
        let (down, up) = (1.3f64, 0.4f64);
        let h = qubit_hamiltonian(2.0, Axis::Z);
        let l = build_lindbladian(&h, &[Jump::new(lowering(), down), Jump::new(raising(), up)]).unwrap();
        let dec = decompose(&l).unwrap();
        let p = dec.fixed_point.populations();
        assert!((p[1] - up / (up + down)).abs() < 1e-12);
        // coherences rotate at the gap 2·2π·2 rad/ms and decay at (down+up)/2
        let lam2 = dec.eigenvalue(2).unwrap();
        assert!((lam2.re + 0.5 * (down + up)).abs() < 1e-10);
        assert!((lam2.im.abs() - 8.0 * std::f64::consts::PI).abs() < 1e-9);
        // generator annihilates the stationary mode
        let z1 = VectorizedState { dim: 2, amplitudes: dec.right_modes[0].clone(), convention: ROW_STACKING };
        assert!(l.apply(&z1).amplitudes.iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn first_overlap_is_trace() {
        let h = sigma_x::<f64>().scale_real(0.3);
        let l = build_lindbladian(&h, &[Jump::new(lowering(), 1.0), Jump::new(raising(), 0.2)]).unwrap();
        let dec = decompose(&l).unwrap();
        let o = mode_overlap(&dec, 1, &rho0()).unwrap();
        assert!((o - re(1.0)).norm() < 1e-12);
        assert!(matches!(mode_overlap(&dec, 0, &rho0()), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(mode_overlap(&dec, 5, &rho0()), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn spectral_matches_expm_propagation() {
        let h = sigma_x::<f64>().scale_real(1.7);
        let l = build_lindbladian(&h, &[Jump::new(lowering(), 0.8), Jump::new(raising(), 0.3)]).unwrap();
        let dec = decompose(&l).unwrap();
        let r0 = rho0();
        assert_eq!(propagate_spectral(&dec, &r0, 0.0).unwrap(), r0);
        for i in 1..=25 {
            let t = 0.2 * i as f64;
            let a = propagate_spectral(&dec, &r0, t).unwrap();
            let b = propagate_expm(&l, &r0, t).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-8);
        }
        let late = propagate_spectral(&dec, &r0, 10.0 / dec.eigenvalues[1].re.abs()).unwrap();
        assert!(late.matrix().max_abs_diff(dec.fixed_point.matrix()) < 1e-4);
        let still = propagate_spectral(&dec, &dec.fixed_point, 3.0).unwrap();
        assert!(still.matrix().max_abs_diff(dec.fixed_point.matrix()) < 1e-12);
    }

    #[test]
    fn basis_change_round_trip() {
        let h = sigma_x::<f64>();
        let l = build_lindbladian(&h, &[Jump::new(lowering(), 1.0)]).unwrap();
        let u = crate::numerics::pauli::rotation(Axis::Y, 0.7);
        let back = l.in_basis(&u).in_basis(&u.adjoint());
        assert!(back.matrix().max_abs_diff(l.matrix()) < 1e-13);
    }
}
