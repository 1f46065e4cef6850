//! General (non-Hermitian) complex eigendecomposition.
//!
//! Householder reduction to upper Hessenberg form, single-shift complex QR
//! with Wilkinson shifts to reach a Schur form `A = Z T Z†`, eigenvectors of
//! `T` by back-substitution, and left eigenvectors as the rows of `V⁻¹`,
//! which makes the pair biorthonormal by construction.

use super::{lu, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

/// Largest condition estimate accepted before a matrix is declared defective.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Clone, Debug)]
pub struct EigenSystem<T: Real> {
    pub eigenvalues: Vec<Cx<T>>,
    /// Column `k` is the right eigenvector of `eigenvalues[k]`.
    pub right_vectors: ComplexMatrix<T>,
    /// Row `k` is the left eigenvector of `eigenvalues[k]`, scaled so that
    /// `left_vectors · right_vectors = I`.
    pub left_vectors: ComplexMatrix<T>,
    /// `‖V‖_F ‖V⁻¹‖_F`; equals the dimension for a normal matrix.
    pub condition_estimate: T,
}

impl<T: Real> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn right(&self, k: usize) -> Vec<Cx<T>> {
        self.right_vectors.column(k)
    }

    pub fn left(&self, k: usize) -> Vec<Cx<T>> {
        self.left_vectors.row(k)
    }

    /// `max |(L R - I)_{jk}|`.
    pub fn biorthonormality_error(&self) -> T {
        let n = self.dim();
        self.left_vectors
            .matmul(&self.right_vectors)
            .max_abs_diff(&ComplexMatrix::identity(n))
    }

    /// `Σ_k λ_k |r_k⟩⟨l_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let lam = ComplexMatrix::from_diagonal(&self.eigenvalues);
        self.right_vectors.matmul(&lam).matmul(&self.left_vectors)
    }

    /// Applies `f` to the spectrum: `V diag(f(λ)) V⁻¹`.
    pub fn apply(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> ComplexMatrix<T> {
        let vals: Vec<Cx<T>> = self.eigenvalues.iter().map(|&z| f(z)).collect();
        self.right_vectors
            .matmul(&ComplexMatrix::from_diagonal(&vals))
            .matmul(&self.left_vectors)
    }
}

pub fn eig_general<T: Real>(a: &ComplexMatrix<T>) -> Result<EigenSystem<T>> {
    a.require_square("eigenvalue input")?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    let (mut h, mut z) = hessenberg(a);
    schur_qr(&mut h, &mut z)?;
    let eigenvalues = h.diagonal();

    let scale = h.frobenius_norm().max(T::min_positive_value());
    let mut vectors: Vec<Vec<Cx<T>>> = (0..n)
        .map(|k| {
            let y = triangular_eigenvector(&h, k, scale);
            normalize(z.matvec(&y))
        })
        .collect();

    canonicalize_clusters(&eigenvalues, &mut vectors, scale);

    let right_vectors = ComplexMatrix::from_columns(&vectors);
    let left_vectors = match lu::inverse(&right_vectors) {
        Ok(inv) => inv,
        Err(_) => {
            return Err(Error::DefectiveMatrix {
                condition: f64::INFINITY,
            })
        }
    };
    let condition_estimate = right_vectors.frobenius_norm() * left_vectors.frobenius_norm();
    if !(condition_estimate.to_f64_lossy() <= MAX_CONDITION) {
        return Err(Error::DefectiveMatrix {
            condition: condition_estimate.to_f64_lossy(),
        });
    }
    let sys = EigenSystem {
        eigenvalues,
        right_vectors,
        left_vectors,
        condition_estimate,
    };
    if sys.biorthonormality_error() > T::tolerance(1e-10) {
        return Err(Error::DefectiveMatrix {
            condition: condition_estimate.to_f64_lossy(),
        });
    }
    Ok(sys)
}

/// Returns `(H, Q)` with `A = Q H Q†` and `H` upper Hessenberg.
fn hessenberg<T: Real>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let x: Vec<Cx<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let phase = if x[0].norm() == T::zero() {
            re(T::one())
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        let two = T::lit(2.0);
        // H <- P H, P = I - 2 v v† acting on rows k+1..n
        for j in 0..n {
            let mut s = re(T::zero());
            for (t, i) in (k + 1..n).enumerate() {
                s += v[t].conj() * h[(i, j)];
            }
            for (t, i) in (k + 1..n).enumerate() {
                let d = v[t] * s * two;
                h[(i, j)] -= d;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = re(T::zero());
                for (t, j) in (k + 1..n).enumerate() {
                    s += m[(i, j)] * v[t];
                }
                for (t, j) in (k + 1..n).enumerate() {
                    let d = s * v[t].conj() * two;
                    m[(i, j)] -= d;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = re(T::zero());
        }
    }
    (h, q)
}

#[derive(Clone, Copy)]
struct Givens<T: Real> {
    c: T,
    s: Cx<T>,
}

impl<T: Real> Givens<T> {
    /// Rotation `G = [[c, s], [-s̄, c]]` with `G (x, y)ᵀ = (r, 0)ᵀ`.
    fn zeroing(x: Cx<T>, y: Cx<T>) -> Self {
        let ax = x.norm();
        let ay = y.norm();
        let norm = ax.hypot(ay);
        if norm == T::zero() {
            return Self {
                c: T::one(),
                s: re(T::zero()),
            };
        }
        if ax == T::zero() {
            return Self {
                c: T::zero(),
                s: y.conj() / ay,
            };
        }
        Self {
            c: ax / norm,
            s: (x / ax) * y.conj() / norm,
        }
    }

    fn apply_left(&self, m: &mut ComplexMatrix<T>, r0: usize, r1: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(r0, j)];
            let b = m[(r1, j)];
            m[(r0, j)] = a * self.c + self.s * b;
            m[(r1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// `M <- M G†` on columns `c0, c1`.
    fn apply_right_adjoint(&self, m: &mut ComplexMatrix<T>, c0: usize, c1: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let a = m[(i, c0)];
            let b = m[(i, c1)];
            m[(i, c0)] = a * self.c + b * self.s.conj();
            m[(i, c1)] = -a * self.s + b * self.c;
        }
    }
}

/// Reduces Hessenberg `h` to upper-triangular Schur form in place,
/// accumulating the unitary similarity into `z`.
fn schur_qr<T: Real>(h: &mut ComplexMatrix<T>, z: &mut ComplexMatrix<T>) -> Result<()> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let eps = T::epsilon();
    let max_iter_per_eig = 60;
    let mut total_iter = 0usize;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rotations: Vec<Givens<T>> = Vec::with_capacity(n);

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let off = h[(l, l - 1)].norm();
            let mut diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if diag == T::zero() {
                diag = h.frobenius_norm();
            }
            if off <= eps * diag {
                h[(l, l - 1)] = re(T::zero());
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total_iter += 1;
        if iter > max_iter_per_eig {
            return Err(Error::NonConvergence { iterations: total_iter });
        }

        let mu = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + re(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        rotations.clear();
        for k in l..hi {
            let g = Givens::zeroing(h[(k, k)], h[(k + 1, k)]);
            g.apply_left(h, k, k + 1, k..n);
            h[(k + 1, k)] = re(T::zero());
            rotations.push(g);
        }
        for (idx, g) in rotations.iter().enumerate() {
            let k = l + idx;
            g.apply_right_adjoint(h, k, k + 1, 0..(k + 2).min(hi + 1));
            g.apply_right_adjoint(z, k, k + 1, 0..n);
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    // clear sub-diagonal residue
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = re(T::zero());
        }
    }
    Ok(())
}

fn wilkinson_shift<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Cx<T> {
    let half = T::lit(0.5);
    let m = (a - d) * half;
    let disc = (m * m + b * c).sqrt();
    let mid = (a + d) * half;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvector of upper-triangular `t` for `t[k][k]` by back-substitution.
/// Near-equal diagonal entries with a negligible right-hand side mark a
/// degenerate, non-defective pair and get a zero component.
fn triangular_eigenvector<T: Real>(t: &ComplexMatrix<T>, k: usize, scale: T) -> Vec<Cx<T>> {
    let n = t.nrows();
    let eps = T::epsilon();
    let smin = (eps * scale).max(T::min_positive_value());
    let lam = t[(k, k)];
    let mut x = vec![re(T::zero()); n];
    x[k] = re(T::one());
    let mut xmax = T::one();
    for j in (0..k).rev() {
        let mut s = re(T::zero());
        for m in j + 1..=k {
            s += t[(j, m)] * x[m];
        }
        let mut denom = t[(j, j)] - lam;
        let degenerate_gap = T::epsilon().sqrt() * scale;
        if denom.norm() <= degenerate_gap && s.norm() <= T::lit(64.0) * eps * scale * xmax {
            x[j] = re(T::zero());
            continue;
        }
        if denom.norm() < smin {
            denom = re(smin);
        }
        x[j] = -s / denom;
        xmax = xmax.max(x[j].norm());
    }
    x
}

/// Unit 2-norm with the largest-modulus component made real positive.
fn normalize<T: Real>(mut v: Vec<Cx<T>>) -> Vec<Cx<T>> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if norm == T::zero() {
        return v;
    }
    let tol = T::lit(1e-12) * norm;
    // first component within round-off of the maximum modulus
    let maxmod = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let anchor = v
        .iter()
        .copied()
        .find(|z| z.norm() >= maxmod - tol)
        .unwrap_or(re(T::one()));
    let phase = anchor.conj() / anchor.norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
    v
}

/// Replaces each cluster of numerically equal eigenvalues' vectors with the
/// reduced-echelon basis of their span, so degenerate eigenspaces get a
/// deterministic basis (canonical vectors whenever the span is coordinate-aligned).
fn canonicalize_clusters<T: Real>(eigenvalues: &[Cx<T>], vectors: &mut [Vec<Cx<T>>], scale: T) {
    let n = eigenvalues.len();
    let gap = T::epsilon().sqrt() * scale.max(T::one());
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|&j| !assigned[j] && (eigenvalues[j] - eigenvalues[i]).norm() <= gap)
            .collect();
        for &j in &members {
            assigned[j] = true;
        }
        if members.len() < 2 {
            continue;
        }
        let mut rows: Vec<Vec<Cx<T>>> = members.iter().map(|&j| vectors[j].clone()).collect();
        if let Some(basis) = reduced_row_echelon(&mut rows) {
            for (&j, v) in members.iter().zip(basis) {
                vectors[j] = normalize(v);
            }
        }
    }
}

fn reduced_row_echelon<T: Real>(rows: &mut [Vec<Cx<T>>]) -> Option<Vec<Vec<Cx<T>>>> {
    let m = rows.len();
    let n = rows[0].len();
    let tol = T::epsilon().sqrt();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let (p, mag) = (r..m)
            .map(|i| (i, rows[i][col].norm()))
            .fold((r, -T::one()), |b, c| if c.1 > b.1 { c } else { b });
        if mag <= tol {
            continue;
        }
        rows.swap(r, p);
        let pivot = rows[r][col];
        for z in rows[r].iter_mut() {
            *z /= pivot;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                let f = row[col];
                if f.norm() != T::zero() {
                    for (z, &p) in row.iter_mut().zip(&pivot_row).take(n) {
                        *z -= f * p;
                    }
                }
            }
        }
        r += 1;
    }
    if r < m {
        return None;
    }
    Some(rows.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn check_system(a: &ComplexMatrix<f64>, sys: &EigenSystem<f64>) {
        assert!(sys.biorthonormality_error() < 1e-10);
        for k in 0..sys.dim() {
            let r = sys.right(k);
            let ar = a.matvec(&r);
            let res: f64 = ar
                .iter()
                .zip(&r)
                .map(|(x, y)| (*x - sys.eigenvalues[k] * *y).norm())
                .fold(0.0, f64::max);
            assert!(res < 1e-9 * a.frobenius_norm().max(1.0), "residual {res}");
        }
        assert!(sys.reconstruct().max_abs_diff(a) < 1e-9);
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let a = ComplexMatrix::<f64>::identity(2);
        let sys = eig_general(&a).unwrap();
        for l in &sys.eigenvalues {
            assert!((*l - re(1.0)).norm() < 1e-15);
        }
        check_system(&a, &sys);
    }

    #[test]
    fn diagonal_gives_canonical_vectors() {
        let a = ComplexMatrix::from_diagonal(&[re(2.0), cx(0.0, 3.0)]);
        let sys = eig_general(&a).unwrap();
        check_system(&a, &sys);
        for k in 0..2 {
            let v = sys.right(k);
            let idx = if (sys.eigenvalues[k] - re(2.0)).norm() < 1e-12 { 0 } else { 1 };
            assert!((v[idx] - re(1.0)).norm() < 1e-15);
            assert!(v[1 - idx].norm() < 1e-15);
        }
    }

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let sys = eig_general(&a).unwrap();
        check_system(&a, &sys);
        let mut ims: Vec<f64> = sys.eigenvalues.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-13 && (ims[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn non_normal_upper_triangular() {
        let a = ComplexMatrix::from_vec(
            3,
            3,
            vec![
                re(1.0), re(5.0), cx(0.0, 2.0),
                re(0.0), re(-2.0), re(3.0),
                re(0.0), re(0.0), cx(0.5, 0.5),
            ],
        )
        .unwrap();
        let sys = eig_general(&a).unwrap();
        check_system(&a, &sys);
    }

    #[test]
    fn dense_general_matrix() {
        let a = ComplexMatrix::from_fn(6, 6, |i, j| {
            let x = ((i * 7 + j * 3) % 11) as f64 - 5.0;
            let y = ((i * 5 + j * 2) % 7) as f64 - 3.0;
            cx(x / 3.0, y / 4.0)
        });
        let sys = eig_general(&a).unwrap();
        check_system(&a, &sys);
    }

    #[test]
    fn jordan_block_is_defective() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(eig_general(&a), Err(Error::DefectiveMatrix { .. })));
    }

    #[test]
    fn degenerate_block_diagonal_keeps_coordinate_basis() {
        // coherence block diag(c, c) embedded between population entries
        let c = 0.5;
        let a = ComplexMatrix::from_real(
            4,
            4,
            &[
                0.9, 0.0, 0.0, 0.2,
                0.0, c, 0.0, 0.0,
                0.0, 0.0, c, 0.0,
                0.1, 0.0, 0.0, 0.8,
            ],
        );
        let sys = eig_general(&a).unwrap();
        check_system(&a, &sys);
        let coh: Vec<usize> = (0..4).filter(|&k| (sys.eigenvalues[k] - re(c)).norm() < 1e-10).collect();
        assert_eq!(coh.len(), 2);
        for &k in &coh {
            let v = sys.right(k);
            assert!(v[0].norm() < 1e-12 && v[3].norm() < 1e-12);
            assert!((v[1].norm() - 1.0).abs() < 1e-12 || (v[2].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_path() {
        let a = ComplexMatrix::<f32>::from_real(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let sys = eig_general(&a).unwrap();
        assert!(sys.biorthonormality_error() < 1e-5);
        assert!(sys.reconstruct().max_abs_diff(&a) < 1e-5);
    }
}
