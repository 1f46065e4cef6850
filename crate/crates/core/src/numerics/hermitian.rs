//! Cyclic Jacobi eigensolver for Hermitian matrices.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    /// Ascending.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, matched to `values`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Cx<T>> {
        self.vectors.column(k)
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let d: Vec<Cx<T>> = self.values.iter().map(|&x| re(f(x))).collect();
        self.vectors
            .matmul(&ComplexMatrix::from_diagonal(&d))
            .matmul(&self.vectors.adjoint())
    }
}

pub fn eigh<T: Real>(a: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    a.require_square("Hermitian eigensolver input")?;
    let n = a.nrows();
    let scale = a.frobenius_norm();
    if a.hermiticity_error() > T::tolerance(1e-9) * scale.max(T::one()) {
        return Err(Error::ShapeMismatch("matrix is not Hermitian".into()));
    }
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let target = T::epsilon() * scale.max(T::min_positive_value());
    let max_sweeps = 64;

    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations: max_sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let columns: Vec<Vec<Cx<T>>> = order.iter().map(|&i| fix_phase(v.column(i))).collect();
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix::from_columns(&columns),
    })
}

/// First component above round-off made real positive.
pub(crate) fn fix_phase<T: Real>(mut v: Vec<Cx<T>>) -> Vec<Cx<T>> {
    let tol = T::tolerance(1e-12);
    if let Some(first) = v.iter().copied().find(|z| z.norm() > tol) {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
    v
}

fn rotate<T: Real>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    let n = m.nrows();
    let phase = apq / mag; // e^{iφ}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
    let t = if theta == T::zero() { T::one() } else { t };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    // W acts on columns (p, q): W = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let ph_conj = phase.conj();
    for i in 0..n {
        let x = m[(i, p)];
        let y = m[(i, q)];
        m[(i, p)] = x * c - y * ph_conj * s;
        m[(i, q)] = x * s + y * ph_conj * c;
    }
    for j in 0..n {
        let x = m[(p, j)];
        let y = m[(q, j)];
        m[(p, j)] = x * c - y * phase * s;
        m[(q, j)] = x * s + y * phase * c;
    }
    m[(p, q)] = re(T::zero());
    m[(q, p)] = re(T::zero());
    for i in 0..n {
        let x = v[(i, p)];
        let y = v[(i, q)];
        v[(i, p)] = x * c - y * ph_conj * s;
        v[(i, q)] = x * s + y * ph_conj * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn pauli_y_spectrum() {
        let y = ComplexMatrix::from_vec(2, 2, vec![re(0.0f64), cx(0.0, -1.0), cx(0.0, 1.0), re(0.0)]).unwrap();
        let e = eigh(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        assert!(e.apply(|x| x).max_abs_diff(&y) < 1e-15);
    }

    #[test]
    fn complex_hermitian_3x3() {
        let a = ComplexMatrix::from_vec(
            3,
            3,
            vec![
                re(2.0), cx(1.0, -1.0), cx(0.0, 0.5),
                cx(1.0, 1.0), re(-1.0), re(0.3),
                cx(0.0, -0.5), re(0.3), re(0.7),
            ],
        )
        .unwrap();
        let e = eigh(&a).unwrap();
        assert!(e.apply(|x| x).max_abs_diff(&a) < 1e-13);
        let vv = e.vectors.adjoint().matmul(&e.vectors);
        assert!(vv.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(eigh(&a).is_err());
    }
}
