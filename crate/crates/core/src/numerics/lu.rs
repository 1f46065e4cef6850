//! LU factorization with partial pivoting.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

pub struct Lu<T: Real> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &ComplexMatrix<T>) -> Result<Self> {
        a.require_square("LU input")?;
        let n = a.nrows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(T::min_positive_value());
        let tiny = T::epsilon() * scale * T::lit(n as f64);

        for k in 0..n {
            let (p, pivot_mag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag <= tiny {
                return Err(Error::SingularInput {
                    magnitude: pivot_mag.to_f64_lossy(),
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve_vec(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.lu.nrows();
        let mut x: Vec<Cx<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let cols: Vec<Vec<Cx<T>>> = (0..b.ncols()).map(|j| self.solve_vec(&b.column(j))).collect();
        ComplexMatrix::from_columns(&cols)
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        self.solve(&ComplexMatrix::identity(self.lu.nrows()))
    }

    pub fn determinant(&self) -> Cx<T> {
        let n = self.lu.nrows();
        let mut det = re(T::one());
        for i in 0..n {
            det *= self.lu[(i, i)];
        }
        let mut visited = vec![false; n];
        let mut sign_flip = false;
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign_flip = !sign_flip;
            }
        }
        if sign_flip {
            -det
        } else {
            det
        }
    }
}

pub fn inverse<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(Lu::factor(a)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn inverse_round_trip() {
        let a = ComplexMatrix::from_vec(
            3,
            3,
            vec![
                re(0.0), cx(1.0, 2.0), re(3.0),
                cx(-1.0, 0.5), re(4.0), cx(0.0, 1.0),
                re(2.0), re(1.0), cx(1.0, -1.0),
            ],
        )
        .unwrap();
        let inv = inverse(&a).unwrap();
        assert!(a.matmul(&inv).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-13);
    }

    #[test]
    fn singular_is_rejected() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(inverse(&a), Err(Error::SingularInput { .. })));
    }

    #[test]
    fn determinant_with_pivoting() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let det = Lu::factor(&a).unwrap().determinant();
        assert!((det - re(-1.0)).norm() < 1e-15);
    }
}
