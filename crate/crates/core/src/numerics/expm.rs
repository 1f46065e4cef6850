//! Matrix exponential and principal logarithm.

use super::{eig_general, lu::Lu, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Degree of the diagonal Padé approximant.
const PADE_DEGREE: usize = 8;

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant; the scaled matrix has infinity norm at most 1/2.
pub fn expm<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    a.require_square("matrix exponential input")?;
    let n = a.nrows();
    let norm = a.inf_norm();
    let half = T::lit(0.5);
    let mut squarings = 0i32;
    if norm > half {
        squarings = (norm / half).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scaled = a.scale_real(T::lit(2f64.powi(-squarings)));

    let q = PADE_DEGREE;
    let mut c = T::lit(0.5);
    let mut x = scaled.clone();
    let ident = ComplexMatrix::identity(n);
    let mut num = &ident + &scaled.scale_real(c);
    let mut den = &ident - &scaled.scale_real(c);
    for k in 2..=q {
        c = c * T::lit((q - k + 1) as f64) / T::lit((k * (2 * q - k + 1)) as f64);
        x = scaled.matmul(&x);
        let term = x.scale_real(c);
        num = &num + &term;
        den = if k % 2 == 0 { &den + &term } else { &den - &term };
    }
    let mut f = Lu::factor(&den)?.solve(&num);
    for _ in 0..squarings {
        f = f.matmul(&f);
    }
    Ok(f)
}

/// Principal logarithm `V diag(Log λ) V⁻¹` of a diagonalizable matrix.
pub fn logm_principal<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    a.require_square("matrix logarithm input")?;
    let sys = eig_general(a)?;
    let singular = T::lit(1e-12);
    let axis_tol = T::tolerance(1e-10);
    for lam in &sys.eigenvalues {
        let mag = lam.norm();
        if mag < singular {
            return Err(Error::SingularInput {
                magnitude: mag.to_f64_lossy(),
            });
        }
        if lam.re < T::zero() && lam.im.abs() <= axis_tol * mag {
            return Err(Error::BranchCut {
                re: lam.re.to_f64_lossy(),
                im: lam.im.to_f64_lossy(),
            });
        }
    }
    Ok(sys.apply(|z: Cx<T>| z.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, re};

    #[test]
    fn exp_of_zero_is_identity() {
        let z = ComplexMatrix::<f64>::zeros(3, 3);
        assert_eq!(expm(&z).unwrap().max_abs_diff(&ComplexMatrix::identity(3)), 0.0);
    }

    #[test]
    fn exp_of_log_diagonal() {
        let a = ComplexMatrix::from_diagonal(&[re(2f64.ln()), re(3f64.ln())]);
        let e = expm(&a).unwrap();
        let want = ComplexMatrix::from_diagonal(&[re(2.0), re(3.0)]);
        assert!(e.max_abs_diff(&want) / want.frobenius_norm() < 1e-14);
    }

    #[test]
    fn pauli_rotation_closed_form() {
        // exp(-iπ/2 σx) = cos(π/2) I - i sin(π/2) σx = -i σx
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![re(0.0), cx(0.0, -std::f64::consts::FRAC_PI_2), cx(0.0, -std::f64::consts::FRAC_PI_2), re(0.0)],
        )
        .unwrap();
        let want = ComplexMatrix::from_vec(2, 2, vec![re(0.0), cx(0.0, -1.0), cx(0.0, -1.0), re(0.0)]).unwrap();
        assert!(expm(&a).unwrap().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn large_norm_uses_squaring() {
        let a = ComplexMatrix::from_diagonal(&[re(-30.0), cx(5.0, 40.0)]);
        let e = expm(&a).unwrap();
        let want = ComplexMatrix::from_diagonal(&[re((-30f64).exp()), cx(5.0, 40.0).exp()]);
        assert!(e.max_abs_diff(&want) / want.frobenius_norm() < 1e-12);
    }

    #[test]
    fn log_of_identity_and_diagonal() {
        let l = logm_principal(&ComplexMatrix::<f64>::identity(2)).unwrap();
        assert!(l.max_abs() < 1e-15);
        let e = std::f64::consts::E;
        let l = logm_principal(&ComplexMatrix::from_diagonal(&[re(e), re(e * e)])).unwrap();
        let want = ComplexMatrix::from_diagonal(&[re(1.0), re(2.0)]);
        assert!(l.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn log_errors() {
        let sing = ComplexMatrix::from_diagonal(&[re(1.0), re(1e-14)]);
        assert!(matches!(logm_principal(&sing), Err(Error::SingularInput { .. })));
        let neg = ComplexMatrix::from_diagonal(&[re(1.0), re(-0.5)]);
        assert!(matches!(logm_principal(&neg), Err(Error::BranchCut { .. })));
    }
}
