//! Dense complex linear-algebra kernels.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! many threads at once.

mod eig;
mod expm;
mod hermitian;
pub mod lu;
mod matrix;
pub mod pauli;

pub use eig::{eig_general, EigenSystem, MAX_CONDITION};
pub use expm::{expm, logm_principal};
pub use hermitian::{eigh, HermitianEigen};
pub(crate) use hermitian::fix_phase;
pub use matrix::ComplexMatrix;

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace<T: crate::Real>(start: T, end: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / T::lit((n - 1) as f64);
            let mut v: Vec<T> = (0..n).map(|i| start + step * T::lit(i as f64)).collect();
            v[n - 1] = end;
            v
        }
    }
}
