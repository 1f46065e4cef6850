//! Single-qubit operators.
//!
//! Basis index 0 is the `σ_z = +1` eigenstate, which is the ground state of
//! `-2πν σ_z` for `ν > 0`.

use super::ComplexMatrix;
use crate::scalar::{cx, re, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn matrix<T: Real>(self) -> ComplexMatrix<T> {
        match self {
            Axis::X => sigma_x(),
            Axis::Y => sigma_y(),
            Axis::Z => sigma_z(),
        }
    }
}

pub fn sigma_x<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real(2, 2, &[T::zero(), T::one(), T::one(), T::zero()])
}

pub fn sigma_y<T: Real>() -> ComplexMatrix<T> {
    let (o, i) = (T::zero(), T::one());
    ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
        (0, 1) => cx(o, -i),
        (1, 0) => cx(o, i),
        _ => re(o),
    })
}

pub fn sigma_z<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real(2, 2, &[T::one(), T::zero(), T::zero(), -T::one()])
}

/// `|0⟩⟨1|`: takes the excited level of `-2πν σ_z` to the ground level.
pub fn lowering<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real(2, 2, &[T::zero(), T::one(), T::zero(), T::zero()])
}

/// `|1⟩⟨0|`.
pub fn raising<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real(2, 2, &[T::zero(), T::zero(), T::one(), T::zero()])
}

/// `-2πν σ_axis` in angular units (rad/ms for ν in kHz).
pub fn qubit_hamiltonian<T: Real>(nu_khz: T, axis: Axis) -> ComplexMatrix<T> {
    axis.matrix().scale_real(-T::TAU() * nu_khz)
}

/// `exp(-iθσ/2)`.
pub fn rotation<T: Real>(axis: Axis, theta: T) -> ComplexMatrix<T> {
    let half = theta * T::lit(0.5);
    let ident = ComplexMatrix::identity(2).scale_real(half.cos());
    let gen = axis.matrix::<T>().scale(cx(T::zero(), -half.sin()));
    &ident + &gen
}
