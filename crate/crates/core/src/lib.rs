//! Liouville-space simulation of Mpemba-accelerated qubit thermalization.
//!
//! The crate builds Lindbladian superoperators and their spectra, models a
//! heat-exchange protocol as a Kraus channel (a generalized amplitude damping
//! map), extracts its generator, constructs the free-energy-maximizing
//! unitary that removes the initial state's overlap with the slow coherence
//! modes, and runs a four-stroke quantum Otto refrigerator with and without
//! that unitary.
//!
//! All numerical code is generic over the scalar type through [`Real`]
//! (`f32` or `f64`). Double-precision aliases are exported at the crate root.
//!
//! Units: frequencies in kHz, times in ms, temperatures as `k_B T / h` in kHz.
//! Hamiltonian matrices are angular frequencies (`-2πν σ`, rad/ms); energies
//! reported by the thermodynamic functions are `Tr(Hρ)/2π`, i.e. in kHz.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod config_io;
mod error;
pub mod liouville;
pub mod mpemba;
pub mod numerics;
pub mod otto;
mod scalar;
pub mod thermo;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type ComplexMatrix64 = numerics::ComplexMatrix<f64>;
pub type ComplexMatrix32 = numerics::ComplexMatrix<f32>;
pub type EigenSystem64 = numerics::EigenSystem<f64>;
pub type DensityMatrix64 = liouville::DensityMatrix<f64>;
pub type DensityMatrix32 = liouville::DensityMatrix<f32>;
pub type SuperOperator64 = liouville::SuperOperator<f64>;
pub type SpectralDecomposition64 = liouville::SpectralDecomposition<f64>;
pub type KrausChannel64 = channels::KrausChannel<f64>;
pub type ThermalEnvironment64 = channels::ThermalEnvironment<f64>;
pub type RelaxationTrajectory64 = thermo::RelaxationTrajectory<f64>;
pub type MpembaTransform64 = mpemba::MpembaTransform<f64>;
pub type CycleConfig64 = otto::CycleConfig<f64>;
