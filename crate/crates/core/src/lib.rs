//! Bracket structures, canonical maps, Hamiltonian flows, symplectic reduction
//! and vortex spectra for the oscillator / Coulomb / monopole family.
//!
//! Everything is generic over a [`Real`] scalar; the `*64` aliases fix it to
//! `f64`. The statistics parameter `σ` is kept exact as a [`Rational64`].

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
mod linalg;
pub mod model;
pub mod poisson;
pub mod reduction;
pub mod scalar;
pub mod spectra;
pub mod transforms;

pub use error::{Error, Result};
pub use model::{FlatC2State, Params, PhaseState, Signature, Space, ValidationReport, Violation};
pub use num_complex::Complex;
pub use num_rational::Rational64;
pub use scalar::Real;

pub type Complex64 = Complex<f64>;
pub type Params64 = Params<f64>;
pub type PhaseState64 = PhaseState<f64>;
pub type FlatC2State64 = FlatC2State<f64>;
pub type Trajectory64 = transforms::Trajectory<f64>;
pub type Observable64 = poisson::Observable<f64>;
pub type BracketStructure64 = poisson::BracketStructure<f64>;
pub type HamiltonianSystem64 = dynamics::HamiltonianSystem<f64>;
