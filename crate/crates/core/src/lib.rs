//! Entanglement dynamics of two superconducting qubits coupled to a
//! semi-infinite transmission line.
//!
//! The crate derives the mirror-modified relaxation rates and exchange
//! coupling from the qubit wavelength, integrates the two-qubit Lindblad
//! master equation (full density matrix or the closed X-shape subspace),
//! evaluates concurrence, detects entanglement sudden death and revival, and
//! simulates the preparation of the pseudo-Werner state. A small coplanar
//! waveguide calculator ties qubit frequencies to wavelength ratios.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod cpwcalc;
pub mod dynamics;
pub mod entangle;
pub mod error;
pub mod model;
pub mod ode;
pub mod qcore;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix = qcore::ComplexMatrix<f64>;
pub type ComplexMatrix32 = qcore::ComplexMatrix<f32>;
pub type DensityMatrix = qcore::DensityMatrix<f64>;
pub type DensityMatrix32 = qcore::DensityMatrix<f32>;
pub type WaveguideParams = model::WaveguideParams<f64>;
pub type DerivedRates = model::DerivedRates<f64>;
pub type Superoperator = model::Superoperator<f64>;
pub type XState = dynamics::XState<f64>;
pub type XState32 = dynamics::XState<f32>;
pub type CpwGeometry = cpwcalc::CpwGeometry<f64>;
pub type CpwDerived = cpwcalc::CpwDerived<f64>;
