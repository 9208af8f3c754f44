//! Quantum kicked top: exact Floquet quasienergies, the second-order
//! effective Hamiltonian with its kick operator, density-of-states
//! diagnostics, and the classical map versus the integrable effective flow.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below are what applications normally use.

// `!(x <= tol)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod effective;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod scalar;
pub mod spectral;
pub mod spin;

pub use error::{Error, Result};
pub use scalar::Real;
pub use spin::Spin;

pub type SpinAlgebraF64 = spin::SpinAlgebra<f64>;
pub type SpinAlgebraF32 = spin::SpinAlgebra<f32>;
pub type CoherentStateF64 = spin::CoherentState<f64>;
pub type TopParamsF64 = floquet::TopParams<f64>;
pub type TopParamsF32 = floquet::TopParams<f32>;
pub type QuasiSpectrumF64 = floquet::QuasiSpectrum<f64>;
pub type EffectiveModelF64 = effective::EffectiveModel<f64>;
pub type DriveSpecF64 = effective::DriveSpec<f64>;
pub type DosCurveF64 = spectral::DosCurve<f64>;
pub type ClassicalStateF64 = classical::ClassicalState<f64>;
pub type CanonicalStateF64 = classical::CanonicalState<f64>;
pub type CMatrixF64 = linalg::CMatrix<f64>;
