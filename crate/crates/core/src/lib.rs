//! Spectral toolkit for the linear and nonlinear stability of Taylor-Couette
//! flow with heat buoyancy on the annulus `[1, R] × S¹`.
//!
//! Each azimuthal Fourier mode is discretized in `r` on a Legendre-Gauss-Lobatto
//! grid. The crate assembles the per-mode linearized operators, checks elliptic,
//! resolvent, spectral-gap and space-time estimates numerically, runs the
//! truncated mode-coupled Boussinesq system, and drives parameter sweeps.

// Negated comparisons like `!(x > 0.0)` are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod azimuthal;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod operators;
pub mod random;
pub mod sim;

pub use error::{Error, Result};
pub use field::{ModeField, Rep};
pub use grid::{CMat, CVec, NormReport, RadialGrid};
pub use operators::{FlowParams, OperatorBundle};
