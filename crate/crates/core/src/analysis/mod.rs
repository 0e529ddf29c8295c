//! Numerical checks of the elliptic, resolvent, spectral-gap and semigroup
//! estimates.

pub mod elliptic;
pub mod fit;
pub mod gap;
pub mod resolvent;

pub use elliptic::{verify_elliptic_estimates, EllipticConstants, EllipticReport};
pub use fit::{fit_power_law, ScalingFit};
pub use gap::{check_accretivity, semigroup_bound_check, spectral_gap, AccretivityReport, SemigroupReport, SpectralGapResult};
pub use resolvent::{solve_resolvent, verify_resolvent_estimates, ResolventReport, ResolventSample};
