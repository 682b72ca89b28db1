//! Numerical building blocks shared by the physics modules.

pub mod bessel;
pub mod fourier;
pub mod ode;
pub mod quadrature;
pub mod roots;

pub use bessel::{bessel_j, bessel_j_prime, bessel_zero, BesselZeroKind};
pub use ode::{integrate_dense, OdeScalar, StepControl, StepStats};
pub use quadrature::GaussLegendre;
pub use roots::{bisect, golden_max, scan_brackets};
