//! Complex root finding, zero counting, adaptive quadrature and the few
//! special functions the physics modules need.

mod quadrature;
mod roots;
mod special;

use num_complex::Complex64;
use thiserror::Error;

pub use quadrature::{
    gauss_legendre, integrate, integrate_semi_infinite, integrate_semi_infinite_by,
    integrate_with_breakpoints, peak_breakpoints, IntegralResult, QuadratureConfig, MAX_TAIL_WINDOWS,
};
pub(crate) use quadrature::integrate_breakpoints_by;
pub use roots::{
    count_zeros, dedupe_roots, newton_root, Rectangle, RootFindConfig, WindingCount,
    BOUNDARY_GUARD, WINDING_TOLERANCE,
};
pub use special::{riccati_bessel_j, spherical_harmonic};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("Newton iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("derivative vanished at {at}")]
    DerivativeVanished { at: Complex64 },
    #[error("function vanishes on the contour near t = {at}")]
    BoundaryZero { at: f64 },
    #[error("winding number {raw} is {distance:.3} away from an integer")]
    NonIntegerWinding { raw: Complex64, distance: f64 },
    #[error("subdivision limit reached after {subdivisions} bisections (error estimate {error_estimate:e})")]
    SubdivisionLimit {
        subdivisions: usize,
        error_estimate: f64,
    },
    #[error("integrand is not finite at x = {at}")]
    NonFiniteSample { at: f64 },
    #[error("tail integral did not converge within {windows} doubling windows")]
    TailNonConvergent { windows: usize },
    #[error("invalid quantum numbers l = {l}, m = {m}")]
    InvalidQuantumNumbers { l: u32, m: i32 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
