//! Gamow resonances of the delta-shell potential and their decay
//! distributions.
//!
//! The crate is layered bottom-up:
//!
//! * [`numerics`]: complex Newton iteration, argument-principle zero
//!   counting, adaptive Gauss-Kronrod quadrature, Riccati-Bessel functions and
//!   spherical harmonics.
//! * [`deltashell`]: the s-wave resonance condition of a delta-shell
//!   potential, its poles in the complex momentum plane, and the Gamow
//!   eigenfunction in position and momentum space.
//! * [`goldenrule`]: differential and total decay constants from the
//!   Lorentzian-times-matrix-element rule, the Fermi long-lived limit, box
//!   normalisation and two-resonance interference.
//! * [`io`]: CSV and JSON serialisation of spectra, poles and run manifests.
//!
//! Internally everything is evaluated in the dimensionless momentum
//! `k = p a / ħ`; [`SystemParams`] converts at the public boundary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deltashell;
pub mod goldenrule;
pub mod io;
pub mod numerics;

pub use deltashell::{DeltaShellError, ResonancePole, SystemParams};
pub use goldenrule::{Axis, DecayConstants, GoldenRuleError, Spectrum, Superposition};
pub use numerics::{NumericsError, QuadratureConfig, RootFindConfig};

pub use num_complex::Complex64;
