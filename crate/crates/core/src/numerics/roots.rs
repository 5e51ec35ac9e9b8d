//! Newton iteration in the complex plane and argument-principle zero
//! counting on rectangles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, QuadratureConfig};
use super::NumericsError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootFindConfig {
    pub max_iterations: usize,
    pub residual_tolerance: f64,
    /// Newton steps must shrink below `step_tolerance * max(1, |z|)`.
    pub step_tolerance: f64,
    pub dedupe_radius: f64,
}

impl Default for RootFindConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            residual_tolerance: 1e-12,
            step_tolerance: 1e-14,
            dedupe_radius: 1e-8,
        }
    }
}

impl RootFindConfig {
    pub fn with_residual_tolerance(mut self, tol: f64) -> Self {
        self.residual_tolerance = tol;
        self
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.max_iterations == 0
            || !positive(self.residual_tolerance)
            || !positive(self.step_tolerance)
            || !positive(self.dedupe_radius)
        {
            return Err(NumericsError::InvalidConfig(
                "root-finding tolerances must be strictly positive and max_iterations >= 1".into(),
            ));
        }
        Ok(())
    }
}

// Below this the Newton step is meaningless.
const DERIVATIVE_GUARD: f64 = 1e-300;

/// Newton's method for an analytic `f` with derivative `df`.
///
/// Converged when the residual `|f(z)|` is below `residual_tolerance` and the
/// last step was below `step_tolerance * max(1, |z|)`.
pub fn newton_root<F, D>(
    f: F,
    df: D,
    seed: Complex64,
    cfg: &RootFindConfig,
) -> Result<Complex64, NumericsError>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    cfg.validate()?;
    if !(seed.re.is_finite() && seed.im.is_finite()) {
        return Err(NumericsError::NonFiniteSample { at: seed.re });
    }

    let mut z = seed;
    let mut fz = f(z);
    for _ in 0..cfg.max_iterations {
        let dfz = df(z);
        if !(dfz.norm() > DERIVATIVE_GUARD) {
            return Err(NumericsError::DerivativeVanished { at: z });
        }
        let step = fz / dfz;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Err(NumericsError::DerivativeVanished { at: z });
        }
        z -= step;
        fz = f(z);
        if fz.norm() < cfg.residual_tolerance
            && step.norm() <= cfg.step_tolerance * z.norm().max(1.0)
        {
            return Ok(z);
        }
    }
    Err(NumericsError::NonConvergence {
        iterations: cfg.max_iterations,
        residual: fz.norm(),
    })
}

/// Merges roots closer than `radius`, keeping the one with the smaller
/// residual. Input pairs are `(root, residual)`; output order follows the
/// first occurrence of each cluster.
pub fn dedupe_roots(roots: &[(Complex64, f64)], radius: f64) -> Vec<(Complex64, f64)> {
    let mut kept: Vec<(Complex64, f64)> = Vec::with_capacity(roots.len());
    for &(z, res) in roots {
        match kept.iter_mut().find(|(k, _)| (*k - z).norm() < radius) {
            Some(existing) => {
                if res < existing.1 {
                    *existing = (z, res);
                }
            }
            None => kept.push((z, res)),
        }
    }
    kept
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingCount {
    pub count: i64,
    /// `(1/2πi) ∮ f'/f dz` before rounding.
    pub raw: Complex64,
    pub rounding_distance: f64,
}

/// `|f|` below this on the contour is treated as a zero on the boundary.
pub const BOUNDARY_GUARD: f64 = 1e-12;

/// Largest accepted distance between the contour integral and an integer.
pub const WINDING_TOLERANCE: f64 = 0.1;

/// Counts the zeros of `f` inside `rect` with the argument principle.
///
/// Each edge of the rectangle is integrated with [`integrate`], so a
/// `max_panel_width` in `cfg` applies along the edges.
pub fn count_zeros<F, D>(
    f: F,
    df: D,
    rect: &Rectangle,
    cfg: &QuadratureConfig,
) -> Result<WindingCount, NumericsError>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    if !(rect.re_min < rect.re_max && rect.im_min < rect.im_max) {
        return Err(NumericsError::InvalidInterval {
            lo: rect.re_min,
            hi: rect.re_max,
        });
    }

    let log_derivative = |z: Complex64| -> Complex64 {
        let fz = f(z);
        if fz.norm() < BOUNDARY_GUARD {
            // NaN aborts the quadrature; the caller re-checks below.
            Complex64::new(f64::NAN, f64::NAN)
        } else {
            df(z) / fz
        }
    };

    let i = Complex64::i();
    let (x0, x1, y0, y1) = (rect.re_min, rect.re_max, rect.im_min, rect.im_max);
    type Edge<'a> = (f64, f64, Box<dyn Fn(f64) -> Complex64 + 'a>);
    let edges: [Edge; 4] = [
        // bottom, left to right
        (x0, x1, Box::new(|t| log_derivative(Complex64::new(t, y0)))),
        // right, upwards
        (y0, y1, Box::new(|t| log_derivative(Complex64::new(x1, t)) * i)),
        // top, right to left: integrate forwards and negate
        (x0, x1, Box::new(|t| -log_derivative(Complex64::new(t, y1)))),
        // left, downwards
        (y0, y1, Box::new(|t| -log_derivative(Complex64::new(x0, t)) * i)),
    ];

    let mut total = Complex64::new(0.0, 0.0);
    for (lo, hi, edge) in &edges {
        match integrate(edge, *lo, *hi, cfg) {
            Ok(r) => total += r.value,
            Err(NumericsError::NonFiniteSample { at }) => {
                return Err(NumericsError::BoundaryZero { at });
            }
            Err(e) => return Err(e),
        }
    }

    let raw = total / (2.0 * PI * i);
    let count = raw.re.round();
    let rounding_distance = (raw - Complex64::new(count, 0.0)).norm();
    if rounding_distance > WINDING_TOLERANCE {
        return Err(NumericsError::NonIntegerWinding {
            raw,
            distance: rounding_distance,
        });
    }
    Ok(WindingCount {
        count: count as i64,
        raw,
        rounding_distance,
    })
}
