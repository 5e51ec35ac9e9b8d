use std::f64::consts::PI;

use num_complex::Complex64;

use super::widths::{lorentzian_energy_integral, total_gamma_energy_route};
use super::{validate_grid, Axis, GoldenRuleError, PoleMeta, Spectrum};
use crate::deltashell::{matrix_element, ResonancePole, SystemParams};
use crate::numerics::{gauss_legendre, spherical_harmonic, NumericsError, QuadratureConfig};

/// Points in the default energy grid.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// `1 / ((E − E_R)² + (Γ_R/2)²)`.
pub fn lorentzian(e: f64, e_r: f64, gamma_r: f64) -> Result<f64, GoldenRuleError> {
    if !(gamma_r > 0.0) {
        return Err(GoldenRuleError::NonPositiveWidth { gamma_r });
    }
    let d = e - e_r;
    let h = 0.5 * gamma_r;
    Ok(1.0 / (d * d + h * h))
}

/// Trapezoid rule on a (possibly nonuniform) grid.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Midpoints of `points` equal cells covering `[lo, hi]`.
pub fn midpoint_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, GoldenRuleError> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) || points < 2 {
        return Err(GoldenRuleError::InvalidGrid(format!(
            "need lo < hi and at least 2 points, got [{lo}, {hi}] with {points}"
        )));
    }
    let h = (hi - lo) / points as f64;
    Ok((0..points).map(|i| lo + (i as f64 + 0.5) * h).collect())
}

/// [`DEFAULT_GRID_POINTS`] midpoints over `[max(0, E_R − 20Γ_R), E_R + 20Γ_R]`.
pub fn default_energy_grid(pole: &ResonancePole) -> Result<Vec<f64>, GoldenRuleError> {
    let lo = (pole.e_r - 20.0 * pole.gamma_r).max(0.0);
    midpoint_grid(lo, pole.e_r + 20.0 * pole.gamma_r, DEFAULT_GRID_POINTS)
}

/// Probability per unit momentum volume, `L(E_p) |⟨p⃗|V|p_res⟩|²` with
/// `⟨p⃗|V|p_res⟩ = √(1/(mp)) ⟨E|V|E_res⟩₀ Y₀⁰`.
pub fn differential_decay_d3p(
    p: f64,
    direction: (f64, f64),
    pole: &ResonancePole,
    params: &SystemParams,
) -> Result<f64, GoldenRuleError> {
    if !(p > 0.0) {
        return Err(GoldenRuleError::ZeroMomentum);
    }
    let e = p * p / (2.0 * params.mass);
    let y = spherical_harmonic(0, 0, direction.0, direction.1)?;
    let element = (1.0 / (params.mass * p)).sqrt() * matrix_element(p, pole, params)? * y;
    Ok(lorentzian(e, pole.e_r, pole.gamma_r)? * element.norm_sqr())
}

fn reduced_element(
    e: f64,
    l: u32,
    reduced_me: Option<Complex64>,
    pole: &ResonancePole,
    params: &SystemParams,
) -> Result<Complex64, GoldenRuleError> {
    match (reduced_me, l) {
        (Some(me), _) => Ok(me),
        (None, 0) => Ok(matrix_element((2.0 * params.mass * e).sqrt(), pole, params)?),
        (None, l) => Err(GoldenRuleError::MissingReducedElement { l }),
    }
}

fn check_lm(l: u32, m: i32) -> Result<(), GoldenRuleError> {
    if m.unsigned_abs() > l {
        return Err(GoldenRuleError::InvalidQuantumNumbers { l, m });
    }
    Ok(())
}

/// Counts per unit energy and solid angle,
/// `m√(2mE) L(E) (1/(mp)) |⟨E|V|E_res⟩_l|² |Y_l^m(θ, φ)|²`.
///
/// With `reduced_me = None` the s-wave delta-shell element is used; other
/// partial waves need an explicit element.
#[allow(clippy::too_many_arguments)]
pub fn spectrum_de_domega(
    e: f64,
    direction: (f64, f64),
    pole: &ResonancePole,
    params: &SystemParams,
    l: u32,
    m: i32,
    reduced_me: Option<Complex64>,
) -> Result<f64, GoldenRuleError> {
    check_lm(l, m)?;
    if !(e > 0.0) {
        return Err(GoldenRuleError::NonPositiveEnergy { energy: e });
    }
    let mass = params.mass;
    let p = (2.0 * mass * e).sqrt();
    let me = reduced_element(e, l, reduced_me, pole, params)?;
    let y = spherical_harmonic(l, m, direction.0, direction.1)?;
    Ok(mass * p * lorentzian(e, pole.e_r, pole.gamma_r)? / (mass * p)
        * me.norm_sqr()
        * y.norm_sqr())
}

pub(crate) fn check_energies(grid: &[f64]) -> Result<(), GoldenRuleError> {
    validate_grid(grid)?;
    if !(grid[0] > 0.0) {
        return Err(GoldenRuleError::NonPositiveEnergy { energy: grid[0] });
    }
    Ok(())
}

/// Decay energy spectrum `dΓ/dE` of the s-wave delta-shell pole. The solid
/// angle is integrated out, leaving `L(E) |⟨E|V|E_res⟩₀|²`.
pub fn spectrum_de(
    grid: &[f64],
    pole: &ResonancePole,
    params: &SystemParams,
) -> Result<Spectrum, GoldenRuleError> {
    check_energies(grid)?;
    let mass = params.mass;
    let values = grid
        .iter()
        .map(|&e| {
            let p = (2.0 * mass * e).sqrt();
            let me = matrix_element(p, pole, params)?;
            // ∫ |Y₀⁰|² dΩ = 1
            Ok(mass * p * lorentzian(e, pole.e_r, pole.gamma_r)? / (mass * p) * me.norm_sqr())
        })
        .collect::<Result<Vec<_>, GoldenRuleError>>()?;
    Spectrum::new(Axis::Energy, grid.to_vec(), values, vec![PoleMeta::from(pole)])
}

/// `dΓ/dE` for a caller-supplied, energy-independent reduced element.
pub fn spectrum_de_with(
    grid: &[f64],
    pole: &ResonancePole,
    reduced_me: Complex64,
) -> Result<Spectrum, GoldenRuleError> {
    check_energies(grid)?;
    let values = grid
        .iter()
        .map(|&e| Ok(lorentzian(e, pole.e_r, pole.gamma_r)? * reduced_me.norm_sqr()))
        .collect::<Result<Vec<_>, GoldenRuleError>>()?;
    Spectrum::new(Axis::Energy, grid.to_vec(), values, vec![PoleMeta::from(pole)])
}

/// `dN/d cos θ` or `dN/dφ`: [`spectrum_de_domega`] integrated over energy and
/// over the other angle.
#[allow(clippy::too_many_arguments)]
pub fn angular_spectrum(
    axis: Axis,
    grid: &[f64],
    pole: &ResonancePole,
    params: &SystemParams,
    l: u32,
    m: i32,
    reduced_me: Option<Complex64>,
    cfg: &QuadratureConfig,
) -> Result<Spectrum, GoldenRuleError> {
    check_lm(l, m)?;
    validate_grid(grid)?;
    let energy_part = match (reduced_me, l) {
        (None, 0) => total_gamma_energy_route(pole, params, cfg)?,
        (Some(me), _) => lorentzian_energy_integral(pole, params, cfg, |_| Ok(me.norm_sqr()))?,
        (None, l) => return Err(GoldenRuleError::MissingReducedElement { l }),
    };
    let harmonic_sq = |theta: f64, phi: f64| -> Result<f64, NumericsError> {
        Ok(spherical_harmonic(l, m, theta, phi)?.norm_sqr())
    };

    let values = match axis {
        Axis::CosTheta => {
            if grid[0] < -1.0 || grid[grid.len() - 1] > 1.0 {
                return Err(GoldenRuleError::InvalidGrid("cos θ must lie in [-1, 1]".into()));
            }
            // trapezoid in φ is exact for the trigonometric polynomial |Y|²
            let n_phi = 4 * (l as usize + 1);
            let dphi = 2.0 * PI / n_phi as f64;
            grid.iter()
                .map(|&x| {
                    let theta = x.acos();
                    let mut s = 0.0;
                    for j in 0..n_phi {
                        s += harmonic_sq(theta, j as f64 * dphi)?;
                    }
                    Ok(energy_part * s * dphi)
                })
                .collect::<Result<Vec<_>, GoldenRuleError>>()?
        }
        Axis::Phi => {
            if grid[0] < 0.0 || grid[grid.len() - 1] > 2.0 * PI {
                return Err(GoldenRuleError::InvalidGrid("φ must lie in [0, 2π]".into()));
            }
            // Gauss-Legendre in cos θ is exact for the degree-2l polynomial |Y|²
            let (xs, ws) = gauss_legendre(l as usize + 2);
            grid.iter()
                .map(|&phi| {
                    let mut s = 0.0;
                    for (x, w) in xs.iter().zip(&ws) {
                        s += w * harmonic_sq(x.acos(), phi)?;
                    }
                    Ok(energy_part * s)
                })
                .collect::<Result<Vec<_>, GoldenRuleError>>()?
        }
        other => {
            return Err(GoldenRuleError::InvalidSpectrum(format!(
                "angular spectrum needs cos_theta or phi, got {other}"
            )))
        }
    };
    Spectrum::new(axis, grid.to_vec(), values, vec![PoleMeta::from(pole)])
}

/// Divides by the trapezoid integral so the density integrates to one.
pub fn normalize(spec: &Spectrum) -> Result<Spectrum, GoldenRuleError> {
    spec.validate()?;
    if spec.normalized {
        return Ok(spec.clone());
    }
    let total = spec.integral();
    if !(total > 0.0 && total.is_finite()) {
        return Err(GoldenRuleError::ZeroTotal { total });
    }
    let mut out = spec.clone();
    for v in &mut out.values {
        *v /= total;
    }
    out.normalized = true;
    out.total = Some(out.integral());
    Ok(out)
}
