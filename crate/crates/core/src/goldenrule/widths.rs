use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectra::lorentzian;
use super::{DecayConstants, GoldenRuleError};
use crate::deltashell::{gamow_momentum, matrix_element, ResonancePole, SystemParams};
use crate::numerics::{
    gauss_legendre, integrate_breakpoints_by, integrate_semi_infinite_by, peak_breakpoints,
    spherical_harmonic, QuadratureConfig,
};

fn nan() -> Complex64 {
    Complex64::new(f64::NAN, 0.0)
}

/// `∫₀^∞ L(E) w(E) dE` for a nonnegative weight `w`, in units of `E₀`.
///
/// The range is split at `E_R ± {1, 10, 100, 1000} Γ_R` and continued by a
/// semi-infinite tail. Panels are kept narrower than a quarter period of
/// `sin²(pa/ħ)` at their left end.
pub(crate) fn lorentzian_energy_integral<W>(
    pole: &ResonancePole,
    params: &SystemParams,
    cfg: &QuadratureConfig,
    weight: W,
) -> Result<f64, GoldenRuleError>
where
    W: Fn(f64) -> Result<f64, GoldenRuleError>,
{
    let e0 = params.energy_scale();
    let (eps_r, width) = (pole.e_r / e0, pole.gamma_r / e0);
    lorentzian(pole.e_r, pole.e_r, pole.gamma_r)?;
    let integrand = |eps: f64| {
        let e = e0 * eps;
        match (lorentzian(e, pole.e_r, pole.gamma_r), weight(e)) {
            (Ok(l), Ok(w)) => Complex64::new(e0 * l * w, 0.0),
            _ => nan(),
        }
    };
    // ε = k², so a step of π/2 in k is π k in ε
    let guard = |start: f64| Some(PI * start.sqrt().max(0.5));
    let points = peak_breakpoints(0.0, eps_r, width, &[1.0, 10.0, 100.0, 1000.0]);
    let head = integrate_breakpoints_by(&integrand, &points, cfg, guard)?;
    let last = points[points.len() - 1];
    let tail = integrate_semi_infinite_by(&integrand, last, cfg, 2.0, guard)?;
    Ok(head.value.re + tail.value.re)
}

/// `Γ = ∫₀^∞ L(E) |⟨E|V|E_res⟩₀|² dE`.
pub fn total_gamma_energy_route(
    pole: &ResonancePole,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<f64, GoldenRuleError> {
    let mass = params.mass;
    lorentzian_energy_integral(pole, params, cfg, |e| {
        Ok(matrix_element((2.0 * mass * e).sqrt(), pole, params)?.norm_sqr())
    })
}

/// `Γ = ∫₀^∞ |û₀(p)|² dp`.
pub fn total_gamma_momentum_route(
    pole: &ResonancePole,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<f64, GoldenRuleError> {
    let scale = params.momentum_scale();
    let integrand =
        |kappa: f64| Complex64::new(scale * gamow_momentum(scale * kappa, pole, params).norm_sqr(), 0.0);
    let guarded = cfg.with_panel_width(0.5 * PI);
    let guard = |_| guarded.max_panel_width;
    let points = peak_breakpoints(0.0, pole.k.re, pole.k.im, &[1.0, 10.0, 100.0]);
    let head = integrate_breakpoints_by(&integrand, &points, &guarded, guard)?;
    let last = points[points.len() - 1];
    let tail = integrate_semi_infinite_by(&integrand, last, &guarded, 4.0, guard)?;
    Ok(head.value.re + tail.value.re)
}

/// `Γ_R` from the pole, `Γ` from the momentum route and `Γ̄ = Γ_R Γ`.
pub fn decay_constants(
    pole: &ResonancePole,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<DecayConstants, GoldenRuleError> {
    let gamma = total_gamma_momentum_route(pole, params, cfg)?;
    Ok(DecayConstants::new(pole.gamma_r, gamma))
}

/// Long-lived limit `Γ̄_Fermi = 2π |⟨E_R|V|E_res⟩₀|²`, obtained by replacing
/// the Lorentzian with `(2π/Γ_R) δ(E − E_R)`.
pub fn fermi_total_width(
    pole: &ResonancePole,
    params: &SystemParams,
) -> Result<f64, GoldenRuleError> {
    if !(pole.e_r > 0.0) {
        return Err(GoldenRuleError::NonPositiveEnergy { energy: pole.e_r });
    }
    let p = (2.0 * params.mass * pole.e_r).sqrt();
    Ok(2.0 * PI * matrix_element(p, pole, params)?.norm_sqr())
}

/// Cubic box of side `L` used to discretise the continuum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxConfig {
    side_length: f64,
}

impl BoxConfig {
    pub fn new(side_length: f64) -> Result<Self, GoldenRuleError> {
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(GoldenRuleError::InvalidBox(side_length));
        }
        Ok(Self { side_length })
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }
}

/// `ρ(E) = (L³/(2πħ)³) m √(2mE) dΩ`.
pub fn box_density_of_states(
    e: f64,
    box_cfg: &BoxConfig,
    d_omega: f64,
    params: &SystemParams,
) -> Result<f64, GoldenRuleError> {
    if !(e > 0.0) {
        return Err(GoldenRuleError::NonPositiveEnergy { energy: e });
    }
    if !(d_omega > 0.0 && d_omega <= 4.0 * PI) {
        return Err(GoldenRuleError::InvalidSolidAngle(d_omega));
    }
    let l = box_cfg.side_length;
    let h = 2.0 * PI * params.hbar;
    Ok((l / h).powi(3) * params.mass * (2.0 * params.mass * e).sqrt() * d_omega)
}

/// `dΓ̄/dE = 2π ρ(E) |⟨p⃗|V|p_res⟩_box|²` over the full sphere, with the box
/// element `(2πħ/L)^{3/2}` times the delta-normalised one. `L` cancels.
pub fn fermi_golden_rule_box(
    e: f64,
    pole: &ResonancePole,
    box_cfg: &BoxConfig,
    params: &SystemParams,
) -> Result<f64, GoldenRuleError> {
    let rho = box_density_of_states(e, box_cfg, 4.0 * PI, params)?;
    let p = (2.0 * params.mass * e).sqrt();
    let y = spherical_harmonic(0, 0, 0.0, 0.0)?;
    let delta_element = (1.0 / (params.mass * p)).sqrt() * matrix_element(p, pole, params)? * y;
    let conversion = (2.0 * PI * params.hbar / box_cfg.side_length).powf(1.5);
    let box_element = conversion * delta_element;
    Ok(2.0 * PI * rho * box_element.norm_sqr())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisEquivalence {
    /// `∫ dE m√(2mE) L(E) ∫ dΩ |⟨p⃗|V|p_res⟩|²`.
    pub gamma_momentum_basis: f64,
    /// `∫ dE L(E) |⟨E|V|E_res⟩₀|²`.
    pub gamma_partial_wave: f64,
    pub relative_gap: f64,
    /// Quadrature value of `∫ |Y₀⁰|² dΩ`.
    pub angular_integral: f64,
}

/// Γ from the three-dimensional momentum basis, with the solid angle done on
/// a Gauss-Legendre × trapezoid grid, against the s-wave energy route.
pub fn basis_equivalence_check(
    pole: &ResonancePole,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<BasisEquivalence, GoldenRuleError> {
    let (xs, ws) = gauss_legendre(6);
    let n_phi = 8;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(xs.len() * n_phi);
    for (x, w) in xs.iter().zip(&ws) {
        for j in 0..n_phi {
            let y = spherical_harmonic(0, 0, x.acos(), j as f64 * dphi)?;
            nodes.push((w * dphi, y));
        }
    }
    let angular_integral: f64 = nodes.iter().map(|(w, y)| w * y.norm_sqr()).sum();

    let mass = params.mass;
    let gamma_momentum_basis = lorentzian_energy_integral(pole, params, cfg, |e| {
        let p = (2.0 * mass * e).sqrt();
        let reduced = (1.0 / (mass * p)).sqrt() * matrix_element(p, pole, params)?;
        let solid: f64 = nodes.iter().map(|(w, y)| w * (reduced * y).norm_sqr()).sum();
        Ok(mass * p * solid)
    })?;
    let gamma_partial_wave = total_gamma_energy_route(pole, params, cfg)?;
    Ok(BasisEquivalence {
        gamma_momentum_basis,
        gamma_partial_wave,
        relative_gap: (gamma_momentum_basis - gamma_partial_wave).abs() / gamma_partial_wave,
        angular_integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deltashell::find_resonances;
    use crate::numerics::RootFindConfig;

    fn pole_with(params: SystemParams, n: usize) -> ResonancePole {
        find_resonances(&params, n, &RootFindConfig::default()).unwrap()[n - 1]
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn routes_agree_for_first_poles() {
        let cfg = QuadratureConfig::default();
        for (lambda, want) in [(3.0, 0.6442), (10.0, 1.55271), (100.0, 1.99240)] {
            let params = SystemParams::natural(lambda);
            let pole = pole_with(params, 1);
            let e = total_gamma_energy_route(&pole, &params, &cfg).unwrap();
            let m = total_gamma_momentum_route(&pole, &params, &cfg).unwrap();
            assert!(rel(e, m) < 1e-6, "lambda={lambda}: {e} vs {m}");
            assert!(rel(m, want) < 1e-4, "lambda={lambda}: {m} vs {want}");
        }
    }

    #[test]
    fn gamma_is_dimensionless() {
        let cfg = QuadratureConfig::default();
        let base = SystemParams::natural(10.0);
        let wide = SystemParams::new(1.0, 1.0, 2.0, 10.0).unwrap();
        let odd = SystemParams::new(3.0, 0.4, 0.7, 10.0).unwrap();
        let g0 = total_gamma_momentum_route(&pole_with(base, 1), &base, &cfg).unwrap();
        for p in [wide, odd] {
            let g = total_gamma_momentum_route(&pole_with(p, 1), &p, &cfg).unwrap();
            assert!(rel(g, g0) < 1e-8);
            let ge = total_gamma_energy_route(&pole_with(p, 1), &p, &cfg).unwrap();
            assert!(rel(ge, g0) < 1e-6);
        }
    }

    #[test]
    fn absolute_square_norm_is_not_one_for_broad_pole() {
        let params = SystemParams::natural(3.0);
        let g = total_gamma_momentum_route(&pole_with(params, 1), &params, &QuadratureConfig::default())
            .unwrap();
        assert!((g - 1.0).abs() > 0.1);
    }

    #[test]
    fn decay_constants_are_stable_under_tighter_tolerance() {
        let params = SystemParams::natural(10.0);
        let pole = pole_with(params, 1);
        let cfg = QuadratureConfig::default();
        let a = decay_constants(&pole, &params, &cfg).unwrap();
        let b = decay_constants(&pole, &params, &cfg.with_relative_tolerance(0.5e-9)).unwrap();
        assert!(rel(a.gamma, b.gamma) < 1e-6);
        assert_eq!(a.gamma_bar, a.gamma_r * a.gamma);
        assert!(a.gamma_r > 0.0 && a.gamma > 0.0 && a.gamma_bar > 0.0);
    }

    #[test]
    fn fermi_width_is_positive_and_closer_for_higher_pole() {
        let params = SystemParams::natural(3.0);
        let poles = find_resonances(&params, 2, &RootFindConfig::default()).unwrap();
        let cfg = QuadratureConfig::default();
        let gap = |p: &ResonancePole| {
            let exact = decay_constants(p, &params, &cfg).unwrap().gamma_bar;
            let fermi = fermi_total_width(p, &params).unwrap();
            assert!(fermi > 0.0);
            (exact - fermi).abs() / exact
        };
        assert!(gap(&poles[1]) < gap(&poles[0]));
    }

    #[test]
    fn density_of_states_scalings() {
        let params = SystemParams::natural(1.0);
        let b = BoxConfig::new(1.0).unwrap();
        let b2 = BoxConfig::new(2.0).unwrap();
        let r = box_density_of_states(1.3, &b, 4.0 * PI, &params).unwrap();
        let r4 = box_density_of_states(4.0 * 1.3, &b, 4.0 * PI, &params).unwrap();
        assert!(rel(r4 / r, 2.0) < 1e-15);
        let rl = box_density_of_states(1.3, &b2, 4.0 * PI, &params).unwrap();
        assert!(rel(rl / r, 8.0) < 1e-15);

        // E = ħ²/(2ma²), L = a, dΩ = 4π gives m a² / (2π² ħ²)
        let p = SystemParams::new(1.7, 0.9, 1.3, 1.0).unwrap();
        let box_a = BoxConfig::new(p.radius_a).unwrap();
        let got = box_density_of_states(p.energy_scale(), &box_a, 4.0 * PI, &p).unwrap();
        let want = p.mass * p.radius_a.powi(2) / (2.0 * PI * PI * p.hbar * p.hbar);
        assert!(rel(got, want) < 1e-14);

        assert!(box_density_of_states(0.0, &b, 1.0, &params).is_err());
        assert!(box_density_of_states(1.0, &b, 0.0, &params).is_err());
        assert!(box_density_of_states(1.0, &b, 13.0, &params).is_err());
        assert!(BoxConfig::new(0.0).is_err());
    }

    #[test]
    fn box_rule_is_size_independent() {
        let params = SystemParams::new(1.3, 0.8, 1.7, 10.0).unwrap();
        let pole = pole_with(params, 1);
        for e in [0.3 * pole.e_r, pole.e_r, 2.5 * pole.e_r] {
            let values: Vec<f64> = [1.0, 2.0, 10.0]
                .iter()
                .map(|s| {
                    let b = BoxConfig::new(s * params.radius_a).unwrap();
                    fermi_golden_rule_box(e, &pole, &b, &params).unwrap()
                })
                .collect();
            for v in &values[1..] {
                assert!(rel(*v, values[0]) < 1e-14);
            }
            let p = (2.0 * params.mass * e).sqrt();
            let delta = 2.0 * PI * matrix_element(p, &pole, &params).unwrap().norm_sqr();
            assert!(rel(values[0], delta) < 1e-13);
        }
        let b = BoxConfig::new(1.0).unwrap();
        let at_peak = fermi_golden_rule_box(pole.e_r, &pole, &b, &params).unwrap();
        assert!(rel(at_peak, fermi_total_width(&pole, &params).unwrap()) < 1e-13);
    }

    #[test]
    fn basis_equivalence() {
        let params = SystemParams::natural(10.0);
        let pole = pole_with(params, 1);
        let r = basis_equivalence_check(&pole, &params, &QuadratureConfig::default()).unwrap();
        assert!(r.relative_gap < 1e-6);
        assert!((r.angular_integral - 1.0).abs() < 1e-14);
        let tight = basis_equivalence_check(
            &pole,
            &params,
            &QuadratureConfig::default().with_relative_tolerance(1e-11),
        )
        .unwrap();
        assert!(tight.relative_gap < 1e-6);
    }
}
