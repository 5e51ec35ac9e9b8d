//! The delta-shell potential `V(r) = (ħ²/2ma) λ δ(r − a)`: its s-wave
//! resonance poles, the Gamow eigenfunction in position and momentum space,
//! its normalisation, and the reduced interaction matrix element.
//!
//! Root finding and wave evaluation use the dimensionless momentum
//! `k = p a / ħ`, in which the resonance condition depends on `λ` alone.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    count_zeros, dedupe_roots, integrate_breakpoints_by, integrate_semi_infinite, newton_root,
    peak_breakpoints, NumericsError, QuadratureConfig, Rectangle, RootFindConfig, WindingCount,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeltaShellError {
    #[error("momentum must be nonzero")]
    ZeroMomentum,
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),
    #[error("the pole search only covers a repulsive shell (lambda > 0), got lambda = {lambda}")]
    NonRepulsive { lambda: f64 },
    #[error("n_max must be at least 1")]
    EmptySearch,
    #[error("seed for n = {n} did not converge: {reason}")]
    SeedNonConvergence { n: usize, reason: String },
    #[error("argument principle counts {counted} zeros but {found} poles were found")]
    CompletenessMismatch { counted: i64, found: usize },
    #[error("normalisation constant is degenerate (zero argument under the square root)")]
    BranchDegenerate,
    #[error("numeric continuation needs Im(q) > 0, got q = {q}")]
    WrongHalfPlane { q: Complex64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Physical inputs. `lambda` is the dimensionless shell strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub mass: f64,
    pub hbar: f64,
    pub radius_a: f64,
    pub lambda: f64,
}

impl SystemParams {
    pub fn new(mass: f64, hbar: f64, radius_a: f64, lambda: f64) -> Result<Self, DeltaShellError> {
        let p = Self {
            mass,
            hbar,
            radius_a,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    /// Units with `m = ħ = a = 1`, so `E₀ = 1/2`.
    pub fn natural(lambda: f64) -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
            radius_a: 1.0,
            lambda,
        }
    }

    pub fn validate(&self) -> Result<(), DeltaShellError> {
        for (name, v) in [
            ("mass", self.mass),
            ("hbar", self.hbar),
            ("radius_a", self.radius_a),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DeltaShellError::InvalidParams(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        if !self.lambda.is_finite() {
            return Err(DeltaShellError::InvalidParams("lambda must be finite".into()));
        }
        Ok(())
    }

    /// `E₀ = ħ² / (2 m a²)`; energies are `E = E₀ k²`.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass * self.radius_a * self.radius_a)
    }

    /// `ħ / a`; momenta are `p = (ħ/a) k`.
    pub fn momentum_scale(&self) -> f64 {
        self.hbar / self.radius_a
    }
}

/// One s-wave resonance pole, `E_res = E_R − iΓ_R/2 = p_res² / 2m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonancePole {
    #[serde(with = "crate::io::complex_serde")]
    pub k: Complex64,
    #[serde(with = "crate::io::complex_serde")]
    pub p_res: Complex64,
    #[serde(with = "crate::io::complex_serde")]
    pub e_res: Complex64,
    pub e_r: f64,
    pub gamma_r: f64,
    #[serde(with = "crate::io::complex_serde")]
    pub n_res: Complex64,
    pub residual: f64,
    pub index_n: usize,
}

impl ResonancePole {
    /// Builds the pole record from a root `k` of the resonance condition.
    /// Only resonance-quadrant roots (`Re k > 0`, `Im k < 0`) are accepted.
    pub fn from_root(
        k: Complex64,
        index_n: usize,
        params: &SystemParams,
    ) -> Result<Self, DeltaShellError> {
        params.validate()?;
        if !(k.re > 0.0 && k.im < -QUADRANT_MARGIN) {
            return Err(DeltaShellError::SeedNonConvergence {
                n: index_n,
                reason: format!("root {k} is outside the resonance quadrant"),
            });
        }
        let residual = resonance_condition(k, params.lambda)?.norm();
        let p_res = k * params.momentum_scale();
        let e_res = p_res * p_res / (2.0 * params.mass);
        Ok(Self {
            k,
            p_res,
            e_res,
            e_r: e_res.re,
            gamma_r: -2.0 * e_res.im,
            n_res: normalization_constant(k, params)?,
            residual,
            index_n,
        })
    }
}

/// A sampled radial function: `u₀(r)` against `r`, or `û₀(p)` against `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialWaveSample {
    pub argument: f64,
    pub value: Complex64,
}

// Roots with Im k above −QUADRANT_MARGIN are not treated as resonances.
const QUADRANT_MARGIN: f64 = 1e-12;

/// `1 + (λ/k) e^{ik} sin k`, whose zeros are the s-wave poles.
pub fn resonance_condition(k: Complex64, lambda: f64) -> Result<Complex64, DeltaShellError> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(DeltaShellError::ZeroMomentum);
    }
    let ik = Complex64::i() * k;
    Ok(1.0 + Complex64::new(lambda, 0.0) / k * ik.exp() * k.sin())
}

/// Analytic `d/dk` of [`resonance_condition`].
pub fn resonance_condition_derivative(
    k: Complex64,
    lambda: f64,
) -> Result<Complex64, DeltaShellError> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(DeltaShellError::ZeroMomentum);
    }
    let (s, c) = (k.sin(), k.cos());
    let ik = Complex64::i() * k;
    Ok(lambda * ik.exp() * ((Complex64::i() * s + c) / k - s / (k * k)))
}

/// The condition rewritten as `e^{2ik} = 1 − 2ik/λ` has one solution per
/// branch of the logarithm; this map is a contraction onto the `n`-th one.
fn branch_map(k: Complex64, n: usize, lambda: f64) -> Complex64 {
    let i = Complex64::i();
    n as f64 * PI - 0.5 * i * (1.0 - 2.0 * i * k / lambda).ln()
}

/// Initial guess `nπ (1 − 1/(1+λ)) − 0.1i`, pulled onto the `n`-th branch.
pub fn pole_seed(n: usize, lambda: f64) -> Complex64 {
    let mut k = Complex64::new(n as f64 * PI * (1.0 - 1.0 / (1.0 + lambda)), -0.1);
    for _ in 0..200 {
        let next = branch_map(k, n, lambda);
        let done = (next - k).norm() < 1e-10 * next.norm();
        k = next;
        if done {
            break;
        }
    }
    k
}

/// Rectangle used to certify a search up to `n_max`: `Re k ∈ (π/2,
/// (n_max + 1/2)π)`, from a floor below every pole up to `Im k = 1/2`. The
/// closed upper half plane holds no zeros for `λ > 0`, so the top edge can
/// stay clear of poles that sit just below the real axis.
pub fn search_rectangle(lambda: f64, n_max: usize, poles: &[ResonancePole]) -> Rectangle {
    let mut floor = -(1.0 + 4.0 * PI * n_max as f64 / lambda);
    // Deeper than this the edge values overflow long before they matter.
    floor = floor.max(-100.0);
    if let Some(lowest) = poles.iter().map(|p| p.k.im).min_by(|a, b| a.total_cmp(b)) {
        floor = floor.min(1.5 * lowest - 0.5);
    }
    Rectangle::new(0.5 * PI, (n_max as f64 + 0.5) * PI, floor, 0.5)
}

fn contour_config() -> QuadratureConfig {
    QuadratureConfig {
        relative_tolerance: 1e-8,
        absolute_tolerance: 1e-10,
        max_subdivisions: 20_000,
        max_panel_width: Some(0.5 * PI),
    }
}

/// Argument-principle count of the resonance condition's zeros in `rect`.
pub fn count_condition_zeros(
    lambda: f64,
    rect: &Rectangle,
    cfg: &QuadratureConfig,
) -> Result<WindingCount, DeltaShellError> {
    let f = |k: Complex64| resonance_condition(k, lambda).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let df = |k: Complex64| {
        resonance_condition_derivative(k, lambda).unwrap_or(Complex64::new(f64::NAN, 0.0))
    };
    Ok(count_zeros(f, df, rect, cfg)?)
}

/// Poles for `n = 1..=n_max`, sorted by `Re k`, with the search certified
/// complete by the argument principle over [`search_rectangle`].
pub fn find_resonances(
    params: &SystemParams,
    n_max: usize,
    cfg: &RootFindConfig,
) -> Result<Vec<ResonancePole>, DeltaShellError> {
    params.validate()?;
    let lambda = params.lambda;
    if !(lambda > 0.0) {
        return Err(DeltaShellError::NonRepulsive { lambda });
    }
    if n_max == 0 {
        return Err(DeltaShellError::EmptySearch);
    }

    let f = |k: Complex64| resonance_condition(k, lambda).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let df = |k: Complex64| {
        resonance_condition_derivative(k, lambda).unwrap_or(Complex64::new(f64::NAN, 0.0))
    };

    let mut found = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let seed = pole_seed(n, lambda);
        let k = newton_root(f, df, seed, cfg).map_err(|e| DeltaShellError::SeedNonConvergence {
            n,
            reason: e.to_string(),
        })?;
        if (branch_map(k, n, lambda) - k).norm() > 1e-6 * k.norm() {
            return Err(DeltaShellError::SeedNonConvergence {
                n,
                reason: format!("Newton left branch {n} and converged to {k}"),
            });
        }
        if !(k.re > 0.0 && k.im < -QUADRANT_MARGIN) {
            log::warn!("rejecting root {k} for n = {n}: not in the resonance quadrant");
            continue;
        }
        found.push((k, f(k).norm(), n));
    }

    let pairs: Vec<(Complex64, f64)> = found.iter().map(|&(k, r, _)| (k, r)).collect();
    let kept = dedupe_roots(&pairs, cfg.dedupe_radius);
    let mut poles = kept
        .into_iter()
        .map(|(k, _)| {
            let n = found.iter().find(|f| f.0 == k).map(|f| f.2).unwrap_or(0);
            ResonancePole::from_root(k, n, params)
        })
        .collect::<Result<Vec<_>, _>>()?;
    poles.sort_by(|a, b| a.k.re.total_cmp(&b.k.re));

    let rect = search_rectangle(lambda, n_max, &poles);
    let winding = count_condition_zeros(lambda, &rect, &contour_config())?;
    let inside = poles.iter().filter(|p| rect.contains(p.k)).count();
    if winding.count != poles.len() as i64 || inside != poles.len() {
        return Err(DeltaShellError::CompletenessMismatch {
            counted: winding.count,
            found: poles.len(),
        });
    }
    Ok(poles)
}

/// `N_res = [2λ / (a (1 + λ − 2ik))]^{1/2}`, principal branch.
pub fn normalization_constant(
    k: Complex64,
    params: &SystemParams,
) -> Result<Complex64, DeltaShellError> {
    let lambda = params.lambda;
    let denom = params.radius_a * (1.0 + lambda - 2.0 * Complex64::i() * k);
    let arg = 2.0 * lambda / denom;
    if arg == Complex64::new(0.0, 0.0) || !(arg.re.is_finite() && arg.im.is_finite()) {
        return Err(DeltaShellError::BranchDegenerate);
    }
    Ok(arg.sqrt())
}

fn inner_wave(rho: f64, pole: &ResonancePole) -> Complex64 {
    let k = pole.k;
    pole.n_res * ((Complex64::i() * k).exp() * (k * rho).sin())
}

fn outer_wave(rho: f64, pole: &ResonancePole) -> Complex64 {
    let k = pole.k;
    pole.n_res * (k.sin() * (Complex64::i() * k * rho).exp())
}

/// Radial Gamow function `u₀(r)`: `N e^{ik} sin(kr/a)` inside the shell and
/// `N sin(k) e^{ikr/a}` outside. It grows like `e^{|Im k| r/a}`.
pub fn gamow_position(r: f64, pole: &ResonancePole, params: &SystemParams) -> Complex64 {
    let rho = r / params.radius_a;
    if rho < 1.0 {
        inner_wave(rho, pole)
    } else {
        outer_wave(rho, pole)
    }
}

/// Momentum-space radial part
/// `û₀(p) = N √(2ħ/π) p_res / (p² − p_res²) sin(pa/ħ)`.
pub fn gamow_momentum(p: f64, pole: &ResonancePole, params: &SystemParams) -> Complex64 {
    let sin_term = (p * params.radius_a / params.hbar).sin();
    let pres = pole.p_res;
    pole.n_res * (2.0 * params.hbar / PI).sqrt() * pres / (p * p - pres * pres) * sin_term
}

pub fn sample_position(
    radii: &[f64],
    pole: &ResonancePole,
    params: &SystemParams,
) -> Vec<RadialWaveSample> {
    radii
        .iter()
        .map(|&r| RadialWaveSample {
            argument: r,
            value: gamow_position(r, pole, params),
        })
        .collect()
}

pub fn sample_momentum(
    momenta: &[f64],
    pole: &ResonancePole,
    params: &SystemParams,
) -> Vec<RadialWaveSample> {
    momenta
        .iter()
        .map(|&p| RadialWaveSample {
            argument: p,
            value: gamow_momentum(p, pole, params),
        })
        .collect()
}

/// Reduced s-wave element
/// `⟨E|V|E_res⟩₀ = √(2m/(πħp)) (ħ²λ/(2ma)) sin(pa/ħ) u₀(a)`
/// between the delta-normalised free wave of momentum `p` and the pole.
pub fn matrix_element(
    p: f64,
    pole: &ResonancePole,
    params: &SystemParams,
) -> Result<Complex64, DeltaShellError> {
    if !(p > 0.0) {
        return Err(DeltaShellError::ZeroMomentum);
    }
    let SystemParams {
        mass,
        hbar,
        radius_a,
        lambda,
    } = *params;
    let free = (2.0 * mass / (PI * hbar * p)).sqrt();
    let strength = hbar * hbar * lambda / (2.0 * mass * radius_a);
    let shell = outer_wave(1.0, pole);
    Ok(shell * (free * strength * (p * radius_a / hbar).sin()))
}

/// `∫₀^∞ û₀(p; q)² dp` evaluated by quadrature, with `N_res` held at the
/// pole's value. Only converges for `Im q > 0`.
pub fn continuation_norm(
    q: Complex64,
    pole: &ResonancePole,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<Complex64, DeltaShellError> {
    if !(q.im > 0.0) {
        return Err(DeltaShellError::WrongHalfPlane { q });
    }
    // p = (ħ/a) κ, q = (ħ/a) s: the integrand becomes a N² (2/π) s² sin²κ / (κ² − s²)²
    let s = q / params.momentum_scale();
    let prefactor = pole.n_res * pole.n_res * params.radius_a * (2.0 / PI);
    let integrand = |kappa: f64| {
        let d = kappa * kappa - s * s;
        prefactor * s * s * kappa.sin().powi(2) / (d * d)
    };
    let guarded = cfg.with_panel_width(0.5 * PI);
    let points = peak_breakpoints(0.0, s.re, s.im, &[1.0, 10.0]);
    let head = integrate_breakpoints_by(&integrand, &points, &guarded, |_| guarded.max_panel_width)?;
    let last = *points.last().expect("breakpoints are nonempty");
    let tail = integrate_semi_infinite(integrand, last, &guarded, 4.0)?;
    Ok(head.value + tail.value)
}

/// Closed form of [`continuation_norm`], valid for any `q`:
/// `N² (2ħ/π) (−iπ/(8q)) (1 + e^{2iaq/ħ} (−1 + 2iaq/ħ))`.
/// At `q = p_res` it equals 1.
pub fn closed_form_norm(q: Complex64, pole: &ResonancePole, params: &SystemParams) -> Complex64 {
    let i = Complex64::i();
    let x = 2.0 * i * q * params.radius_a / params.hbar;
    pole.n_res * pole.n_res * (2.0 * params.hbar / PI) * (-i * PI / (8.0 * q))
        * (1.0 + x.exp() * (x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn first_pole(lambda: f64) -> (SystemParams, ResonancePole) {
        let params = SystemParams::natural(lambda);
        let poles = find_resonances(&params, 1, &RootFindConfig::default()).unwrap();
        (params, poles[0])
    }

    #[test]
    fn condition_is_one_at_multiples_of_pi() {
        for n in 1..5 {
            for &lambda in &[0.5, 10.0, 1e3] {
                let v = resonance_condition(c(n as f64 * PI, 0.0), lambda).unwrap();
                assert!((v - 1.0).norm() < 1e-14 * lambda, "n={n} lambda={lambda}: {v}");
            }
        }
    }

    #[test]
    fn condition_at_imaginary_unit() {
        // independent route: e^{i·i} = e^{-1}, sin(i) = i sinh(1)
        let lambda = 10.0;
        let want = 1.0 + lambda * (-1f64).exp() * 1f64.sinh();
        let got = resonance_condition(c(0.0, 1.0), lambda).unwrap();
        assert!((got - c(want, 0.0)).norm() < 1e-14 * want);
    }

    #[test]
    fn zero_momentum_is_rejected() {
        assert_eq!(
            resonance_condition(c(0.0, 0.0), 1.0),
            Err(DeltaShellError::ZeroMomentum)
        );
        assert_eq!(
            resonance_condition_derivative(c(0.0, 0.0), 1.0),
            Err(DeltaShellError::ZeroMomentum)
        );
    }

    #[test]
    fn derivative_matches_central_differences() {
        let h = 1e-6;
        for &(k, lambda) in &[
            (c(PI, 0.0), 10.0),
            (c(2.9, -0.07), 10.0),
            (c(5.5, -0.6), 3.0),
            (c(0.3, 0.4), -2.0),
        ] {
            let fd = (resonance_condition(k + h, lambda).unwrap()
                - resonance_condition(k - h, lambda).unwrap())
                / (2.0 * h);
            let d = resonance_condition_derivative(k, lambda).unwrap();
            assert!((d - fd).norm() < 1e-6 * d.norm().max(1e-3), "k={k}: {d} vs {fd}");
        }
        assert_eq!(
            resonance_condition_derivative(c(1.3, -0.2), 0.0).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn mirror_symmetry_of_the_condition() {
        for &(k, lambda) in &[(c(2.9, -0.07), 10.0), (c(0.4, 1.7), 3.0), (c(11.0, -2.5), 0.7)] {
            let a = resonance_condition(-k.conj(), lambda).unwrap();
            let b = resonance_condition(k, lambda).unwrap().conj();
            assert!((a - b).norm() <= 1e-15 * b.norm());
        }
    }

    #[test]
    fn seeds_land_on_their_own_branch_for_a_weak_shell() {
        // The plain seed nπ(1 − 1/(1+λ)) − 0.1i sends Newton to the n = 1 root
        // for λ = 3, n = 2; the branch refinement must not.
        let params = SystemParams::natural(3.0);
        let poles = find_resonances(&params, 4, &RootFindConfig::default()).unwrap();
        assert_eq!(poles.len(), 4);
        for (i, p) in poles.iter().enumerate() {
            assert_eq!(p.index_n, i + 1);
            assert!(p.k.re > (i as f64 + 0.5) * PI && p.k.re < (i as f64 + 1.5) * PI);
        }
    }

    #[test]
    fn single_pole_lambda_ten() {
        let (params, pole) = first_pole(10.0);
        assert!(pole.k.re > 0.5 * PI && pole.k.re < 1.5 * PI);
        assert!(pole.k.im < 0.0);
        assert!(pole.residual < 1e-12);
        assert!((pole.e_res - pole.p_res * pole.p_res / (2.0 * params.mass)).norm() < 1e-14);
        assert_eq!(pole.e_r, pole.e_res.re);
        assert_eq!(pole.gamma_r, -2.0 * pole.e_res.im);
        assert!(pole.gamma_r > 0.0);
    }

    #[test]
    fn four_poles_are_certified() {
        let params = SystemParams::natural(10.0);
        let poles = find_resonances(&params, 4, &RootFindConfig::default()).unwrap();
        assert_eq!(poles.len(), 4);
        let rect = search_rectangle(10.0, 4, &poles);
        let w = count_condition_zeros(10.0, &rect, &contour_config()).unwrap();
        assert_eq!(w.count, 4);
        // higher resonances are broader for λ = 10
        for pair in poles.windows(2) {
            assert!(pair[1].k.im.abs() > pair[0].k.im.abs());
        }
    }

    #[test]
    fn explicit_rectangle_count() {
        let rect = Rectangle::new(0.5 * PI, 4.5 * PI, -2.0, -1e-6);
        let w = count_condition_zeros(10.0, &rect, &QuadratureConfig::default()).unwrap();
        assert_eq!(w.count, 4);
    }

    #[test]
    fn strong_shell_approaches_pi() {
        let params = SystemParams::natural(1e6);
        // f varies by ~λ/π per unit k, so float spacing alone leaves |f| ~ 1e-10
        let cfg = RootFindConfig::default().with_residual_tolerance(1e-8);
        let poles = find_resonances(&params, 1, &cfg).unwrap();
        assert!((poles[0].k - c(PI, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn search_refuses_attractive_or_empty() {
        let cfg = RootFindConfig::default();
        assert!(matches!(
            find_resonances(&SystemParams::natural(-1.0), 1, &cfg),
            Err(DeltaShellError::NonRepulsive { .. })
        ));
        assert!(matches!(
            find_resonances(&SystemParams::natural(0.0), 1, &cfg),
            Err(DeltaShellError::NonRepulsive { .. })
        ));
        assert_eq!(
            find_resonances(&SystemParams::natural(1.0), 0, &cfg),
            Err(DeltaShellError::EmptySearch)
        );
    }

    #[test]
    fn unreachable_tolerance_is_a_seed_failure() {
        let cfg = RootFindConfig::default().with_residual_tolerance(1e-300);
        assert!(matches!(
            find_resonances(&SystemParams::natural(10.0), 1, &cfg),
            Err(DeltaShellError::SeedNonConvergence { n: 1, .. })
        ));
    }

    #[test]
    fn params_are_validated() {
        assert!(SystemParams::new(1.0, 1.0, 1.0, 10.0).is_ok());
        assert!(SystemParams::new(0.0, 1.0, 1.0, 10.0).is_err());
        assert!(SystemParams::new(1.0, -1.0, 1.0, 10.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, f64::NAN, 10.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, f64::INFINITY).is_err());
        assert_eq!(SystemParams::natural(3.0).energy_scale(), 0.5);
    }

    #[test]
    fn normalization_modulus_and_scaling() {
        let (params, pole) = first_pole(10.0);
        let n = normalization_constant(pole.k, &params).unwrap();
        let modulus = (2.0 * 10.0 / (1.0 + 10.0 - 2.0 * Complex64::i() * pole.k)).norm();
        assert!((n.norm_sqr() - modulus).abs() < 1e-14 * modulus);

        let wide = SystemParams {
            radius_a: 2.0,
            ..params
        };
        let n2 = normalization_constant(pole.k, &wide).unwrap();
        assert!((n2 - n / 2f64.sqrt()).norm() < 1e-15);

        assert_eq!(
            normalization_constant(pole.k, &SystemParams::natural(0.0)),
            Err(DeltaShellError::BranchDegenerate)
        );
    }

    #[test]
    fn position_wave_is_continuous_and_vanishes_at_origin() {
        let (params, pole) = first_pole(10.0);
        assert_eq!(gamow_position(0.0, &pole, &params), c(0.0, 0.0));
        assert_eq!(inner_wave(1.0, &pole), outer_wave(1.0, &pole));
        let left = gamow_position(1.0 - 1e-12, &pole, &params);
        let right = gamow_position(1.0 + 1e-12, &pole, &params);
        assert!((left - right).norm() < 1e-10);
    }

    #[test]
    fn position_wave_grows_at_the_pole_rate() {
        let (params, pole) = first_pole(10.0);
        let rs: Vec<f64> = (0..=80).map(|i| 10.0 + 0.5 * i as f64).collect();
        let samples = sample_position(&rs, &pole, &params);
        let ys: Vec<f64> = samples.iter().map(|s| s.value.norm().ln()).collect();
        let n = rs.len() as f64;
        let (mx, my) = (rs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = rs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = rs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((slope - pole.k.im.abs()).abs() < 1e-10, "{slope}");
    }

    #[test]
    fn momentum_wave_shape() {
        let (params, pole) = first_pole(10.0);
        assert_eq!(gamow_momentum(0.0, &pole, &params), c(0.0, 0.0));
        // envelope ~ |sin p| / p² at large p
        for &p in &[200.3, 1000.7, 5000.1] {
            let v = gamow_momentum(p, &pole, &params).norm();
            let envelope = (pole.n_res * (2.0 / PI).sqrt() * pole.p_res).norm()
                * p.sin().abs()
                / (p * p);
            assert!((v / envelope - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn matrix_element_nodes_and_errors() {
        let (params, pole) = first_pole(10.0);
        assert!(matrix_element(PI, &pole, &params).unwrap().norm() < 1e-14);
        assert_eq!(
            matrix_element(0.0, &pole, &params),
            Err(DeltaShellError::ZeroMomentum)
        );
    }

    #[test]
    fn matrix_element_reproduces_the_momentum_wave() {
        // (2m/(p_res² − p²)) √(1/(mp)) ⟨E|V|E_res⟩₀ = û₀(p)/p
        for params in [
            SystemParams::natural(10.0),
            SystemParams::new(2.0, 0.7, 1.9, 10.0).unwrap(),
        ] {
            let pole = find_resonances(&params, 2, &RootFindConfig::default()).unwrap()[1];
            for i in 1..40 {
                let p = 0.173 * i as f64 * params.momentum_scale();
                let me = matrix_element(p, &pole, &params).unwrap();
                let lhs = 2.0 * params.mass / (pole.p_res * pole.p_res - p * p)
                    * (1.0 / (params.mass * p)).sqrt()
                    * me;
                let rhs = gamow_momentum(p, &pole, &params) / p;
                assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "p={p}");
            }
        }
    }

    #[test]
    fn closed_form_norm_is_one_at_the_pole() {
        for lambda in [3.0, 10.0, 100.0] {
            let params = SystemParams::natural(lambda);
            for pole in find_resonances(&params, 3, &RootFindConfig::default()).unwrap() {
                let v = closed_form_norm(pole.p_res, &pole, &params);
                assert!((v - 1.0).norm() < 1e-10, "lambda={lambda}: {v}");
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature_in_upper_half_plane() {
        let (params, pole) = first_pole(10.0);
        let cfg = QuadratureConfig::default().with_relative_tolerance(1e-12);
        for q in [pole.k * c(1.0, 0.3), c(2.0, 0.5), pole.k.conj()] {
            let num = continuation_norm(q, &pole, &params, &cfg).unwrap();
            let closed = closed_form_norm(q, &pole, &params);
            assert!((num - closed).norm() < 1e-8 * closed.norm(), "q={q}: {num} vs {closed}");
        }
        assert!(matches!(
            continuation_norm(pole.p_res, &pole, &params, &cfg),
            Err(DeltaShellError::WrongHalfPlane { .. })
        ));
    }

    #[test]
    fn closed_form_satisfies_cauchy_riemann() {
        let (params, pole) = first_pole(10.0);
        let h = 1e-6;
        for q in [c(2.0, 0.5), c(3.5, -0.2), pole.p_res] {
            let dx = (closed_form_norm(q + h, &pole, &params)
                - closed_form_norm(q - h, &pole, &params))
                / (2.0 * h);
            let dy = (closed_form_norm(q + c(0.0, h), &pole, &params)
                - closed_form_norm(q - c(0.0, h), &pole, &params))
                / (2.0 * h);
            // analytic: ∂f/∂y = i ∂f/∂x
            assert!((dy - Complex64::i() * dx).norm() < 1e-7 * dx.norm().max(1.0));
        }
    }
}
