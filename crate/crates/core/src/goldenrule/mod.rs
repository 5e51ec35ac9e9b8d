//! Decay distributions of a Gamow state: the Lorentzian lineshape times the
//! squared matrix element between the resonance and the free continuum.
//!
//! Energy densities are per unit `E`; angular densities per unit `cos θ` or
//! `φ`. Spectra are sampled on a caller-supplied grid and integrated with the
//! trapezoid rule on that grid.

mod interference;
mod spectra;
mod widths;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deltashell::{DeltaShellError, ResonancePole};
use crate::numerics::NumericsError;

pub use interference::{interference_decomposition, interference_spectrum, InterferenceTerms};
pub use spectra::{
    angular_spectrum, default_energy_grid, differential_decay_d3p, lorentzian, midpoint_grid,
    normalize, spectrum_de, spectrum_de_domega, spectrum_de_with, trapezoid, DEFAULT_GRID_POINTS,
};
pub use widths::{
    basis_equivalence_check, box_density_of_states, decay_constants, fermi_golden_rule_box,
    fermi_total_width, total_gamma_energy_route, total_gamma_momentum_route, BasisEquivalence,
    BoxConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GoldenRuleError {
    #[error("resonance width must be positive, got {gamma_r}")]
    NonPositiveWidth { gamma_r: f64 },
    #[error("momentum must be positive")]
    ZeroMomentum,
    #[error("energy must be positive, got {energy}")]
    NonPositiveEnergy { energy: f64 },
    #[error("invalid quantum numbers l = {l}, m = {m}")]
    InvalidQuantumNumbers { l: u32, m: i32 },
    #[error("a reduced matrix element must be supplied for l = {l}")]
    MissingReducedElement { l: u32 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("superposition has no terms")]
    EmptySuperposition,
    #[error("superposition contains the same pole twice")]
    DuplicatePole,
    #[error("spectrum integrates to {total}, cannot normalise")]
    ZeroTotal { total: f64 },
    #[error("box side length must be positive, got {0}")]
    InvalidBox(f64),
    #[error("solid angle must lie in (0, 4π], got {0}")]
    InvalidSolidAngle(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    DeltaShell(#[from] DeltaShellError),
}

/// Independent variable of a [`Spectrum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Energy,
    CosTheta,
    Phi,
    EnergySolidAngle,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Energy => "energy",
            Axis::CosTheta => "cos_theta",
            Axis::Phi => "phi",
            Axis::EnergySolidAngle => "energy_solid_angle",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "energy" => Ok(Axis::Energy),
            "cos_theta" => Ok(Axis::CosTheta),
            "phi" => Ok(Axis::Phi),
            "energy_solid_angle" => Ok(Axis::EnergySolidAngle),
            other => Err(format!("unknown axis '{other}'")),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Position and width of a pole a spectrum was computed from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleMeta {
    pub e_r: f64,
    pub gamma_r: f64,
}

impl From<&ResonancePole> for PoleMeta {
    fn from(p: &ResonancePole) -> Self {
        Self {
            e_r: p.e_r,
            gamma_r: p.gamma_r,
        }
    }
}

// Largest tolerated dip below zero, relative to the largest value.
const NEGATIVE_SLACK: f64 = 1e-12;

/// Density sampled on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub normalized: bool,
    pub pole_meta: Vec<PoleMeta>,
    pub total: Option<f64>,
}

impl Spectrum {
    /// Builds a validated spectrum with `total` set to its trapezoid integral.
    pub fn new(
        axis: Axis,
        grid: Vec<f64>,
        values: Vec<f64>,
        pole_meta: Vec<PoleMeta>,
    ) -> Result<Self, GoldenRuleError> {
        let mut s = Self {
            axis,
            grid,
            values,
            normalized: false,
            pole_meta,
            total: None,
        };
        s.validate()?;
        s.total = Some(s.integral());
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), GoldenRuleError> {
        validate_grid(&self.grid)?;
        if self.values.len() != self.grid.len() {
            return Err(GoldenRuleError::InvalidSpectrum(format!(
                "{} values for {} grid points",
                self.values.len(),
                self.grid.len()
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(GoldenRuleError::InvalidSpectrum(format!(
                "value {i} is not finite"
            )));
        }
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(i) = self.values.iter().position(|&v| v < -NEGATIVE_SLACK * peak) {
            return Err(GoldenRuleError::InvalidSpectrum(format!(
                "value {i} is negative"
            )));
        }
        for m in &self.pole_meta {
            if !(m.e_r.is_finite() && m.gamma_r.is_finite()) {
                return Err(GoldenRuleError::InvalidSpectrum(
                    "pole metadata is not finite".into(),
                ));
            }
        }
        if let Some(t) = self.total {
            if !t.is_finite() {
                return Err(GoldenRuleError::InvalidSpectrum("total is not finite".into()));
            }
        }
        if self.normalized && (self.integral() - 1.0).abs() > 1e-6 {
            return Err(GoldenRuleError::InvalidSpectrum(format!(
                "flagged normalised but integrates to {}",
                self.integral()
            )));
        }
        Ok(())
    }

    /// Trapezoid integral of `values` over `grid`.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.values)
    }

    /// Third standardised moment of the sampled density.
    pub fn skewness(&self) -> f64 {
        let mass = self.integral();
        let moment = |k: i32, mu: f64| {
            let w: Vec<f64> = self
                .grid
                .iter()
                .zip(&self.values)
                .map(|(x, v)| (x - mu).powi(k) * v)
                .collect();
            trapezoid(&self.grid, &w) / mass
        };
        let mean = moment(1, 0.0);
        let var = moment(2, mean);
        moment(3, mean) / var.powf(1.5)
    }

    /// Grid point with the largest value.
    pub fn argmax(&self) -> Option<f64> {
        self.values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| self.grid[i])
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<(), GoldenRuleError> {
    if grid.len() < 2 {
        return Err(GoldenRuleError::InvalidGrid(
            "at least two points are required".into(),
        ));
    }
    if let Some(i) = grid.iter().position(|x| !x.is_finite()) {
        return Err(GoldenRuleError::InvalidGrid(format!("point {i} is not finite")));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(GoldenRuleError::InvalidGrid(format!(
            "grid is not strictly increasing at index {}",
            i + 1
        )));
    }
    Ok(())
}

/// Coefficient-weighted sum of distinct poles.
#[derive(Clone, Debug, PartialEq)]
pub struct Superposition {
    terms: Vec<(num_complex::Complex64, ResonancePole)>,
}

impl Superposition {
    pub fn new(
        terms: Vec<(num_complex::Complex64, ResonancePole)>,
    ) -> Result<Self, GoldenRuleError> {
        if terms.is_empty() {
            return Err(GoldenRuleError::EmptySuperposition);
        }
        for (i, a) in terms.iter().enumerate() {
            if !(a.0.re.is_finite() && a.0.im.is_finite()) {
                return Err(GoldenRuleError::InvalidSpectrum(
                    "superposition coefficient is not finite".into(),
                ));
            }
            if terms[..i].iter().any(|b| b.1.k == a.1.k) {
                return Err(GoldenRuleError::DuplicatePole);
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(num_complex::Complex64, ResonancePole)] {
        &self.terms
    }
}

/// `Γ̄ = Γ_R · Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayConstants {
    pub gamma_r: f64,
    pub gamma: f64,
    pub gamma_bar: f64,
}

impl DecayConstants {
    pub fn new(gamma_r: f64, gamma: f64) -> Self {
        Self {
            gamma_r,
            gamma,
            gamma_bar: gamma_r * gamma,
        }
    }
}
