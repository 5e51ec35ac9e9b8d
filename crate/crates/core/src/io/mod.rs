//! Deterministic CSV and JSON encodings of spectra, poles and run manifests.
//!
//! Both formats carry `format_version`. JSON objects are written with
//! lexicographically sorted keys and complex numbers as `{"re": .., "im": ..}`.

mod csv;
mod json;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deltashell::{ResonancePole, SystemParams};
use crate::goldenrule::{DecayConstants, Spectrum};
use crate::numerics::QuadratureConfig;

pub use self::csv::{read_spectrum_csv, write_spectrum_csv, write_spectrum_csv_with_columns};
pub use self::json::{from_json_str, read_json, to_json_string, write_json, JsonDocument};

/// Version written into every CSV header and JSON envelope.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("I/O failure on {path:?}: {source}")]
    IoFailure {
        path: Option<PathBuf>,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite number in {0}")]
    NonFinite(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u64),
    #[error("expected a '{expected}' document, found '{found}'")]
    WrongKind { expected: String, found: String },
    #[error("invalid document: {0}")]
    Invalid(String),
}

impl From<std::io::Error> for IoError {
    fn from(source: std::io::Error) -> Self {
        IoError::IoFailure { path: None, source }
    }
}

/// Serde adapter encoding a `Complex64` as `{"im": .., "re": ..}`.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct ReIm {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let v = ReIm::deserialize(d)?;
        Ok(Complex64::new(v.re, v.im))
    }
}

/// Per-pole line of a [`RunManifest`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleSummary {
    pub index_n: usize,
    #[serde(with = "complex_serde")]
    pub k: num_complex::Complex64,
    pub e_r: f64,
    pub gamma_r: f64,
    pub gamma: Option<f64>,
    pub gamma_bar: Option<f64>,
    pub residual: f64,
}

impl PoleSummary {
    pub fn new(pole: &ResonancePole, constants: Option<&DecayConstants>) -> Self {
        Self {
            index_n: pole.index_n,
            k: pole.k,
            e_r: pole.e_r,
            gamma_r: pole.gamma_r,
            gamma: constants.map(|c| c.gamma),
            gamma_bar: constants.map(|c| c.gamma_bar),
            residual: pole.residual,
        }
    }
}

/// What produced an output file, with enough detail to rerun it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub created_utc: String,
    pub params: SystemParams,
    pub pole_summaries: Vec<PoleSummary>,
    pub quadrature_settings: QuadratureConfig,
    pub command_line: String,
}

fn check_finite(what: &str, values: impl IntoIterator<Item = f64>) -> Result<(), IoError> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(IoError::NonFinite(what.to_string()))
    }
}

impl JsonDocument for RunManifest {
    const KIND: &'static str = "run_manifest";

    fn check(&self) -> Result<(), IoError> {
        let p = &self.params;
        check_finite("params", [p.mass, p.hbar, p.radius_a, p.lambda])?;
        for s in &self.pole_summaries {
            check_finite(
                "pole summary",
                [s.k.re, s.k.im, s.e_r, s.gamma_r, s.residual]
                    .into_iter()
                    .chain(s.gamma)
                    .chain(s.gamma_bar),
            )?;
        }
        let q = &self.quadrature_settings;
        check_finite(
            "quadrature settings",
            [q.relative_tolerance, q.absolute_tolerance]
                .into_iter()
                .chain(q.max_panel_width),
        )
    }
}

impl JsonDocument for Spectrum {
    const KIND: &'static str = "spectrum";

    fn check(&self) -> Result<(), IoError> {
        check_finite("spectrum grid", self.grid.iter().copied())?;
        check_finite("spectrum values", self.values.iter().copied())?;
        check_finite(
            "spectrum metadata",
            self.pole_meta
                .iter()
                .flat_map(|m| [m.e_r, m.gamma_r])
                .chain(self.total),
        )?;
        self.validate().map_err(|e| match e {
            crate::goldenrule::GoldenRuleError::InvalidGrid(m) => IoError::InvalidGrid(m),
            other => IoError::Invalid(other.to_string()),
        })
    }
}

impl JsonDocument for Vec<ResonancePole> {
    const KIND: &'static str = "poles";

    fn check(&self) -> Result<(), IoError> {
        for p in self {
            check_finite(
                "pole",
                [
                    p.k.re, p.k.im, p.p_res.re, p.p_res.im, p.e_res.re, p.e_res.im, p.e_r,
                    p.gamma_r, p.n_res.re, p.n_res.im, p.residual,
                ],
            )?;
        }
        Ok(())
    }
}

impl JsonDocument for DecayConstants {
    const KIND: &'static str = "decay_constants";

    fn check(&self) -> Result<(), IoError> {
        check_finite("decay constants", [self.gamma_r, self.gamma, self.gamma_bar])
    }
}
