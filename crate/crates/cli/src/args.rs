use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(
    name = "reskit",
    version,
    about = "Resonance poles and decay spectra of the delta-shell potential",
    long_about = "Resonance poles and decay spectra of the delta-shell potential.\n\n\
                  Default units are mass = hbar = radius = 1, so E0 = hbar^2/(2 m a^2) = 1/2.\n\
                  RESKIT_QUAD_TOL overrides the default relative quadrature tolerance."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resonance poles k_n for n = 1..=n_max, certified complete.
    #[command(allow_negative_numbers = true)]
    Poles(PolesArgs),
    /// Decay spectrum dΓ/dE, or an angular distribution.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Decay constants Γ_R, Γ and Γ̄ = Γ_R Γ.
    #[command(allow_negative_numbers = true)]
    Gamma(GammaArgs),
    /// Exact decay width against the long-lived (Fermi) limit over several λ.
    #[command(name = "fermi-compare", allow_negative_numbers = true)]
    FermiCompare(FermiArgs),
    /// Spectrum of a two-pole superposition.
    #[command(allow_negative_numbers = true)]
    Interfere(InterfereArgs),
    /// Runs the built-in invariant checks.
    #[command(allow_negative_numbers = true)]
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Particle mass.
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Reduced Planck constant.
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Shell radius a.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write a JSON run manifest here.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PolesArgs {
    /// Shell strength (must be positive).
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub n_max: usize,
    /// Newton residual tolerance on the resonance condition.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    #[value(name = "E")]
    E,
    Cos,
    Phi,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub emin: Option<f64>,
    #[arg(long)]
    pub emax: Option<f64>,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub lambda: f64,
    /// Pole index, 1 for the lowest resonance.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = AxisArg::E)]
    pub axis: AxisArg,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value_t = 0)]
    pub m: i32,
    /// Reduced matrix element as `re,im`; required for l > 0.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub reduced_me: Option<Complex64>,
    /// Rescale the density to unit integral.
    #[arg(long)]
    pub normalize: bool,
    /// Also write an SVG line plot here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Energy,
    Momentum,
    Both,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Route::Both)]
    pub route: Route,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FermiArgs {
    /// Comma-separated shell strengths.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub lambda_list: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct InterfereArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1)]
    pub n1: usize,
    #[arg(long, default_value_t = 2)]
    pub n2: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1,0")]
    pub c1: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1,0")]
    pub c2: Complex64,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Add term1, term2 and cross columns.
    #[arg(long)]
    pub decompose: bool,
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 10.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Replace every check threshold with this value.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Shorthand for `--format json`.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub common: Common,
}

/// Parses `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected re,im but got '{s}'"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("'{t}' is not a finite number"))
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}
