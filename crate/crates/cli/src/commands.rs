use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use reskit::deltashell::{count_condition_zeros, find_resonances, search_rectangle};
use reskit::goldenrule::{
    decay_constants, fermi_total_width, interference_decomposition, midpoint_grid, normalize,
    spectrum_de, spectrum_de_with, total_gamma_energy_route,
    angular_spectrum,
};
use reskit::io::{
    to_json_string, write_spectrum_csv_with_columns, IoError, JsonDocument, PoleSummary,
    RunManifest,
};
use reskit::{
    Axis, DecayConstants, QuadratureConfig, ResonancePole, RootFindConfig, Spectrum,
    Superposition, SystemParams,
};

use crate::args::{
    AxisArg, Common, FermiArgs, Format, GammaArgs, GridArgs, InterfereArgs, PolesArgs, Route,
    SpectrumArgs,
};
use crate::output::{emit, svg_plot, Cell, Table};
use crate::CliError;

pub const QUAD_TOL_VAR: &str = "RESKIT_QUAD_TOL";

/// Default quadrature settings, with the relative tolerance taken from
/// `RESKIT_QUAD_TOL` when set.
pub fn quadrature_config() -> Result<QuadratureConfig, CliError> {
    let mut cfg = QuadratureConfig::default();
    if let Ok(raw) = std::env::var(QUAD_TOL_VAR) {
        let tol: f64 = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{QUAD_TOL_VAR}='{raw}' is not a number")))?;
        cfg = cfg.with_relative_tolerance(tol);
        cfg.validate()
            .map_err(|e| CliError::Usage(format!("{QUAD_TOL_VAR}: {e}")))?;
    }
    Ok(cfg)
}

pub fn system(common: &Common, lambda: f64) -> Result<SystemParams, CliError> {
    Ok(SystemParams::new(common.mass, common.hbar, common.radius, lambda)?)
}

fn require_repulsive(lambda: f64) -> Result<(), CliError> {
    if !(lambda > 0.0) {
        return Err(CliError::Usage(format!(
            "--lambda must be positive (repulsive shell), got {lambda}"
        )));
    }
    Ok(())
}

/// Poles `1..=n` and the `n`-th one.
pub fn pole(
    params: &SystemParams,
    n: usize,
    cfg: &RootFindConfig,
) -> Result<(Vec<ResonancePole>, ResonancePole), CliError> {
    require_repulsive(params.lambda)?;
    if n == 0 {
        return Err(CliError::Usage("pole index must be at least 1".into()));
    }
    let poles = find_resonances(params, n, cfg)?;
    let p = *poles
        .iter()
        .find(|p| p.index_n == n)
        .ok_or_else(|| CliError::Numeric(format!("pole n = {n} was not found")))?;
    Ok((poles, p))
}

fn units_note(p: &SystemParams) -> String {
    format!(
        "units: mass={} hbar={} radius={} (E0 = hbar^2/(2 m a^2) = {})",
        p.mass,
        p.hbar,
        p.radius_a,
        p.energy_scale()
    )
}

fn created_utc() -> String {
    let stamp = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|s| DateTime::<Utc>::from_timestamp(s, 0))
        .unwrap_or_else(Utc::now);
    stamp.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn write_manifest(
    common: &Common,
    params: &SystemParams,
    poles: Vec<PoleSummary>,
    quad: &QuadratureConfig,
    command_line: &str,
) -> Result<(), CliError> {
    let Some(path) = &common.manifest else {
        return Ok(());
    };
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        created_utc: created_utc(),
        params: *params,
        pole_summaries: poles,
        quadrature_settings: *quad,
        command_line: command_line.to_string(),
    };
    emit(&to_json_string(&manifest)?, Some(path))
}

pub fn poles(a: PolesArgs, command_line: String) -> Result<(), CliError> {
    require_repulsive(a.lambda)?;
    if a.n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let params = system(&a.common, a.lambda)?;
    let mut cfg = RootFindConfig::default();
    if let Some(t) = a.tolerance {
        cfg = cfg.with_residual_tolerance(t);
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let quad = quadrature_config()?;
    let found = find_resonances(&params, a.n_max, &cfg)?;
    let rect = search_rectangle(a.lambda, a.n_max, &found);
    let winding = count_condition_zeros(a.lambda, &rect, &QuadratureConfig::default())?;

    let text = match a.common.format {
        Format::Json => to_json_string(&found)?,
        f => {
            let table = Table {
                notes: vec![
                    units_note(&params),
                    format!(
                        "lambda={} n_max={} argument-principle count={} over Re k in ({:.6}, {:.6}), Im k in ({:.6}, {:.6})",
                        a.lambda, a.n_max, winding.count, rect.re_min, rect.re_max, rect.im_min, rect.im_max
                    ),
                ],
                header: vec!["n", "k_re", "k_im", "E_R", "Gamma_R", "residual"],
                rows: found
                    .iter()
                    .map(|p| {
                        vec![
                            Cell::Int(p.index_n as i64),
                            Cell::Num(p.k.re),
                            Cell::Num(p.k.im),
                            Cell::Num(p.e_r),
                            Cell::Num(p.gamma_r),
                            Cell::Num(p.residual),
                        ]
                    })
                    .collect(),
            };
            if f == Format::Csv {
                table.csv()
            } else {
                table.human()
            }
        }
    };
    emit(&text, a.common.output.as_deref())?;
    let summaries = found.iter().map(|p| PoleSummary::new(p, None)).collect();
    write_manifest(&a.common, &params, summaries, &quad, &command_line)
}

fn energy_grid(
    grid: &GridArgs,
    lo_default: f64,
    hi_default: f64,
) -> Result<Vec<f64>, CliError> {
    let lo = grid.emin.unwrap_or(lo_default);
    let hi = grid.emax.unwrap_or(hi_default);
    Ok(midpoint_grid(lo, hi, grid.points)?)
}

fn spectrum_text(
    spec: &Spectrum,
    extra: &[(&str, &[f64])],
    format: Format,
    notes: Vec<String>,
) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_spectrum_csv_with_columns(spec, extra, &mut buf)?;
            String::from_utf8(buf).map_err(|e| CliError::Numeric(e.to_string()))
        }
        Format::Json => {
            if extra.is_empty() {
                Ok(to_json_string(spec)?)
            } else {
                let doc = DecomposedSpectrum {
                    spectrum: spec.clone(),
                    columns: extra
                        .iter()
                        .map(|(n, c)| NamedColumn {
                            name: n.to_string(),
                            values: c.to_vec(),
                        })
                        .collect(),
                };
                Ok(to_json_string(&doc)?)
            }
        }
        Format::Table => {
            let mut header = vec!["x", "value"];
            header.extend(extra.iter().map(|(n, _)| *n));
            let mut all_notes = vec![format!(
                "axis={} normalized={} total={}",
                spec.axis,
                spec.normalized,
                spec.total.map_or("none".into(), |t| format!("{t:.12e}"))
            )];
            all_notes.extend(notes);
            let table = Table {
                notes: all_notes,
                header,
                rows: (0..spec.grid.len())
                    .map(|i| {
                        let mut row = vec![Cell::Num(spec.grid[i]), Cell::Num(spec.values[i])];
                        row.extend(extra.iter().map(|(_, c)| Cell::Num(c[i])));
                        row
                    })
                    .collect(),
            };
            Ok(table.human())
        }
    }
}

fn axis_label(axis: Axis) -> (&'static str, &'static str) {
    match axis {
        Axis::Energy => ("E", "dΓ/dE"),
        Axis::CosTheta => ("cos θ", "dN/d cos θ"),
        Axis::Phi => ("φ", "dN/dφ"),
        Axis::EnergySolidAngle => ("E", "dΓ/dE dΩ"),
    }
}

fn write_plot(path: &Path, spec: &Spectrum, extra: &[(&str, &[f64])]) -> Result<(), CliError> {
    let (x_label, y_label) = axis_label(spec.axis);
    let mut series: Vec<(&str, &[f64])> = vec![("value", &spec.values)];
    series.extend_from_slice(extra);
    emit(&svg_plot(&spec.grid, &series, x_label, y_label), Some(path))
}

pub fn spectrum(a: SpectrumArgs, command_line: String) -> Result<(), CliError> {
    if a.m.unsigned_abs() > a.l {
        return Err(CliError::Usage(format!("|m| must not exceed l (l={}, m={})", a.l, a.m)));
    }
    if a.l > 0 && a.reduced_me.is_none() {
        return Err(CliError::Usage("--reduced-me re,im is required for l > 0".into()));
    }
    let params = system(&a.common, a.lambda)?;
    let quad = quadrature_config()?;
    let (_, p) = pole(&params, a.n, &RootFindConfig::default())?;

    let spec = match a.axis {
        AxisArg::E => {
            let grid = energy_grid(
                &a.grid,
                (p.e_r - 20.0 * p.gamma_r).max(0.0),
                p.e_r + 20.0 * p.gamma_r,
            )?;
            match a.reduced_me {
                Some(me) => spectrum_de_with(&grid, &p, me)?,
                None => spectrum_de(&grid, &p, &params)?,
            }
        }
        angular => {
            if a.grid.emin.is_some() || a.grid.emax.is_some() {
                return Err(CliError::Usage("--emin/--emax only apply to --axis E".into()));
            }
            let (axis, hi) = match angular {
                AxisArg::Cos => (Axis::CosTheta, 1.0),
                _ => (Axis::Phi, 2.0 * std::f64::consts::PI),
            };
            let lo = if axis == Axis::CosTheta { -1.0 } else { 0.0 };
            let grid = midpoint_grid(lo, hi, a.grid.points)?;
            angular_spectrum(axis, &grid, &p, &params, a.l, a.m, a.reduced_me, &quad)?
        }
    };
    let spec = if a.normalize { normalize(&spec)? } else { spec };

    let notes = vec![units_note(&params), format!("lambda={} n={}", a.lambda, a.n)];
    emit(
        &spectrum_text(&spec, &[], a.common.format, notes)?,
        a.common.output.as_deref(),
    )?;
    if let Some(path) = &a.plot {
        write_plot(path, &spec, &[])?;
    }
    write_manifest(&a.common, &params, vec![PoleSummary::new(&p, None)], &quad, &command_line)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub lambda: f64,
    pub n: usize,
    pub gamma_r: f64,
    pub gamma_energy_route: Option<f64>,
    pub gamma_momentum_route: Option<f64>,
    pub gamma: f64,
    pub gamma_bar: f64,
    pub route_relative_gap: Option<f64>,
}

fn finite(what: &str, values: impl IntoIterator<Item = f64>) -> Result<(), IoError> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(IoError::NonFinite(what.into()))
    }
}

impl JsonDocument for GammaReport {
    const KIND: &'static str = "gamma_report";

    fn check(&self) -> Result<(), IoError> {
        finite(
            "gamma report",
            [self.lambda, self.gamma_r, self.gamma, self.gamma_bar]
                .into_iter()
                .chain(self.gamma_energy_route)
                .chain(self.gamma_momentum_route)
                .chain(self.route_relative_gap),
        )
    }
}

pub fn gamma(a: GammaArgs, command_line: String) -> Result<(), CliError> {
    let params = system(&a.common, a.lambda)?;
    let quad = quadrature_config()?;
    let (_, p) = pole(&params, a.n, &RootFindConfig::default())?;
    let energy = match a.route {
        Route::Energy | Route::Both => Some(total_gamma_energy_route(&p, &params, &quad)?),
        Route::Momentum => None,
    };
    let momentum = match a.route {
        Route::Momentum | Route::Both => Some(decay_constants(&p, &params, &quad)?.gamma),
        Route::Energy => None,
    };
    let gamma = momentum.or(energy).expect("at least one route is evaluated");
    let constants = DecayConstants::new(p.gamma_r, gamma);
    let report = GammaReport {
        lambda: a.lambda,
        n: a.n,
        gamma_r: constants.gamma_r,
        gamma_energy_route: energy,
        gamma_momentum_route: momentum,
        gamma: constants.gamma,
        gamma_bar: constants.gamma_bar,
        route_relative_gap: energy.zip(momentum).map(|(e, m)| (e - m).abs() / m),
    };

    let text = match a.common.format {
        Format::Json => to_json_string(&report)?,
        f => {
            let mut rows = vec![vec![Cell::Text("Gamma_R".into()), Cell::Num(report.gamma_r)]];
            if let Some(e) = energy {
                rows.push(vec![Cell::Text("Gamma_energy_route".into()), Cell::Num(e)]);
            }
            if let Some(m) = momentum {
                rows.push(vec![Cell::Text("Gamma_momentum_route".into()), Cell::Num(m)]);
            }
            rows.push(vec![Cell::Text("Gamma".into()), Cell::Num(report.gamma)]);
            rows.push(vec![Cell::Text("Gamma_bar".into()), Cell::Num(report.gamma_bar)]);
            if let Some(g) = report.route_relative_gap {
                rows.push(vec![Cell::Text("route_relative_gap".into()), Cell::Num(g)]);
            }
            let table = Table {
                notes: vec![
                    units_note(&params),
                    format!("lambda={} n={} Gamma_bar = Gamma_R * Gamma", a.lambda, a.n),
                    "energy integrals run over E in [0, inf)".into(),
                ],
                header: vec!["quantity", "value"],
                rows,
            };
            if f == Format::Csv {
                table.csv()
            } else {
                table.human()
            }
        }
    };
    emit(&text, a.common.output.as_deref())?;
    write_manifest(
        &a.common,
        &params,
        vec![PoleSummary::new(&p, Some(&constants))],
        &quad,
        &command_line,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermiRow {
    pub lambda: f64,
    pub gamma_bar_exact: f64,
    pub gamma_bar_fermi: f64,
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermiReport {
    pub n: usize,
    pub rows: Vec<FermiRow>,
    /// Present when at least two strengths were compared.
    pub gap_strictly_decreasing: Option<bool>,
}

impl JsonDocument for FermiReport {
    const KIND: &'static str = "fermi_comparison";

    fn check(&self) -> Result<(), IoError> {
        finite(
            "fermi comparison",
            self.rows.iter().flat_map(|r| {
                [r.lambda, r.gamma_bar_exact, r.gamma_bar_fermi, r.relative_gap]
            }),
        )
    }
}

pub fn fermi_compare(a: FermiArgs, command_line: String) -> Result<(), CliError> {
    let quad = quadrature_config()?;
    for &l in &a.lambda_list {
        require_repulsive(l)?;
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &lambda in &a.lambda_list {
        let params = system(&a.common, lambda)?;
        let (_, p) = pole(&params, a.n, &RootFindConfig::default())?;
        let constants = decay_constants(&p, &params, &quad)?;
        let fermi = fermi_total_width(&p, &params)?;
        rows.push(FermiRow {
            lambda,
            gamma_bar_exact: constants.gamma_bar,
            gamma_bar_fermi: fermi,
            relative_gap: (constants.gamma_bar - fermi).abs() / constants.gamma_bar,
        });
        summaries.push(PoleSummary::new(&p, Some(&constants)));
    }
    let verdict = (rows.len() >= 2)
        .then(|| rows.windows(2).all(|w| w[1].relative_gap < w[0].relative_gap));
    let report = FermiReport {
        n: a.n,
        rows,
        gap_strictly_decreasing: verdict,
    };

    let text = match a.common.format {
        Format::Json => to_json_string(&report)?,
        f => {
            let mut notes = vec![
                units_note(&system(&a.common, a.lambda_list[0])?),
                format!("n={} relative_gap = |Gamma_bar_exact - Gamma_bar_Fermi| / Gamma_bar_exact", a.n),
            ];
            if let Some(v) = verdict {
                notes.push(format!(
                    "verdict: gap strictly decreasing in listed order: {}",
                    if v { "yes" } else { "no" }
                ));
            }
            let table = Table {
                notes,
                header: vec!["lambda", "Gamma_bar_exact", "Gamma_bar_Fermi", "relative_gap"],
                rows: report
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            Cell::Num(r.lambda),
                            Cell::Num(r.gamma_bar_exact),
                            Cell::Num(r.gamma_bar_fermi),
                            Cell::Num(r.relative_gap),
                        ]
                    })
                    .collect(),
            };
            if f == Format::Csv {
                table.csv()
            } else {
                table.human()
            }
        }
    };
    emit(&text, a.common.output.as_deref())?;
    let params = system(&a.common, a.lambda_list[0])?;
    write_manifest(&a.common, &params, summaries, &quad, &command_line)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedColumn {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposedSpectrum {
    pub spectrum: Spectrum,
    pub columns: Vec<NamedColumn>,
}

impl JsonDocument for DecomposedSpectrum {
    const KIND: &'static str = "decomposed_spectrum";

    fn check(&self) -> Result<(), IoError> {
        self.spectrum.check()?;
        finite("columns", self.columns.iter().flat_map(|c| c.values.iter().copied()))
    }
}

pub fn interfere(a: InterfereArgs, command_line: String) -> Result<(), CliError> {
    if a.n1 == a.n2 {
        return Err(CliError::Usage("--n1 and --n2 must name different poles".into()));
    }
    let params = system(&a.common, a.lambda)?;
    let quad = quadrature_config()?;
    let (poles, _) = pole(&params, a.n1.max(a.n2), &RootFindConfig::default())?;
    let pick = |n: usize| {
        poles
            .iter()
            .find(|p| p.index_n == n)
            .copied()
            .ok_or_else(|| CliError::Usage(format!("pole index must be at least 1, got {n}")))
    };
    let (p1, p2) = (pick(a.n1)?, pick(a.n2)?);
    let sup = Superposition::new(vec![(a.c1, p1), (a.c2, p2)])?;

    let lo = [p1, p2]
        .iter()
        .map(|p| (p.e_r - 20.0 * p.gamma_r).max(0.0))
        .fold(f64::INFINITY, f64::min);
    let hi = [p1, p2]
        .iter()
        .map(|p| p.e_r + 20.0 * p.gamma_r)
        .fold(0.0, f64::max);
    let grid = energy_grid(&a.grid, lo, hi)?;
    let mut terms = interference_decomposition(&sup, &grid, &params)?;
    let meta = vec![(&p1).into(), (&p2).into()];
    let mut spec = Spectrum::new(Axis::Energy, terms.grid.clone(), terms.total.clone(), meta)?;
    if a.normalize {
        let total = spec.integral();
        spec = normalize(&spec)?;
        for col in terms.diagonal.iter_mut().chain([&mut terms.cross]) {
            for v in col.iter_mut() {
                *v /= total;
            }
        }
    }
    let extra: Vec<(&str, &[f64])> = if a.decompose {
        vec![
            ("term1", &terms.diagonal[0]),
            ("term2", &terms.diagonal[1]),
            ("cross", &terms.cross),
        ]
    } else {
        vec![]
    };
    let notes = vec![
        units_note(&params),
        format!(
            "lambda={} n1={} n2={} c1={},{} c2={},{}",
            a.lambda, a.n1, a.n2, a.c1.re, a.c1.im, a.c2.re, a.c2.im
        ),
    ];
    emit(
        &spectrum_text(&spec, &extra, a.common.format, notes)?,
        a.common.output.as_deref(),
    )?;
    if let Some(path) = &a.plot {
        write_plot(path, &spec, &extra)?;
    }
    let summaries = vec![PoleSummary::new(&p1, None), PoleSummary::new(&p2, None)];
    write_manifest(&a.common, &params, summaries, &quad, &command_line)
}
