//! Built-in invariant checks on one pole.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use reskit::deltashell::{
    closed_form_norm, continuation_norm, count_condition_zeros, resonance_condition,
    search_rectangle,
};
use reskit::goldenrule::{
    basis_equivalence_check, default_energy_grid, fermi_golden_rule_box,
    interference_decomposition, normalize, spectrum_de, total_gamma_energy_route,
    total_gamma_momentum_route, BoxConfig,
};
use reskit::io::{to_json_string, IoError, JsonDocument, PoleSummary};
use reskit::{
    QuadratureConfig, ResonancePole, RootFindConfig, Superposition, SystemParams,
};

use crate::args::{CheckArgs, Format};
use crate::commands::{pole, quadrature_config, system, write_manifest};
use crate::output::{emit, Cell, Table};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Measured deviation; absent when the computation itself failed.
    pub value: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub lambda: f64,
    pub n: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl JsonDocument for CheckReport {
    const KIND: &'static str = "check_report";

    fn check(&self) -> Result<(), IoError> {
        let ok = self.lambda.is_finite()
            && self
                .checks
                .iter()
                .all(|c| c.threshold.is_finite() && c.value.map_or(true, f64::is_finite));
        if ok {
            Ok(())
        } else {
            Err(IoError::NonFinite("check report".into()))
        }
    }
}

struct Setup<'a> {
    params: SystemParams,
    pole: ResonancePole,
    next: ResonancePole,
    quad: &'a QuadratureConfig,
}

type Measure = fn(&Setup) -> Result<(f64, String), String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn pole_residual(s: &Setup) -> Result<(f64, String), String> {
    Ok((s.pole.residual, format!("k = {}", s.pole.k)))
}

fn argument_principle(s: &Setup) -> Result<(f64, String), String> {
    let n = s.pole.index_n;
    let found = [s.pole, s.next];
    let rect = search_rectangle(s.params.lambda, n + 1, &found);
    let w = count_condition_zeros(s.params.lambda, &rect, &QuadratureConfig::default())
        .map_err(|e| e.to_string())?;
    Ok((
        (w.count - (n as i64 + 1)).abs() as f64,
        format!("winding {} for {} poles", w.count, n + 1),
    ))
}

fn mirror_root(s: &Setup) -> Result<(f64, String), String> {
    let r = resonance_condition(-s.pole.k.conj(), s.params.lambda).map_err(|e| e.to_string())?;
    Ok((r.norm(), "|f(-conj k)|".into()))
}

fn norm_at_pole(s: &Setup) -> Result<(f64, String), String> {
    let v = closed_form_norm(s.pole.p_res, &s.pole, &s.params);
    Ok(((v - 1.0).norm(), format!("continued norm = {v}")))
}

fn closed_form_vs_quadrature(s: &Setup) -> Result<(f64, String), String> {
    let scale = s.params.momentum_scale();
    let mut worst = 0.0f64;
    for q in [Complex64::new(2.0, 0.5), Complex64::new(3.0, 0.2), s.pole.k.conj()] {
        let q = q * scale;
        let num = continuation_norm(q, &s.pole, &s.params, &s.quad.with_relative_tolerance(1e-12))
            .map_err(|e| e.to_string())?;
        let closed = closed_form_norm(q, &s.pole, &s.params);
        worst = worst.max((num - closed).norm() / closed.norm());
    }
    Ok((worst, "largest relative difference over 3 points with Im q > 0".into()))
}

fn route_equivalence(s: &Setup) -> Result<(f64, String), String> {
    let e = total_gamma_energy_route(&s.pole, &s.params, s.quad).map_err(|e| e.to_string())?;
    let m = total_gamma_momentum_route(&s.pole, &s.params, s.quad).map_err(|e| e.to_string())?;
    Ok((rel(e, m), format!("Gamma energy = {e:.12e}, momentum = {m:.12e}")))
}

fn basis_equivalence(s: &Setup) -> Result<(f64, String), String> {
    let r = basis_equivalence_check(&s.pole, &s.params, s.quad).map_err(|e| e.to_string())?;
    Ok((
        r.relative_gap,
        format!(
            "3-D {:.12e}, partial wave {:.12e}",
            r.gamma_momentum_basis, r.gamma_partial_wave
        ),
    ))
}

fn box_invariance(s: &Setup) -> Result<(f64, String), String> {
    let a = s.params.radius_a;
    let values = [1.0, 2.0, 10.0]
        .iter()
        .map(|f| {
            let b = BoxConfig::new(f * a).map_err(|e| e.to_string())?;
            fermi_golden_rule_box(s.pole.e_r, &s.pole, &b, &s.params).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let worst = values[1..].iter().map(|v| rel(*v, values[0])).fold(0.0, f64::max);
    Ok((worst, "L in {a, 2a, 10a} at E = E_R".into()))
}

fn interference(s: &Setup) -> Result<(f64, String), String> {
    let one = Complex64::new(1.0, 0.0);
    let sup = Superposition::new(vec![(one, s.pole), (one, s.next)]).map_err(|e| e.to_string())?;
    let grid = default_energy_grid(&s.next).map_err(|e| e.to_string())?;
    let t = interference_decomposition(&sup, &grid, &s.params).map_err(|e| e.to_string())?;
    let worst = t
        .total
        .iter()
        .zip(&t.direct)
        .map(|(a, b)| (a - b).abs() / b.abs())
        .fold(0.0, f64::max);
    Ok((worst, "expanded against direct modulus square".into()))
}

fn normalization(s: &Setup) -> Result<(f64, String), String> {
    let grid = default_energy_grid(&s.pole).map_err(|e| e.to_string())?;
    let spec = spectrum_de(&grid, &s.pole, &s.params).map_err(|e| e.to_string())?;
    let n = normalize(&spec).map_err(|e| e.to_string())?;
    Ok(((n.integral() - 1.0).abs(), "trapezoid integral of normalised dΓ/dE".into()))
}

const CHECKS: [(&str, f64, Measure); 10] = [
    ("pole_residual", 1e-12, pole_residual),
    ("argument_principle_count", 0.5, argument_principle),
    ("mirror_root_residual", 1e-10, mirror_root),
    ("continuation_norm_at_pole", 1e-10, norm_at_pole),
    ("closed_form_vs_quadrature", 1e-8, closed_form_vs_quadrature),
    ("route_equivalence", 1e-6, route_equivalence),
    ("basis_equivalence", 1e-6, basis_equivalence),
    ("box_invariance", 1e-14, box_invariance),
    ("interference_consistency", 1e-12, interference),
    ("normalization", 1e-6, normalization),
];

pub fn run(a: CheckArgs, command_line: String) -> Result<(), CliError> {
    if let Some(t) = a.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("--tolerance must be >= 0, got {t}")));
        }
    }
    let params = system(&a.common, a.lambda)?;
    let quad = quadrature_config()?;
    let (poles, p) = pole(&params, a.n + 1, &RootFindConfig::default())?;
    let setup = Setup {
        params,
        pole: poles[a.n - 1],
        next: p,
        quad: &quad,
    };

    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .map(|(name, default, measure)| {
            let threshold = a.tolerance.unwrap_or(*default);
            match measure(&setup) {
                Ok((value, detail)) => CheckResult {
                    name: name.to_string(),
                    value: Some(value),
                    threshold,
                    passed: value < threshold,
                    detail,
                },
                Err(e) => CheckResult {
                    name: name.to_string(),
                    value: None,
                    threshold,
                    passed: false,
                    detail: e,
                },
            }
        })
        .collect();
    let report = CheckReport {
        lambda: a.lambda,
        n: a.n,
        passed: checks.iter().all(|c| c.passed),
        checks,
    };

    let format = if a.json { Format::Json } else { a.common.format };
    let text = match format {
        Format::Json => to_json_string(&report)?,
        f => {
            let table = Table {
                notes: vec![format!(
                    "lambda={} n={} overall={}",
                    a.lambda,
                    a.n,
                    if report.passed { "PASS" } else { "FAIL" }
                )],
                header: vec!["check", "status", "value", "threshold", "detail"],
                rows: report
                    .checks
                    .iter()
                    .map(|c| {
                        vec![
                            Cell::Text(c.name.clone()),
                            Cell::Text(if c.passed { "PASS" } else { "FAIL" }.into()),
                            c.value.map_or(Cell::Text("error".into()), Cell::Num),
                            Cell::Num(c.threshold),
                            Cell::Text(c.detail.clone()),
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
    write_manifest(
        &a.common,
        &setup.params,
        vec![PoleSummary::new(&setup.pole, None)],
        &quad,
        &command_line,
    )?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}
