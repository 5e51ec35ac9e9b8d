use proptest::collection::vec;
use proptest::prelude::*;

use reskit::goldenrule::{normalize, PoleMeta};
use reskit::io::{
    from_json_str, read_spectrum_csv, to_json_string, write_spectrum_csv, IoError, PoleSummary,
    RunManifest,
};
use reskit::{
    Axis, Complex64, DecayConstants, QuadratureConfig, ResonancePole, Spectrum, SystemParams,
};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1e-6..1e-6f64, proptest::num::f64::NORMAL]
}

fn complex() -> impl Strategy<Value = Complex64> {
    (finite(), finite()).prop_map(|(re, im)| Complex64::new(re, im))
}

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::Energy), Just(Axis::CosTheta), Just(Axis::Phi)]
}

fn spectrum() -> impl Strategy<Value = Spectrum> {
    (
        axis(),
        -1e3..1e3f64,
        vec((1e-6..10.0f64, 1e-9..1e6f64), 2..60),
        vec((finite(), finite()), 0..3),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(axis, start, cells, meta, normalized, with_total)| {
            let mut grid = Vec::with_capacity(cells.len());
            let mut x = start;
            for (step, _) in &cells {
                grid.push(x);
                x += step;
            }
            let values = cells.iter().map(|c| c.1).collect();
            let meta = meta.into_iter().map(|(e_r, gamma_r)| PoleMeta { e_r, gamma_r }).collect();
            let mut s = Spectrum::new(axis, grid, values, meta).unwrap();
            if normalized {
                s = normalize(&s).unwrap();
            }
            if !with_total {
                s.total = None;
            }
            s
        })
}

fn pole() -> impl Strategy<Value = ResonancePole> {
    (complex(), complex(), complex(), finite(), finite(), complex(), 0.0..1e-6f64, 1..100usize)
        .prop_map(|(k, p_res, e_res, e_r, gamma_r, n_res, residual, index_n)| ResonancePole {
            k,
            p_res,
            e_res,
            e_r,
            gamma_r,
            n_res,
            residual,
            index_n,
        })
}

fn manifest() -> impl Strategy<Value = RunManifest> {
    (
        "[0-9]\\.[0-9]{1,2}\\.[0-9]",
        "\\PC{0,30}",
        (1e-3..1e3f64, 1e-3..1e3f64, 1e-3..1e3f64, 1e-3..1e6f64),
        vec((pole(), proptest::option::of((0.0..1e6f64, 0.0..1e6f64))), 0..4),
        (1e-14..1e-3f64, 1e-16..1e-6f64, 1..100_000usize, proptest::option::of(1e-3..10.0f64)),
        "\\PC{0,80}",
    )
        .prop_map(|(tool_version, created_utc, (mass, hbar, radius_a, lambda), poles, q, command_line)| {
            RunManifest {
                tool_version,
                created_utc,
                params: SystemParams { mass, hbar, radius_a, lambda },
                pole_summaries: poles
                    .iter()
                    .map(|(p, c)| {
                        let constants = c.map(|(g_r, g)| DecayConstants::new(g_r, g));
                        PoleSummary::new(p, constants.as_ref())
                    })
                    .collect(),
                quadrature_settings: QuadratureConfig {
                    relative_tolerance: q.0,
                    absolute_tolerance: q.1,
                    max_subdivisions: q.2,
                    max_panel_width: q.3,
                },
                command_line,
            }
        })
}

fn csv_round_trip(s: &Spectrum) -> Spectrum {
    let mut buf = Vec::new();
    write_spectrum_csv(s, &mut buf).unwrap();
    read_spectrum_csv(buf.as_slice()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn spectrum_csv_round_trip(s in spectrum()) {
        prop_assert_eq!(csv_round_trip(&s), s);
    }

    #[test]
    fn spectrum_json_round_trip(s in spectrum()) {
        let text = to_json_string(&s).unwrap();
        prop_assert_eq!(from_json_str::<Spectrum>(&text).unwrap(), s);
    }

    #[test]
    fn manifest_json_round_trip(m in manifest()) {
        let text = to_json_string(&m).unwrap();
        prop_assert_eq!(from_json_str::<RunManifest>(&text).unwrap(), m);
    }

    #[test]
    fn pole_records_json_round_trip(poles in vec(pole(), 0..6)) {
        let text = to_json_string(&poles).unwrap();
        prop_assert_eq!(from_json_str::<Vec<ResonancePole>>(&text).unwrap(), poles);
    }

    #[test]
    fn serialisation_is_deterministic(s in spectrum()) {
        prop_assert_eq!(to_json_string(&s).unwrap(), to_json_string(&s.clone()).unwrap());
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_spectrum_csv(&s, &mut a).unwrap();
        write_spectrum_csv(&s, &mut b).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn wrong_kind_is_rejected() {
    let poles: Vec<ResonancePole> = Vec::new();
    let text = to_json_string(&poles).unwrap();
    assert!(matches!(from_json_str::<Spectrum>(&text), Err(IoError::WrongKind { .. })));
}

#[test]
fn future_version_is_rejected() {
    let poles: Vec<ResonancePole> = Vec::new();
    let text = to_json_string(&poles).unwrap().replace("\"format_version\": 1", "\"format_version\": 99");
    assert!(matches!(
        from_json_str::<Vec<ResonancePole>>(&text),
        Err(IoError::UnsupportedVersion(99))
    ));
}

#[test]
fn malformed_csv_reports_position() {
    let text = "# axis=energy normalized=false poles= total=none format_version=1\nx,value\n0.0,1.0\n1.0,abc\n";
    match read_spectrum_csv(text.as_bytes()) {
        Err(IoError::ParseError { line, column, .. }) => {
            assert_eq!(line, 4);
            assert_eq!(column, 2);
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn unsorted_csv_grid_is_rejected() {
    let text = "# axis=energy normalized=false poles= total=none format_version=1\nx,value\n1.0,1.0\n0.5,1.0\n";
    assert!(matches!(read_spectrum_csv(text.as_bytes()), Err(IoError::InvalidGrid(_))));
}
