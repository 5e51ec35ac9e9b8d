//! Spectrum CSV: one `#` header line, a column-name line, then rows.
//!
//! ```text
//! # axis=energy normalized=false poles=E_R:Gamma_R;... total=<v|none> format_version=1
//! x,value
//! 1.0000000000000000e0,2.5000000000000000e-1
//! ```

use std::io::{BufRead, Write};

use super::{IoError, FORMAT_VERSION};
use crate::goldenrule::{Axis, GoldenRuleError, PoleMeta, Spectrum};

fn num(x: f64) -> String {
    // 17 significant digits round-trip every finite double
    format!("{x:.16e}")
}

fn header_line(spec: &Spectrum) -> String {
    let poles: Vec<String> = spec
        .pole_meta
        .iter()
        .map(|m| format!("{}:{}", num(m.e_r), num(m.gamma_r)))
        .collect();
    let total = spec.total.map(num).unwrap_or_else(|| "none".into());
    format!(
        "# axis={} normalized={} poles={} total={} format_version={}\n",
        spec.axis,
        spec.normalized,
        poles.join(";"),
        total,
        FORMAT_VERSION
    )
}

pub fn write_spectrum_csv<W: Write>(spec: &Spectrum, out: W) -> Result<(), IoError> {
    write_spectrum_csv_with_columns(spec, &[], out)
}

/// Writes `spec` followed by extra named columns of the same length.
pub fn write_spectrum_csv_with_columns<W: Write>(
    spec: &Spectrum,
    extra: &[(&str, &[f64])],
    mut out: W,
) -> Result<(), IoError> {
    spec.validate().map_err(to_io)?;
    for (name, col) in extra {
        if col.len() != spec.grid.len() {
            return Err(IoError::Invalid(format!(
                "column '{name}' has {} entries for {} rows",
                col.len(),
                spec.grid.len()
            )));
        }
        if name.is_empty() || name.contains([',', '\n', '\r']) {
            return Err(IoError::Invalid(format!("bad column name '{name}'")));
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(IoError::NonFinite(format!("column '{name}'")));
        }
    }

    let mut text = header_line(spec);
    text.push_str("x,value");
    for (name, _) in extra {
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for (i, (x, v)) in spec.grid.iter().zip(&spec.values).enumerate() {
        text.push_str(&num(*x));
        text.push(',');
        text.push_str(&num(*v));
        for (_, col) in extra {
            text.push(',');
            text.push_str(&num(col[i]));
        }
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn to_io(e: GoldenRuleError) -> IoError {
    match e {
        GoldenRuleError::InvalidGrid(m) => IoError::InvalidGrid(m),
        other => IoError::Invalid(other.to_string()),
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> IoError {
    IoError::ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn parse_f64(text: &str, line: usize, column: usize) -> Result<f64, IoError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_err(line, column, format!("'{text}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, column, format!("'{text}' is not finite")));
    }
    Ok(v)
}

struct Header {
    axis: Axis,
    normalized: bool,
    poles: Vec<PoleMeta>,
    total: Option<f64>,
}

fn parse_header(line: &str) -> Result<Header, IoError> {
    let body = line
        .strip_prefix("# ")
        .ok_or_else(|| parse_err(1, 1, "header must start with '# '"))?;
    let (mut axis, mut normalized, mut poles, mut total, mut version) =
        (None, None, None, None, None);
    for token in body.split(' ').filter(|t| !t.is_empty()) {
        let column = line.find(token).map_or(1, |i| i + 1);
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(1, column, format!("expected key=value, got '{token}'")))?;
        match key {
            "axis" => axis = Some(value.parse::<Axis>().map_err(|m| parse_err(1, column, m))?),
            "normalized" => {
                normalized = Some(value.parse::<bool>().map_err(|_| {
                    parse_err(1, column, format!("normalized must be true or false, got '{value}'"))
                })?)
            }
            "poles" => {
                let mut list = Vec::new();
                for pair in value.split(';').filter(|p| !p.is_empty()) {
                    let (e, g) = pair
                        .split_once(':')
                        .ok_or_else(|| parse_err(1, column, format!("bad pole '{pair}'")))?;
                    list.push(PoleMeta {
                        e_r: parse_f64(e, 1, column)?,
                        gamma_r: parse_f64(g, 1, column)?,
                    });
                }
                poles = Some(list);
            }
            "total" => {
                total = Some(match value {
                    "none" => None,
                    v => Some(parse_f64(v, 1, column)?),
                })
            }
            "format_version" => {
                let v: u64 = value
                    .parse()
                    .map_err(|_| parse_err(1, column, format!("bad format_version '{value}'")))?;
                if v != FORMAT_VERSION as u64 {
                    return Err(IoError::UnsupportedVersion(v));
                }
                version = Some(v);
            }
            other => return Err(parse_err(1, column, format!("unknown header key '{other}'"))),
        }
    }
    let missing = |k: &str| parse_err(1, 1, format!("header is missing '{k}'"));
    version.ok_or_else(|| missing("format_version"))?;
    Ok(Header {
        axis: axis.ok_or_else(|| missing("axis"))?,
        normalized: normalized.ok_or_else(|| missing("normalized"))?,
        poles: poles.ok_or_else(|| missing("poles"))?,
        total: total.ok_or_else(|| missing("total"))?,
    })
}

/// Reads a spectrum written by [`write_spectrum_csv`]. Extra columns are
/// checked for being numeric and otherwise ignored.
pub fn read_spectrum_csv<R: BufRead>(input: R) -> Result<Spectrum, IoError> {
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| parse_err(1, 1, "empty file"))??;
    let header = parse_header(&first)?;
    let names = lines
        .next()
        .ok_or_else(|| parse_err(2, 1, "missing column header"))??;
    let columns: Vec<&str> = names.split(',').collect();
    if columns.len() < 2 || columns[0] != "x" || columns[1] != "value" {
        return Err(parse_err(2, 1, "column header must begin with 'x,value'"));
    }

    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line_no = i + 3;
        if line.is_empty() {
            return Err(parse_err(line_no, 1, "empty row"));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(parse_err(
                line_no,
                1,
                format!("expected {} fields, found {}", columns.len(), fields.len()),
            ));
        }
        for (c, field) in fields.iter().enumerate().skip(2) {
            parse_f64(field, line_no, c + 1)?;
        }
        grid.push(parse_f64(fields[0], line_no, 1)?);
        values.push(parse_f64(fields[1], line_no, 2)?);
    }

    let spec = Spectrum {
        axis: header.axis,
        grid,
        values,
        normalized: header.normalized,
        pole_meta: header.poles,
        total: header.total,
    };
    spec.validate().map_err(to_io)?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Spectrum {
        Spectrum::new(
            Axis::Energy,
            vec![0.1, 0.2, 0.30000000000000004],
            vec![1.0 / 3.0, 2.0, 1e-300],
            vec![PoleMeta { e_r: 0.2, gamma_r: 0.05 }],
        )
        .unwrap()
    }

    fn write(spec: &Spectrum) -> String {
        let mut buf = Vec::new();
        write_spectrum_csv(spec, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn three_points_round_trip() {
        let s = small();
        let text = write(&s);
        assert_eq!(read_spectrum_csv(text.as_bytes()).unwrap(), s);
        assert!(!text.contains('\r'));
        assert!(text.starts_with("# axis=energy normalized=false poles="));
    }

    #[test]
    fn normalized_flag_survives() {
        let s = crate::goldenrule::normalize(&small()).unwrap();
        let back = read_spectrum_csv(write(&s).as_bytes()).unwrap();
        assert!(back.normalized);
        assert_eq!(back, s);
    }

    #[test]
    fn line_count_is_rows_plus_two() {
        let grid: Vec<f64> = (0..2001).map(|i| 1.0 + i as f64).collect();
        let values = vec![1.0; 2001];
        let s = Spectrum::new(Axis::Energy, grid, values, vec![]).unwrap();
        assert_eq!(write(&s).lines().count(), 2003);
    }

    #[test]
    fn non_monotone_grid_is_rejected() {
        let text = write(&small()).replace("2.0000000000000001e-1,", "5.0000000000000000e-1,");
        assert!(matches!(
            read_spectrum_csv(text.as_bytes()),
            Err(IoError::InvalidGrid(_))
        ));
    }

    #[test]
    fn garbage_row_names_its_line() {
        let mut text = write(&small());
        text.push_str("1.0,abc\n");
        match read_spectrum_csv(text.as_bytes()) {
            Err(IoError::ParseError { line, column, .. }) => {
                assert_eq!((line, column), (6, 2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extra_columns() {
        let s = small();
        let a = [1.0, 2.0, 3.0];
        let mut buf = Vec::new();
        write_spectrum_csv_with_columns(&s, &[("term1", &a)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap() == "x,value,term1");
        assert_eq!(read_spectrum_csv(text.as_bytes()).unwrap(), s);
        assert!(write_spectrum_csv_with_columns(&s, &[("t", &a[..2])], Vec::new()).is_err());
    }
}
