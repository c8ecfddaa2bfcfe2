use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::{HarnessError, SweepParam, SweepResult, SweepRow};

const HEADER: [&str; 6] = [
    "sweep_param",
    "sweep_value",
    "estimator",
    "rmse_m",
    "failures",
    "mean_solve_ms",
];

/// Decimal rendering with six significant digits and no trailing zeros.
pub(crate) fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    // The exponent after rounding to six digits fixes the decimal count.
    let sci = format!("{v:.5e}");
    let exp: i32 = sci
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (5 - exp).max(0) as usize;
    let mut s = if exp > 5 {
        let unit = 10f64.powi(exp - 5);
        format!("{:.0}", (v / unit).round() * unit)
    } else {
        format!("{v:.decimals$}")
    };
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn record(param: SweepParam, r: &SweepRow) -> [String; 6] {
    [
        param.name().to_string(),
        sig6(r.value),
        r.estimator.clone(),
        sig6(r.rmse_m),
        r.failures.to_string(),
        r.mean_solve_ms.map(sig6).unwrap_or_default(),
    ]
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut w = writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for r in &result.rows {
        w.write_record(record(result.param, r))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Writes one row per (sweep value, estimator). `mean_solve_ms` is left
/// empty when timing was not recorded.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, to_csv_string(result)).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct CsvRow {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub estimator: String,
    pub rmse_m: f64,
    pub failures: usize,
    pub mean_solve_ms: Option<f64>,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| HarnessError::Parse(e.to_string()))?
        .clone();
    if headers.iter().ne(HEADER) {
        return Err(HarnessError::Parse(format!(
            "unexpected header {headers:?}"
        )));
    }
    rdr.deserialize()
        .map(|r| r.map_err(|e| HarnessError::Parse(e.to_string())))
        .collect()
}

/// Whitespace-separated `value rmse` blocks, one per estimator, separated
/// by two blank lines so gnuplot can address them with `index`.
pub fn write_gnuplot(result: &SweepResult, path: &Path) -> Result<(), HarnessError> {
    let mut names: Vec<&str> = Vec::new();
    for r in &result.rows {
        if !names.contains(&r.estimator.as_str()) {
            names.push(&r.estimator);
        }
    }
    let mut out = String::new();
    for (i, name) in names.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# {name}: {} rmse_m", result.param);
        for r in result.rows.iter().filter(|r| r.estimator == *name) {
            let _ = writeln!(out, "{} {}", sig6(r.value), sig6(r.rmse_m));
        }
    }
    std::fs::write(path, out).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}
