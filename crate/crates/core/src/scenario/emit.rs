//! Deterministic CSV/JSON writers. Reals are printed with 17 significant
//! digits (`{:.16e}`), which round-trips every `f64` exactly; files are
//! written to a temporary sibling and renamed into place.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use super::RunReport;
use crate::error::{Error, Result};
use crate::method::FarFieldPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Usage(format!("format must be csv or json, got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Int(Vec<usize>),
    Real(Vec<f64>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Self::Int(v) => v.len(),
            Self::Real(v) => v.len(),
        }
    }
}

/// Named columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, Column)>,
}

impl Table {
    pub fn new(columns: Vec<(&str, Column)>) -> Result<Self> {
        let n = columns.first().map_or(0, |c| c.1.len());
        if columns.iter().any(|c| c.1.len() != n) {
            return Err(Error::Shape("table columns differ in length".into()));
        }
        Ok(Self { columns: columns.into_iter().map(|(k, c)| (k.to_string(), c)).collect() })
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }

    pub fn pattern(p: &FarFieldPattern) -> Self {
        Self {
            columns: vec![
                ("theta_rad".into(), Column::Real(p.angles.clone())),
                ("re_amp".into(), Column::Real(p.amplitude.iter().map(|a| a.re).collect())),
                ("im_amp".into(), Column::Real(p.amplitude.iter().map(|a| a.im).collect())),
                ("abs_amp".into(), Column::Real(p.magnitudes())),
            ],
        }
    }

    pub fn profile(profile: &[(f64, f64)]) -> Self {
        Self {
            columns: vec![
                ("distance".into(), Column::Real(profile.iter().map(|p| p.0).collect())),
                ("abs_phi".into(), Column::Real(profile.iter().map(|p| p.1).collect())),
            ],
        }
    }

    /// Steps are numbered from 1.
    pub fn history(residuals: &[f64]) -> Self {
        Self {
            columns: vec![
                ("step".into(), Column::Int((1..=residuals.len()).collect())),
                ("residual".into(), Column::Real(residuals.to_vec())),
            ],
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| c.0.as_str()).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in 0..self.rows() {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|(_, c)| match c {
                    Column::Int(v) => v[r].to_string(),
                    Column::Real(v) => real(v[r]),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"column": [values...], ...}` in column order.
    pub fn to_json(&self) -> Result<String> {
        let mut map = serde_json::Map::new();
        for (name, c) in &self.columns {
            let v = match c {
                Column::Int(v) => serde_json::to_value(v),
                Column::Real(v) => serde_json::to_value(v),
            }
            .map_err(|e| Error::Shape(e.to_string()))?;
            map.insert(name.clone(), v);
        }
        to_json_string(&map)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }
}

/// 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(real(value).as_bytes())
    }
}

/// Serialise with 17-significant-digit reals.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser).map_err(|e| Error::Shape(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Shape(e.to_string()))
}

/// Write `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn emit_table(table: &Table, format: Format, path: &Path) -> Result<()> {
    write_atomic(path, &table.render(format)?)
}

pub fn emit_pattern(pattern: &FarFieldPattern, format: Format, path: &Path) -> Result<()> {
    emit_table(&Table::pattern(pattern), format, path)
}

pub fn emit_profile(profile: &[(f64, f64)], format: Format, path: &Path) -> Result<()> {
    emit_table(&Table::profile(profile), format, path)
}

pub fn emit_history(residuals: &[f64], format: Format, path: &Path) -> Result<()> {
    emit_table(&Table::history(residuals), format, path)
}

pub fn render_report(report: &RunReport, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json_string(report),
        Format::Csv => {
            let mut out = String::from("metric,value,bound,status\n");
            let mut row = |name: &str, value: String, bound: String, status: &str| {
                out.push_str(&format!("{name},{value},{bound},{status}\n"));
            };
            for (k, v) in &report.residuals {
                row(&format!("residual_{k}"), real(*v), String::new(), "info");
            }
            if let Some(e) = report.epsilon {
                row("epsilon", real(e), String::new(), "info");
            }
            for m in &report.metrics {
                row(&m.name, real(m.value), m.bound.describe(), m.status());
            }
            row("wall_clock_s", real(report.wall_clock_s), String::new(), "info");
            row("passed", (report.passed() as u8).to_string(), String::new(), if report.passed() { "pass" } else { "fail" });
            Ok(out)
        }
    }
}

pub fn emit_report(report: &RunReport, format: Format, path: &Path) -> Result<()> {
    write_atomic(path, &render_report(report, format)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn empty_pattern_is_header_only() {
        let p = FarFieldPattern::new(vec![], vec![]).unwrap();
        assert_eq!(Table::pattern(&p).to_csv(), "theta_rad,re_amp,im_amp,abs_amp\n");
        assert_eq!(Table::profile(&[]).to_csv(), "distance,abs_phi\n");
        assert_eq!(Table::history(&[]).to_csv(), "step,residual\n");
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(1.0 / 3.0).len(), "3.3333333333333331e-1".len());
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let amps: Vec<Complex64> = (0..7).map(|i| Complex64::new((i as f64).sin() / 3.0, -(i as f64 + 0.1).ln())).collect();
        let angles: Vec<f64> = (0..7).map(|i| i as f64 * 0.37 + 1e-3).collect();
        let p = FarFieldPattern::new(angles.clone(), amps.clone()).unwrap();
        let text = Table::pattern(&p).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let back = |k: &str| -> Vec<f64> { v[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
        assert_eq!(back("theta_rad"), angles);
        assert_eq!(back("re_amp"), amps.iter().map(|a| a.re).collect::<Vec<_>>());
        assert_eq!(back("im_amp"), amps.iter().map(|a| a.im).collect::<Vec<_>>());
    }

    #[test]
    fn atomic_write_and_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        emit_history(&[1.0, 0.5], Format::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "step,residual\n1,1.0000000000000000e0\n2,5.0000000000000000e-1\n");
        let bad = dir.path().join("missing").join("x.csv");
        match emit_history(&[1.0], Format::Csv, &bad) {
            Err(Error::Io { path, .. }) => assert_eq!(path, bad),
            other => panic!("{other:?}"),
        }
    }
}
