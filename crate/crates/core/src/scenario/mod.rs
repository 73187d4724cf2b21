//! Named experiments driven by a flat key-value configuration.
//!
//! Every scenario is fully determined by its configuration: the data files it
//! writes are byte-identical across runs. The accompanying report carries the
//! resolved configuration, boundary residuals, the ε diagnostic, oracle
//! comparisons with their thresholds, warnings and wall-clock time.

mod config;
mod emit;
mod runners;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};

pub use config::{parse_angle, parse_real, Config, SolverChoice};
pub use emit::{
    emit_history, emit_pattern, emit_profile, emit_report, emit_table, real, render_report, to_json_string,
    write_atomic, Column, Format, Table,
};

use config::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioName {
    Sphere,
    Strip,
    Slit,
    Spheroid,
    Born,
    KernelProfile,
    RiemannDecay,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 7] = [
        Self::Sphere,
        Self::Strip,
        Self::Slit,
        Self::Spheroid,
        Self::Born,
        Self::KernelProfile,
        Self::RiemannDecay,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sphere => "sphere",
            Self::Strip => "strip",
            Self::Slit => "slit",
            Self::Spheroid => "spheroid",
            Self::Born => "born",
            Self::KernelProfile => "kernel-profile",
            Self::RiemannDecay => "riemann-decay",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: ScenarioName,
    pub params: Config,
}

impl Scenario {
    pub fn new(name: ScenarioName) -> Self {
        Self { name, params: Config::default() }
    }

    pub fn with(mut self, key: &str, value: &str) -> Self {
        self.params.set(key, value);
        self
    }
}

/// Acceptance bound attached to a metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Reported only.
    Info,
    /// Passes when `value ≤ bound`.
    Max(f64),
    /// Passes when `value ≥ bound`.
    Min(f64),
}

impl Bound {
    pub fn describe(&self) -> String {
        match self {
            Self::Info => String::new(),
            Self::Max(t) => format!("<={}", real(*t)),
            Self::Min(t) => format!(">={}", real(*t)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
}

impl Metric {
    /// `None` for informational metrics.
    pub fn passed(&self) -> Option<bool> {
        match self.bound {
            Bound::Info => None,
            Bound::Max(t) => Some(self.value <= t),
            Bound::Min(t) => Some(self.value >= t),
        }
    }

    pub fn status(&self) -> &'static str {
        match self.passed() {
            None => "info",
            Some(true) => "pass",
            Some(false) => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub config: BTreeMap<String, String>,
    /// Normalised boundary residual per solver.
    pub residuals: BTreeMap<String, f64>,
    pub epsilon: Option<f64>,
    pub metrics: Vec<Metric>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub files: Vec<String>,
    pub wall_clock_s: f64,
}

impl RunReport {
    pub(crate) fn new(scenario: ScenarioName, config: BTreeMap<String, String>) -> Self {
        Self {
            scenario: scenario.to_string(),
            config,
            residuals: BTreeMap::new(),
            epsilon: None,
            metrics: Vec::new(),
            warnings: Vec::new(),
            notes: Vec::new(),
            files: Vec::new(),
            wall_clock_s: 0.0,
        }
    }

    pub(crate) fn push(&mut self, name: &str, value: f64, bound: Bound) {
        self.metrics.push(Metric { name: name.to_string(), value, bound });
    }

    /// A failed oracle is recorded as a failing metric.
    pub(crate) fn oracle_failure(&mut self, oracle: &str, err: &Error) {
        self.warnings.push(format!("{oracle} oracle failed: {err}"));
        self.push(&format!("{oracle}_oracle"), f64::NAN, Bound::Min(0.0));
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.metric(name).map(|m| m.value)
    }

    /// All thresholded metrics pass.
    pub fn passed(&self) -> bool {
        self.metrics.iter().all(|m| m.passed() != Some(false))
    }
}

/// Report plus the data tables; the first table is the scenario's main output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: RunReport,
    pub tables: Vec<(String, Table)>,
}

fn sibling(path: &Path, tag: &str, format: Format) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.{}", format.extension()))
}

/// Run a scenario. With `out` set, the main table goes to `out`, the others to
/// `<stem>.<table>.<ext>` beside it and the report to `<stem>.report.<ext>`.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput> {
    let start = Instant::now();
    let p = Params::new(&scenario.params);
    let out = p.text("out", "");
    let format: Format = p.choice("format", "csv", &["csv", "json"])?.parse()?;
    let mut output = match scenario.name {
        ScenarioName::Sphere => runners::sphere(p)?,
        ScenarioName::Strip => runners::strip(p, false)?,
        ScenarioName::Slit => runners::strip(p, true)?,
        ScenarioName::Spheroid => runners::spheroid(p)?,
        ScenarioName::Born => runners::born(p)?,
        ScenarioName::KernelProfile => runners::kernel_profile(p)?,
        ScenarioName::RiemannDecay => runners::riemann_decay(p)?,
    };
    if !out.is_empty() {
        let path = PathBuf::from(&out);
        for (i, (tag, table)) in output.tables.iter().enumerate() {
            let target = if i == 0 { path.clone() } else { sibling(&path, tag, format) };
            emit_table(table, format, &target)?;
            output.report.files.push(target.display().to_string());
        }
        let report_path = sibling(&path, "report", format);
        output.report.files.push(report_path.display().to_string());
        output.report.wall_clock_s = start.elapsed().as_secs_f64();
        emit_report(&output.report, format, &report_path)?;
    } else {
        output.report.wall_clock_s = start.elapsed().as_secs_f64();
    }
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in ScenarioName::ALL {
            assert_eq!(n.as_str().parse::<ScenarioName>().unwrap(), n);
        }
        assert!(matches!("cube".parse::<ScenarioName>(), Err(Error::Usage(_))));
    }

    #[test]
    fn unknown_key_is_rejected_before_running() {
        let sc = Scenario::new(ScenarioName::Sphere).with("radiuss", "2");
        match run_scenario(&sc) {
            Err(Error::Usage(m)) => assert!(m.contains("radiuss"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn metric_status() {
        let m = |v, b| Metric { name: "x".into(), value: v, bound: b };
        assert_eq!(m(1.0, Bound::Max(2.0)).status(), "pass");
        assert_eq!(m(3.0, Bound::Max(2.0)).status(), "fail");
        assert_eq!(m(f64::NAN, Bound::Min(0.0)).status(), "fail");
        assert_eq!(m(3.0, Bound::Info).status(), "info");
    }

    #[test]
    fn sphere_modes_diagonal_matches_galerkin() {
        let out = run_scenario(&Scenario::new(ScenarioName::Sphere)).unwrap();
        let r = &out.report;
        assert!(r.passed(), "{r:#?}");
        assert!((r.residuals["diagonal"] - r.residuals["galerkin"]).abs() <= 1e-8);
        assert_eq!(out.tables[0].1.rows(), 181);
    }

    #[test]
    fn kernel_profile_rows_match_nodes() {
        let out = run_scenario(&Scenario::new(ScenarioName::KernelProfile).with("quad_resolution", "40")).unwrap();
        assert_eq!(out.tables[0].1.rows(), 40);
        assert!(out.report.passed(), "{:#?}", out.report);
    }
}
