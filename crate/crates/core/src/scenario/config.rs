use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::method::BoundaryCondition;

/// Flat `key = value` configuration. Keys are normalised so that
/// `born-alt-reading` and `born_alt_reading` are the same key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

pub(crate) fn normalise_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Config {
    /// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("config line {}: expected 'key = value', got '{line}'", no + 1)))?;
            if key.trim().is_empty() {
                return Err(Error::Usage(format!("config line {}: empty key", no + 1)));
            }
            cfg.set(key, value.trim());
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(normalise_key(key), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalise_key(key)).map(String::as_str)
    }

    /// Entries of `other` win.
    pub fn merge(&mut self, other: &Config) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Parse an angle: plain radians, or with a `deg` or `pi` suffix
/// (`30deg`, `0.25pi`).
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Usage(format!("'{s}' is not an angle"));
    let (num, scale) = if let Some(x) = t.strip_suffix("deg") {
        (x, PI / 180.0)
    } else if let Some(x) = t.strip_suffix("pi") {
        (x, PI)
    } else {
        (t, 1.0)
    };
    let num = num.trim();
    let v: f64 = if num.is_empty() && scale == PI { 1.0 } else { num.parse().map_err(|_| bad())? };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v * scale)
}

/// Parse a real that may carry a `pi` suffix (`16pi`).
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.ends_with("pi") {
        return parse_angle(t);
    }
    let v: f64 = t.parse().map_err(|_| Error::Usage(format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Usage(format!("'{s}' is not a finite number")));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Diagonal,
    Galerkin,
    Iterate(usize),
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "diagonal" => Ok(Self::Diagonal),
            "galerkin" => Ok(Self::Galerkin),
            other => match other.strip_prefix("iterate:").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => Ok(Self::Iterate(n)),
                _ => Err(Error::Usage(format!("solver must be diagonal, galerkin or iterate:N, got '{other}'"))),
            },
        }
    }
}

impl std::fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Diagonal => f.write_str("diagonal"),
            Self::Galerkin => f.write_str("galerkin"),
            Self::Iterate(n) => write!(f, "iterate:{n}"),
        }
    }
}

/// Typed access to a [`Config`] that records every key read (with its
/// effective value) so unknown keys can be rejected and the resolved
/// configuration echoed.
pub(crate) struct Params<'a> {
    cfg: &'a Config,
    used: RefCell<BTreeSet<String>>,
    echo: RefCell<BTreeMap<String, String>>,
}

impl<'a> Params<'a> {
    pub fn new(cfg: &'a Config) -> Self {
        Self { cfg, used: RefCell::default(), echo: RefCell::default() }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().insert(key.to_string());
        self.cfg.get(key)
    }

    fn record(&self, key: &str, value: String) {
        self.echo.borrow_mut().insert(key.to_string(), value);
    }

    fn parsed<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Result<T>, show: impl Fn(&T) -> String) -> Result<T> {
        let v = match self.raw(key) {
            Some(s) => parse(s).map_err(|e| Error::Usage(format!("{key}: {e}")))?,
            None => default,
        };
        self.record(key, show(&v));
        Ok(v)
    }

    pub fn real(&self, key: &str, default: f64) -> Result<f64> {
        self.parsed(key, default, parse_real, |v| format!("{v:?}"))
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.real(key, default)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Usage(format!("{key} must be positive, got {v}")))
        }
    }

    pub fn angle(&self, key: &str, default: f64) -> Result<f64> {
        self.parsed(key, default, parse_angle, |v| format!("{v:?}"))
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize> {
        self.parsed(
            key,
            default,
            |s| s.trim().parse().map_err(|_| Error::Usage(format!("'{s}' is not a non-negative integer"))),
            |v| v.to_string(),
        )
    }

    pub fn optional_count(&self, key: &str) -> Result<Option<usize>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => {
                let v = s.trim().parse().map_err(|_| Error::Usage(format!("{key}: '{s}' is not a non-negative integer")))?;
                self.record(key, format!("{v}"));
                Ok(Some(v))
            }
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        self.parsed(
            key,
            false,
            |s| match s.trim() {
                "true" | "yes" | "1" | "" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(Error::Usage(format!("'{other}' is not a boolean"))),
            },
            |v| v.to_string(),
        )
    }

    pub fn text(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).trim().to_string();
        self.record(key, v.clone());
        v
    }

    pub fn choice(&self, key: &str, default: &str, allowed: &[&str]) -> Result<String> {
        let v = self.text(key, default);
        if allowed.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(Error::Usage(format!("{key} must be one of {}, got '{v}'", allowed.join(", "))))
        }
    }

    pub fn bc(&self, default: BoundaryCondition) -> Result<BoundaryCondition> {
        self.parsed("bc", default, |s| s.trim().parse(), |v| v.to_string())
    }

    pub fn solver(&self) -> Result<SolverChoice> {
        self.parsed("solver", SolverChoice::Diagonal, |s| s.parse(), |v| v.to_string())
    }

    pub fn reals(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        self.parsed(
            key,
            default.to_vec(),
            |s| s.split(',').map(parse_real).collect(),
            |v| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","),
        )
    }

    /// Fail on the first key that no runner asked for.
    pub fn finish(self) -> Result<BTreeMap<String, String>> {
        let used = self.used.borrow();
        if let Some(k) = self.cfg.keys().find(|k| !used.contains(*k)) {
            return Err(Error::Usage(format!("unknown key '{k}'")));
        }
        Ok(self.echo.into_inner())
    }
}
