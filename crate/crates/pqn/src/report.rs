//! Check records and the versioned JSON report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity being checked, written as a formula.
    pub anchor: String,
    /// Largest residual over all sample points; `None` if any residual was not finite.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let max_residual = residual.is_finite().then_some(residual);
        let pass = max_residual.is_some_and(|r| r <= tolerance);
        Check { name: name.into(), anchor: anchor.into(), max_residual, tolerance, pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub timestamp: String,
}

impl Environment {
    pub fn now() -> Self {
        Environment { version: env!("CARGO_PKG_VERSION").into(), timestamp: chrono::Utc::now().to_rfc3339() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    /// Model id such as `a1-n4`, or `flaschka-n4`.
    pub model: String,
    pub seed: u64,
    pub samples: usize,
    pub kmax: usize,
    #[serde(rename = "box")]
    pub half_width: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub environment: Environment,
}

impl Report {
    pub fn new(command: &str, model: String, settings: &Settings, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.pass);
        Report {
            schema: SCHEMA,
            command: command.into(),
            model,
            seed: settings.seed,
            samples: settings.samples,
            kmax: settings.kmax,
            half_width: settings.half_width,
            checks,
            passed,
            environment: Environment::now(),
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers and strings")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {}  seed {}  samples {}  kmax {}  box {}",
            self.command, self.model, self.seed, self.samples, self.kmax, self.half_width
        );
        let _ = writeln!(out, "{:<width$}  {:>12}  {:>9}  result", "check", "max residual", "tolerance");
        for c in &self.checks {
            let r = c.max_residual.map_or_else(|| "non-finite".into(), |r| format!("{r:.3e}"));
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{:<width$}  {r:>12}  {:>9.0e}  {verdict}", c.name, c.tolerance);
        }
        let failed = self.failed().count();
        let _ = writeln!(out, "{} of {} checks passed", self.checks.len() - failed, self.checks.len());
        out
    }
}

/// Sampling settings shared by the check suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub samples: usize,
    pub seed: u64,
    pub kmax: usize,
    /// Coordinates are drawn uniformly from `[−half_width, half_width]`.
    pub half_width: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_residual_within_tolerance() {
        assert!(Check::new("a", "x = 0", 1e-9, 1e-8).pass);
        assert!(Check::new("a", "x = 0", 0.0, 0.0).pass);
        assert!(!Check::new("a", "x = 0", 2e-8, 1e-8).pass);
        let nan = Check::new("a", "x = 0", f64::NAN, 1e-8);
        assert_eq!(nan.max_residual, None);
        assert!(!nan.pass);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let s = Settings { samples: 3, seed: 9, kmax: 4, half_width: 0.1 };
        let checks = vec![
            Check::new("torsion", "T_N(X,Y) = π♯(i_{X∧Y}φ)", 0.1 + 0.2, 1.0),
            Check::new("tiny", "f = 0", 5e-324, 1e-12),
            Check::new("bad", "g = 0", f64::INFINITY, 1e-12),
        ];
        let r = Report::new("verify", "a1-n2".into(), &s, checks);
        assert!(!r.passed);
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.checks[0].max_residual.unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    }
}
