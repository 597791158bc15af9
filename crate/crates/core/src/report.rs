//! Verification reports: named checks with residuals, tolerances and their origin.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Where the expected value of a check comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Closed-form value computed independently of the code under test.
    ClosedForm,
    /// Identity derived from the theory and checked numerically.
    Derived,
    /// Holds exactly by construction.
    Exact,
    /// Comparison across grid refinements.
    Convergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub provenance: Provenance,
}

impl Check {
    /// Non-finite residuals are stored as f64::MAX so the report stays serializable.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, provenance: Provenance) -> Self {
        let residual = if residual.is_finite() { residual } else { f64::MAX };
        Check { name: name.into(), passed: residual <= tolerance, residual, tolerance, provenance }
    }

    /// Boolean outcome as residual 0 or 1 against tolerance 0.
    pub fn flag(name: impl Into<String>, ok: bool, provenance: Provenance) -> Self {
        Check::new(name, if ok { 0.0 } else { 1.0 }, 0.0, provenance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { name: name.into(), points }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub series: Vec<Series>,
    pub artifacts: Vec<String>,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Report {
            command: command.into(),
            input: BTreeMap::new(),
            checks: Vec::new(),
            series: Vec::new(),
            artifacts: Vec::new(),
            seed,
            wall_time_s: 0.0,
        }
    }

    pub fn echo(&mut self, key: &str, value: impl Serialize) {
        self.input.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Merges a sub-report, prefixing names with its command.
    pub fn absorb(&mut self, other: Report) {
        let prefix = other.command.clone();
        self.checks.extend(other.checks.into_iter().map(|mut c| {
            c.name = format!("{prefix}/{}", c.name);
            c
        }));
        self.series.extend(other.series.into_iter().map(|mut s| {
            s.name = format!("{prefix}/{}", s.name);
            s
        }));
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Everything except the wall time, which is the only schedule-dependent field.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.wall_time_s = 0.0;
        copy.to_json()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_identical() {
        let mut r = Report::new("standard", 7);
        r.echo("dim", 4);
        r.push(Check::new("a", 1.234_567_890_123_456_7e-11, 1e-9, Provenance::Derived));
        r.push(Check::new("b", f64::NAN, 1e-9, Provenance::Exact));
        r.series.push(Series::new("s", vec![(1.0, 0.1), (2.0, 1e-300)]));
        r.wall_time_s = 0.125;
        let s = r.to_json().unwrap();
        let back = Report::from_json(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), s);
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
    }
}
