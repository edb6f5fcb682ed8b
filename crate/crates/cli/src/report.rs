//! Verification reports and their CSV sidecars.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One inequality `lhs <= rhs`; `status` is pass iff `margin >= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        let status = if margin >= -tolerance { Status::Pass } else { Status::Fail };
        Self { name: name.into(), lhs, rhs, margin, tolerance, status, detail: None }
    }

    /// A yes/no outcome encoded as `0 <= 1` or `0 <= -1`.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self::le(name, 0.0, if holds { 1.0 } else { -1.0 }, 0.0)
    }

    /// A computation that could not be carried out.
    pub fn failed(name: impl Into<String>, why: impl std::fmt::Display) -> Self {
        Self::flag(name, false).with_detail(why.to_string())
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Tabular data written next to the report, one CSV per series.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub grid_size: usize,
    pub grading: String,
    pub r_first: f64,
    pub r_last: f64,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub environment: Option<Environment>,
    pub provenance: Provenance,
    #[serde(skip)]
    pub series: Vec<Series>,
}

impl VerificationReport {
    pub fn new(command: &str, config_sha256: String, seed: u64) -> Self {
        Self {
            command: command.into(),
            status: Status::Pass,
            checks: Vec::new(),
            values: BTreeMap::new(),
            environment: None,
            provenance: Provenance { config_sha256, seed, version: env!("CARGO_PKG_VERSION").into() },
            series: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        if !check.passed() {
            self.status = Status::Fail;
        }
        self.checks.push(check);
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.into(), v.into());
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let path = dir.join("report.json");
        std::fs::write(&path, self.to_json()).map_err(|e| io(&path, e))
    }
}

fn io(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

/// Writes every series of `report` as `<dir>/<name>.csv` and returns the paths.
pub fn emit_plot_data(report: &VerificationReport, dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut out = Vec::with_capacity(report.series.len());
    for s in &report.series {
        let path = dir.join(format!("{}.csv", s.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&s.columns)?;
        for row in &s.rows {
            w.write_record(row.iter().map(f64::to_string))?;
        }
        w.flush().map_err(|e| io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}
