//! Report records and JSON emission.

use super::config::ScenarioConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const ENGINE: &str = concat!("dirac-gauge ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One check. `residual` is `None` when the quantity could not be measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub wall_time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Record {
    /// Pass iff the residual is finite and at most the tolerance.
    pub fn measured(name: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        let ok = residual.is_finite() && residual <= tolerance;
        Record {
            name: name.into(),
            anchor: anchor.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: residual.is_finite().then_some(residual),
            tolerance,
            wall_time_ms: None,
            note: String::new(),
        }
    }

    /// Pass iff `value ≥ bound`; used for convergence ratios.
    pub fn at_least(name: &str, anchor: &str, value: f64, bound: f64) -> Self {
        let mut r = Record::measured(name, anchor, value, f64::INFINITY);
        r.tolerance = bound;
        r.status = if value.is_finite() && value >= bound { Status::Pass } else { Status::Fail };
        r.note = "lower bound".into();
        r
    }

    pub fn failed(name: &str, anchor: &str, tolerance: f64, note: String) -> Self {
        Record { name: name.into(), anchor: anchor.into(), status: Status::Fail, residual: None, tolerance, wall_time_ms: None, note }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// Masses and ranks from the symmetry-breaking pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassSpectrumReport {
    pub model: String,
    pub fermion_masses: Vec<f64>,
    pub fermion_mass_squared_blocks: Vec<(f64, usize)>,
    pub ym_mass_squared: Vec<f64>,
    pub ym_rank: usize,
    pub higgs_mass_eigenvalues: Vec<f64>,
    pub little_group_dim: usize,
    pub goldstone_count: usize,
}

/// Fitted polynomial coefficients (ascending powers) of one Lagrangian term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrangianTerm {
    pub name: String,
    pub coefficients: Vec<f64>,
    pub fit_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub engine: String,
    pub config: ScenarioConfig,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub mass_spectrum: Option<MassSpectrumReport>,
    pub lagrangian_terms: Vec<LagrangianTerm>,
}

impl Report {
    pub fn new(config: ScenarioConfig) -> Self {
        Report { engine: ENGINE.into(), config, records: Vec::new(), summary: Summary::default(), mass_spectrum: None, lagrangian_terms: Vec::new() }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
        self.tally();
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = Record>) {
        self.records.extend(rs);
        self.tally();
    }

    fn tally(&mut self) {
        let passed = self.records.iter().filter(|r| r.passed()).count();
        self.summary = Summary { total: self.records.len(), passed, failed: self.records.len() - passed };
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let passed = r.records.iter().filter(|x| x.passed()).count();
        if r.summary != (Summary { total: r.records.len(), passed, failed: r.records.len() - passed }) {
            return Err(Error::Config("summary counts disagree with records".into()));
        }
        Ok(r)
    }

    /// One line per record.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let res = r.residual.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "n/a".into());
            let status = if r.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {:<40} residual {res:>10}  tol {:.1e}", r.name, r.tolerance));
            if !r.note.is_empty() {
                out.push_str(&format!("  ({})", r.note));
            }
            out.push('\n');
        }
        out.push_str(&format!("{} checks, {} passed, {} failed\n", self.summary.total, self.summary.passed, self.summary.failed));
        out
    }
}

/// Write the JSON report to `path`, or to standard output for `-`.
pub fn emit_report(r: &Report, path: &str) -> Result<()> {
    let json = r.to_json();
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(json.as_bytes()).and_then(|_| out.flush()).map_err(|e| Error::Io(e.to_string()))
    } else {
        std::fs::write(Path::new(path), json).map_err(|e| Error::Io(format!("{path}: {e}")))
    }
}
