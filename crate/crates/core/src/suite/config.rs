//! Scenario configuration in a plain `[section]` / `key = value` format.
//!
//! ```text
//! # comment
//! [scenario]
//! seed = 20240611
//! signature = 4, 0
//! convention = +1
//! model = electroweak
//! groups = clifford, appendix, simple-type, potential, blw, masses, pauli, sm-demo
//!
//! [grid]
//! convergence = 8, 16, 32
//! lattice = 6
//! split = 4
//!
//! [samples]
//! appendix = 1000
//!
//! [tolerance]
//! scale = 1.0
//! pauli.cancellation = 1e-10
//! ```
//!
//! Unknown sections or keys are rejected. `model` is a fixture name or a path
//! to a model file in the `fermion-model v1` text format.

use crate::clifford::{ConventionSign, Signature};
use crate::error::{Error, Result};
use crate::symmetry::{fixture, FermionModel, FIXTURES};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Check groups in dependency order.
pub const GROUPS: [&str; 8] = ["clifford", "appendix", "simple-type", "potential", "blw", "masses", "pauli", "sm-demo"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub appendix: usize,
    pub simple_type: usize,
    pub gauge: usize,
    pub random_models: usize,
    pub compatibility: usize,
    pub pauli: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples { appendix: 1000, simple_type: 500, gauge: 50, random_models: 100, compatibility: 20, pauli: 500 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub signature: (usize, usize),
    pub convention: i32,
    pub model: String,
    pub groups: Vec<String>,
    /// Side lengths of the refinement sequence for convergence checks.
    pub convergence: Vec<usize>,
    /// Side length of lattices used by invariance checks.
    pub lattice: usize,
    /// Side length of lattices used by the Lagrangian split.
    pub split: usize,
    pub samples: Samples,
    pub tolerance_scale: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub timing: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 20240611,
            signature: (4, 0),
            convention: 1,
            model: "electroweak".into(),
            groups: GROUPS.iter().map(|s| s.to_string()).collect(),
            convergence: vec![8, 16, 32],
            lattice: 6,
            split: 4,
            samples: Samples::default(),
            tolerance_scale: 1.0,
            tolerances: BTreeMap::new(),
            timing: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(v: &str, line: usize) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse { line, msg: format!("invalid number {v:?}") })
}

fn parse_list<T: std::str::FromStr>(v: &str, line: usize) -> Result<Vec<T>> {
    v.split(',').map(|s| parse_num(s, line)).collect()
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.split('#').next().unwrap_or("").trim();
            if s.is_empty() {
                continue;
            }
            if let Some(name) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                section = name.trim().to_string();
                if !["scenario", "grid", "samples", "tolerance"].contains(&section.as_str()) {
                    return Err(Error::Parse { line, msg: format!("unknown section [{section}]") });
                }
                continue;
            }
            let (k, v) = s.split_once('=').ok_or_else(|| Error::Parse { line, msg: "expected key = value".into() })?;
            let (k, v) = (k.trim(), v.trim());
            match (section.as_str(), k) {
                ("scenario", "seed") => cfg.seed = parse_num(v, line)?,
                ("scenario", "signature") => {
                    let pq: Vec<usize> = parse_list(v, line)?;
                    if pq.len() != 2 {
                        return Err(Error::Parse { line, msg: "signature needs two entries p, q".into() });
                    }
                    cfg.signature = (pq[0], pq[1]);
                }
                ("scenario", "convention") => cfg.convention = parse_num(v.trim_start_matches('+'), line)?,
                ("scenario", "model") => cfg.model = v.to_string(),
                ("scenario", "groups") => cfg.groups = v.split(',').map(|g| g.trim().to_string()).filter(|g| !g.is_empty()).collect(),
                ("scenario", "timing") => {
                    cfg.timing = v.parse().map_err(|_| Error::Parse { line, msg: format!("invalid boolean {v:?}") })?
                }
                ("grid", "convergence") => cfg.convergence = parse_list(v, line)?,
                ("grid", "lattice") => cfg.lattice = parse_num(v, line)?,
                ("grid", "split") => cfg.split = parse_num(v, line)?,
                ("samples", key) => {
                    let n = parse_num(v, line)?;
                    let s = &mut cfg.samples;
                    match key {
                        "appendix" => s.appendix = n,
                        "simple_type" => s.simple_type = n,
                        "gauge" => s.gauge = n,
                        "random_models" => s.random_models = n,
                        "compatibility" => s.compatibility = n,
                        "pauli" => s.pauli = n,
                        _ => return Err(Error::Parse { line, msg: format!("unknown sample count {key:?}") }),
                    }
                }
                ("tolerance", "scale") => cfg.tolerance_scale = parse_num(v, line)?,
                ("tolerance", key) => {
                    cfg.tolerances.insert(key.to_string(), parse_num(v, line)?);
                }
                ("", _) => return Err(Error::Parse { line, msg: "key outside of a section".into() }),
                (sec, key) => return Err(Error::Parse { line, msg: format!("unknown key {key:?} in [{sec}]") }),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        Signature::new(self.signature.0, self.signature.1)?;
        ConventionSign::from_i32(self.convention)?;
        for g in &self.groups {
            if !GROUPS.contains(&g.as_str()) {
                return Err(Error::Config(format!("unknown check group {g:?}")));
            }
        }
        if !(self.tolerance_scale > 0.0) || self.tolerances.values().any(|t| !(*t > 0.0)) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.convergence.len() < 2 || self.convergence.iter().chain([&self.lattice, &self.split]).any(|&l| l < 4) {
            return Err(Error::Config("grids need at least 4 sites per direction and two refinement levels".into()));
        }
        if !FIXTURES.contains(&self.model.as_str()) && !Path::new(&self.model).is_file() {
            return Err(Error::Config(format!("model {:?} is neither a fixture nor a readable file", self.model)));
        }
        Ok(())
    }

    pub fn load_model(&self) -> Result<FermionModel> {
        if FIXTURES.contains(&self.model.as_str()) {
            return fixture(&self.model);
        }
        let text = std::fs::read_to_string(&self.model).map_err(|e| Error::Io(format!("{}: {e}", self.model)))?;
        FermionModel::from_text(&text)
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.signature.0, self.signature.1).expect("validated")
    }

    pub fn convention_sign(&self) -> ConventionSign {
        ConventionSign::from_i32(self.convention).expect("validated")
    }

    /// Effective tolerance of a check: override if present, times the scale.
    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default) * self.tolerance_scale
    }

    pub fn runs(&self, group: &str) -> bool {
        self.groups.iter().any(|g| g == group)
    }
}
