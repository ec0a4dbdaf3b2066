//! Aggregated verification suite: configuration, checks and reports.

pub mod checks;
pub mod config;
pub mod report;

pub use config::{Samples, ScenarioConfig, GROUPS};
pub use report::{emit_report, LagrangianTerm, MassSpectrumReport, Record, Report, Status, Summary, ENGINE};

use rayon::prelude::*;

/// Output of one check group.
#[derive(Default)]
pub struct GroupOutput {
    pub records: Vec<Record>,
    pub mass_spectrum: Option<MassSpectrumReport>,
    pub lagrangian_terms: Vec<LagrangianTerm>,
}

/// Run the selected groups. Groups run concurrently; records are merged in
/// the fixed group order so the report does not depend on scheduling.
pub fn run_suite(cfg: &ScenarioConfig) -> Report {
    let selected: Vec<&str> = GROUPS.iter().copied().filter(|g| cfg.runs(g)).collect();
    let outputs: Vec<GroupOutput> = selected.par_iter().map(|g| checks::run_group(cfg, g)).collect();
    let mut report = Report::new(cfg.clone());
    for out in outputs {
        report.extend(out.records);
        if out.mass_spectrum.is_some() {
            report.mass_spectrum = out.mass_spectrum;
        }
        report.lagrangian_terms.extend(out.lagrangian_terms);
    }
    report
}
