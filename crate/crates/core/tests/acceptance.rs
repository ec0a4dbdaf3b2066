//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines always reach the terminal; exits non-zero when any criterion fails.

use dirac_gauge::suite::{run_suite, Record, Report, ScenarioConfig};
use std::process::ExitCode;

struct Criterion {
    id: usize,
    title: &'static str,
    checks: &'static [&'static str],
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: 1,
        title: "Clifford suite for every even signature up to n = 8",
        checks: &["clifford.anticommutator", "clifford.chirality", "clifford.blade_independence", "clifford.blade_round_trip"],
    },
    Criterion { id: 2, title: "contraction identities on 1000 random tensors per configuration", checks: &["appendix.form1", "appendix.form2", "appendix.form4"] },
    Criterion {
        id: 3,
        title: "simple-type equivalence and brute-force nullspace",
        checks: &["simple_type.forward", "simple_type.converse", "simple_type.rejection", "simple_type.nullspace", "simple_type.non_chiral"],
    },
    Criterion {
        id: 4,
        title: "BLW oracle: exact zero order, O(h^2) convergence, pinned potential constants",
        checks: &[
            "blw.constant_exact",
            "blw.convergence",
            "blw.free_dispersion",
            "potential.lattice_vs_closed_form",
            "potential.normalization_constant",
            "potential.curvature_constant",
        ],
    },
    Criterion { id: 5, title: "Dirac potential invariant under 50 random inner gauge transformations", checks: &["blw.gauge_invariance"] },
    Criterion {
        id: 6,
        title: "electroweak breaking pattern and Higgs dinner on 100 random models",
        checks: &["masses.electroweak_spectrum", "masses.little_group_dim", "masses.goldstone_count", "masses.ym_rank", "masses.higgs_dinner"],
    },
    Criterion { id: 7, title: "compatibility: d'Alembert iff commuting, constant deficit ratio", checks: &["blw.dalambert_iff", "masses.compatibility_ratio"] },
    Criterion { id: 8, title: "Pauli cancellation over 500 random triples", checks: &["pauli.cancellation"] },
    Criterion {
        id: 9,
        title: "Lagrangian split: polynomial fits, sphere of minima on the vacuum orbit",
        checks: &[
            "pauli.split.fit_residual",
            "pauli.split.ym_quadratic",
            "pauli.split.higgs_quartic",
            "pauli.split.higgs_minimum_sphere",
            "pauli.split.higgs_minimum_on_orbit",
        ],
    },
];

fn find<'a>(report: &'a Report, name: &str) -> Option<&'a Record> {
    report.records.iter().find(|r| r.name == name)
}

fn main() -> ExitCode {
    let cfg = ScenarioConfig::default();
    let report = run_suite(&cfg);
    let mut failed = 0;
    for c in &CRITERIA {
        let mut problems = Vec::new();
        for name in c.checks {
            match find(&report, name) {
                Some(r) if r.passed() => {}
                Some(r) => {
                    let res = r.residual.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "n/a".into());
                    let note = if r.note.is_empty() { String::new() } else { format!(", {}", r.note) };
                    problems.push(format!("{name} residual {res} tol {:.1e}{note}", r.tolerance));
                }
                None => problems.push(format!("{name} missing")),
            }
        }
        if problems.is_empty() {
            println!("criterion {:>2} PASS  {}", c.id, c.title);
        } else {
            failed += 1;
            println!("criterion {:>2} FAIL  {}  [{}]", c.id, c.title, problems.join("; "));
        }
    }
    let again = run_suite(&cfg);
    let (a, b) = (report.to_json(), again.to_json());
    if a == b {
        println!("criterion 10 PASS  fixed-seed suite reports are byte-identical ({} bytes)", a.len());
    } else {
        failed += 1;
        let at = a.bytes().zip(b.bytes()).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
        println!("criterion 10 FAIL  fixed-seed suite reports differ at byte {at}");
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
