use clap::{Parser, Subcommand};
use dirac_gauge::suite::{emit_report, run_suite, ScenarioConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical checks of Dirac-type operators and their gauge-theoretic identities.
#[derive(Parser, Debug)]
#[command(name = "diracgt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file with `[section]` and `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report to this path, or `-` for standard output.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Multiply every tolerance by this factor.
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Gamma matrices for every even signature up to dimension 8.
    Clifford,
    /// Tensor contraction identities.
    Appendix,
    /// Simple-type characterization and its brute-force nullspace.
    SimpleType,
    /// Dirac potential normalization and curvature constant.
    Potential,
    /// Lattice BLW split, convergence and gauge invariance.
    Blw,
    /// Symmetry breaking, mass matrices and compatibility.
    Masses,
    /// Pauli-type operators and the Lagrangian split.
    Pauli,
    /// End-to-end lepton example.
    DemoSm,
    /// Every group selected by the configuration.
    Suite,
}

impl Command {
    fn group(self) -> Option<&'static str> {
        match self {
            Command::Clifford => Some("clifford"),
            Command::Appendix => Some("appendix"),
            Command::SimpleType => Some("simple-type"),
            Command::Potential => Some("potential"),
            Command::Blw => Some("blw"),
            Command::Masses => Some("masses"),
            Command::Pauli => Some("pauli"),
            Command::DemoSm => Some("sm-demo"),
            Command::Suite => None,
        }
    }
}

fn config(cli: &Cli) -> dirac_gauge::Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tolerance_scale {
        cfg.tolerance_scale = t;
    }
    if let Some(g) = cli.command.group() {
        cfg.groups = vec![g.to_string()];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("diracgt: {e}");
            return ExitCode::from(2);
        }
    };
    let report = run_suite(&cfg);
    let to_stdout = cli.out.as_deref() == Some("-");
    if let Some(path) = &cli.out {
        if let Err(e) = emit_report(&report, path) {
            eprintln!("diracgt: {e}");
            return ExitCode::from(2);
        }
    }
    if !to_stdout {
        if cli.json {
            print!("{}", report.to_json());
        } else {
            print!("{}", report.to_text());
        }
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
