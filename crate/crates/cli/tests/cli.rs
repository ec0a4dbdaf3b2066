use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "[scenario]\nseed = 5\nsignature = 2, 0\n[grid]\nconvergence = 8, 16\nlattice = 4\n[samples]\nappendix = 10\nsimple_type = 5\ngauge = 2\nrandom_models = 3\ncompatibility = 3\npauli = 3\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diracgt")).args(args).output().unwrap()
}

fn small_config(dir: &Path) -> String {
    let p = dir.join("small.ini");
    std::fs::write(&p, SMALL).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn clifford_passes() {
    let out = run(&["clifford"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("clifford.anticommutator"));
    assert!(text.lines().last().unwrap().ends_with("0 failed"));
}

#[test]
fn tiny_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    assert_eq!(run(&["appendix", "--config", &cfg, "--tolerance-scale", "1e-30"]).status.code(), Some(1));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ini");
    std::fs::write(&bad, "[grid]\nlattice = 2\n").unwrap();
    let out = run(&["clifford", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(run(&["clifford", "--config", dir.path().join("absent.ini").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["clifford", "--tolerance-scale", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["clifford", "--out", dir.path().join("no/such/dir.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn stdout_and_file_reports_match() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let file = dir.path().join("r.json");
    let a = run(&["masses", "--config", &cfg, "--out", "-"]);
    let b = run(&["masses", "--config", &cfg, "--out", file.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(a.stdout, std::fs::read(&file).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["mass_spectrum"].is_null());
    assert_eq!(v["config"]["seed"], 5);
}

#[test]
fn json_flag_and_seed_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = run(&["blw", "--config", &cfg, "--json", "--seed", "11"]);
    let b = run(&["blw", "--config", &cfg, "--json", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 11);
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["name"].as_str().unwrap().starts_with("blw.")));
}
