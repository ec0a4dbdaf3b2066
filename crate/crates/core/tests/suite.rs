use dirac_gauge::suite::{run_suite, Report, ScenarioConfig, Status};

fn small(groups: &str) -> ScenarioConfig {
    ScenarioConfig::parse(&format!(
        "[scenario]\nseed = 3\nsignature = 2, 0\ngroups = {groups}\n[grid]\nconvergence = 8, 16\nlattice = 4\nsplit = 4\n[samples]\nappendix = 20\nsimple_type = 10\ngauge = 3\nrandom_models = 5\ncompatibility = 5\npauli = 5\n"
    ))
    .unwrap()
}

#[test]
fn selected_groups_only() {
    let r = run_suite(&small("clifford, simple-type"));
    assert!(r.records.iter().all(|x| x.name.starts_with("clifford.") || x.name.starts_with("simple_type.")));
    assert!(r.all_passed(), "{}", r.to_text());
    assert_eq!(r.summary.total, r.records.len());
}

#[test]
fn tiny_tolerance_forces_failures() {
    let mut cfg = small("appendix, masses");
    cfg.tolerance_scale = 1e-30;
    let r = run_suite(&cfg);
    assert!(!r.all_passed());
    assert!(r.records.iter().any(|x| x.name == "appendix.form4" && x.status == Status::Fail));
}

#[test]
fn reports_are_deterministic_and_reparse() {
    let cfg = small("appendix, blw, masses");
    let a = run_suite(&cfg).to_json();
    let b = run_suite(&cfg).to_json();
    assert_eq!(a, b);
    assert_eq!(Report::from_json(&a).unwrap().to_json(), a);
    let mut other = cfg.clone();
    other.seed = 4;
    assert_ne!(run_suite(&other).to_json(), a);
}

#[test]
fn config_file_with_model_path() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("lepton.model");
    std::fs::write(&model, dirac_gauge::symmetry::electroweak(1.0, 2.0).unwrap().to_text()).unwrap();
    let ini = dir.path().join("run.ini");
    std::fs::write(&ini, format!("[scenario]\nmodel = {}\ngroups = masses\n[samples]\nrandom_models = 2\ncompatibility = 3\n", model.display())).unwrap();
    let cfg = ScenarioConfig::load(&ini).unwrap();
    assert_eq!(cfg.load_model().unwrap().vacuum[1].re, 2.0);
    assert!(run_suite(&cfg).all_passed());
    assert!(ScenarioConfig::load(&dir.path().join("absent.ini")).is_err());
}

#[test]
fn timing_is_opt_in() {
    let mut cfg = small("clifford");
    assert!(run_suite(&cfg).records.iter().all(|r| r.wall_time_ms.is_none()));
    cfg.timing = true;
    assert!(run_suite(&cfg).records.iter().all(|r| r.wall_time_ms.is_some()));
}
