use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_flamespeed"));
    cmd.current_dir(dir).env_remove("FLAMESPEED_OUT").args(args);
    if let Some(text) = config {
        let path = dir.join("run.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_standard_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--out", "o"], Some("d = 1.0\n[flow]\npreset = \"single-well\"\n"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("o/solve.json"));
    assert!(v["solution"]["residual"].as_f64().unwrap() <= 1e-11);
    assert!(v["identity_residual"].as_f64().unwrap() <= 1e-8);
    let csv = std::fs::read_to_string(dir.path().join("o/solve.csv")).unwrap();
    assert!(csv.starts_with("x,phi,w\n"));
}

#[test]
fn degenerate_direction_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--out", "o"], Some("[momentum]\ngamma = 0.0\nmu = -0.3\n"));
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&dir.path().join("o/solve.json"));
    assert_eq!(v["solution"]["H"].as_f64(), Some(0.3));
    assert_eq!(v["solution"]["kind"], "degenerate");
}

#[test]
fn constant_flow_gives_norm() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["solve", "--out", "o"],
        Some("[flow]\npreset = \"constant\"\n[momentum]\ngamma = 0.6\nmu = 0.8\n"),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&dir.path().join("o/solve.json"));
    assert!((v["solution"]["H"].as_f64().unwrap() - 1.0).abs() < 1e-13);
    let w = v["solution"]["w"].as_array().unwrap();
    assert!(w.iter().all(|x| x.as_f64().unwrap().abs() < 1e-13));
}

#[test]
fn sweep_writes_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["sweep"], Some("d_schedule = [2.0, 1.0, 0.5]\noutput_dir = \"s\"\n"));
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    assert!(csv.trim_end().ends_with("# verdict: strictly_decreasing=true derivatives_negative=true"));
    let v = read_json(&dir.path().join("s/sweep.json"));
    assert_eq!(v["verdict"]["strictly_decreasing"], true);
}

#[test]
fn empty_schedule_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["sweep", "--out", "o"], Some("d_schedule = []\n"));
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn unknown_key_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve"], Some("markstein = 1.0\n"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn grid_flag_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["solve", "--grid", "100"], None).status.code(), Some(1));
}

#[test]
fn newton_failure_exits_2_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["solve", "--out", "o"],
        Some("d = 0.01\n[solver]\nmax_iter = 1\n"),
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("o/solve.json").exists());
}

#[test]
fn tied_maxima_refuse_selection() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["select", "--out", "o"], Some("[flow]\npreset = \"two-max-tied\"\n"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("selection ill-posed"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn two_max_selects_flatter_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["select", "--out", "o"],
        Some("[flow]\npreset = \"two-max-distinct\"\n[select]\nd_schedule = [0.1, 0.03]\nslope_d = [0.02, 0.01]\n"),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("o/select.json"));
    assert!((v["study"]["selection"]["x_bar"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    let csv = std::fs::read_to_string(dir.path().join("o/comparison.csv")).unwrap();
    assert!(csv.starts_with("x,w_d,w0\n"));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[verify]\ndiscrete_cases = 100\ncontinuous_cases = 10\n";
    let a = run(dir.path(), &["verify", "--seed", "7", "--out", "a"], Some(cfg));
    let b = run(dir.path(), &["verify-inequalities", "--seed", "7", "--out", "b"], Some(cfg));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let ja = std::fs::read(dir.path().join("a/inequalities.json")).unwrap();
    let jb = std::fs::read(dir.path().join("b/inequalities.json")).unwrap();
    assert_eq!(ja, jb);
    let v: Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["cases_run"], 110);
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "d = 0.4\n[flow]\npreset = \"two-max-distinct\"\n";
    run(dir.path(), &["solve", "--out", "a"], Some(cfg));
    run(dir.path(), &["solve", "--out", "b"], Some(cfg));
    assert_eq!(
        std::fs::read(dir.path().join("a/solve.json")).unwrap(),
        std::fs::read(dir.path().join("b/solve.json")).unwrap()
    );
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_flamespeed"))
        .current_dir(dir.path())
        .env("FLAMESPEED_OUT", "envdir")
        .args(["verify"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("envdir/inequalities.json").exists());
}

#[test]
fn perturb_reports_expansion() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("field.txt"), "# shear along x, varying in y\n0 1  0.5 0  0 0\n").unwrap();
    let out = run(
        dir.path(),
        &["perturb", "--out", "o"],
        Some("[perturb]\nfield = \"field.txt\"\ndirection = [1.0, 0.0]\nd = 1.0\ndelta = 0.1\n"),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("o/perturb.json"));
    for key in ["alpha1", "alpha2", "H_approx", "margin"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["alpha2"].as_f64().unwrap() > 0.0);
}

#[test]
fn perturb_cross_check_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["perturb", "--out", "o"],
        Some("[flow]\npreset = \"two-mode\"\n[momentum]\ngamma = 1.0\nmu = 0.37\n[perturb]\ncross_check = [0.02, 0.01]\n"),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&dir.path().join("o/perturb.json"));
    let order = v["remainder_orders"][0].as_f64().unwrap();
    assert!((2.5..=3.5).contains(&order), "{order}");
}

#[test]
fn hj_reports_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["hj", "--out", "o"], Some("[hj]\nhamiltonian = \"non-convex\"\n"));
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&dir.path().join("o/hj.json"));
    assert_eq!(v["hamiltonian"], "non-convex");
    assert_eq!(v["h_values"].as_array().unwrap().len(), 3);
}
