use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pmn(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmn")).args(args).current_dir(cwd).env_remove("PMN_OUT_DIR").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn result(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("result.json")).unwrap()).unwrap()
}

const LINE: &str = r#"{
  "targets": [
    {"id": 1, "position": [0, 0], "A": 1, "B": 10, "R0": 0.5},
    {"id": 2, "position": [100, 0], "A": 1, "B": 10, "R0": 0.5},
    {"id": 3, "position": [250, 0], "A": 1, "B": 10, "R0": 0.5}
  ],
  "edges": [
    {"i": 1, "j": 2, "V": 50, "bidirectional": true},
    {"i": 2, "j": 3, "V": 50, "bidirectional": true}
  ],
  "agents": [{"id": 1, "start": 3}],
  "T": 500
}"#;

#[test]
fn zero_agents_report_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"targets": [{"id": 4, "position": [0, 0], "A": 2, "B": 5, "R0": 1}], "T": 10}"#,
    );
    let out = pmn(&["run", "--scenario", &s, "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = result(&dir.path().join("o"));
    assert!((r["J_T"].as_f64().unwrap() - 11.0).abs() < 1e-12);
    assert_eq!(r["H"].as_f64(), Some(5.0));
    let trace = fs::read_to_string(dir.path().join("o/trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("time,kind,agent,target,R_4"));
}

#[test]
fn denominator_free_settles_on_the_closest_pair() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", LINE);
    let out = pmn(&["run", "--scenario", &s, "--controller", "denominator_free", "--out", "o"], dir.path());
    assert!(out.status.success());
    let visits: Vec<u64> =
        result(&dir.path().join("o"))["visits"]["1"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(&visits[..4], &[3, 2, 1, 2]);
    assert!(visits[1..].iter().all(|&t| t != 3));
}

#[test]
fn repeated_runs_write_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", LINE);
    for out in ["a", "b"] {
        let o = pmn(
            &["run", "--scenario", &s, "--noise", "speed", "--m", "0.4", "--seeds", "3,4", "--out", out],
            dir.path(),
        );
        assert!(o.status.success());
    }
    for f in ["trace-3.csv", "trace-4.csv"] {
        assert_eq!(fs::read(dir.path().join("a").join(f)).unwrap(), fs::read(dir.path().join("b").join(f)).unwrap());
    }
    assert_ne!(
        fs::read(dir.path().join("a/trace-3.csv")).unwrap(),
        fs::read(dir.path().join("a/trace-4.csv")).unwrap()
    );
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", LINE);
    let out = Command::new(env!("CARGO_BIN_EXE_pmn"))
        .args(["run", "--scenario", &s])
        .current_dir(dir.path())
        .env("PMN_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from-env/trace.csv").exists());
}

#[test]
fn horizon_sweep_report() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", LINE);
    let out = pmn(
        &["sweep", "--scenario", &s, "--axis", "H", "--grid", "50,10,250", "--parallel", "2", "--out", "o"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "H,nominal,mean,variance,runs,ratio,argmin");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("10,") && lines[3].starts_with("250,"));
    assert_eq!(lines.iter().filter(|l| l.ends_with(",true")).count(), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("ratio to minimum"));
}

#[test]
fn nominal_weight_row_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", LINE);
    let out = pmn(
        &[
            "sweep",
            "--scenario",
            &s,
            "--controller",
            "rhc_alpha",
            "--axis",
            "alpha",
            "--grid",
            "0,nominal,1",
            "--out",
            "o",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/sweep.json")).unwrap()).unwrap();
    let rows = report["rows"].as_array().unwrap();
    let nominal: Vec<&Value> = rows.iter().filter(|r| r["nominal"] == true).collect();
    assert_eq!(nominal.len(), 1);
    let v = nominal[0]["value"].as_f64().unwrap();
    assert!((v - (1.0 / 4.0 + 1.0 / 9.0 + 1.0 / 4.0) / 3.0).abs() < 1e-12);
    let bad = pmn(&["sweep", "--scenario", &s, "--axis", "H", "--grid", "nominal", "--out", "o"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", LINE);
    let out = pmn(&["validate", "--scenario", &good], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok: 3 targets"));
    let bad = write(dir.path(), "bad.json", &LINE.replacen(r#""A": 1, "B": 10"#, r#""A": 12, "B": 10"#, 1));
    let out = pmn(&["validate", "--scenario", &bad], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("removal rate"));
    assert_eq!(pmn(&["validate", "--scenario", "missing.json"], dir.path()).status.code(), Some(1));
    assert_eq!(pmn(&["run", "--scenario", &good, "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(pmn(&["run", "--scenario", &good, "--controller", "nope"], dir.path()).status.code(), Some(1));
}

#[test]
fn generated_scenarios_validate_and_run() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        pmn(&["generate", "grid", "--targets", "6", "--agents", "2", "--seed", "3", "--out", "g.json"], dir.path());
    assert!(out.status.success());
    assert_eq!(pmn(&["validate", "--scenario", "g.json"], dir.path()).status.code(), Some(0));
    let stdout = pmn(&["generate", "grid", "--targets", "6", "--agents", "2", "--seed", "3"], dir.path()).stdout;
    assert_eq!(stdout, fs::read(dir.path().join("g.json")).unwrap());
    let out = pmn(&["run", "--scenario", "g.json", "--out", "o"], dir.path());
    assert!(out.status.success());
    let r = result(&dir.path().join("o"));
    assert_eq!(r["max_dwelling"].as_u64(), Some(1));
    assert_eq!(pmn(&["generate", "line", "--targets", "2", "--agents", "3"], dir.path()).status.code(), Some(1));
}
