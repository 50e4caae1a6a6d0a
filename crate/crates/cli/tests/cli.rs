use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mcld(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mcld"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout")
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn threshold_pair_file(dir: &Path, k: &str) -> PathBuf {
    let out = mcld(&["construct", "--threshold-pair", k], &[]);
    assert!(out.status.success());
    write(dir, "tp.json", std::str::from_utf8(&out.stdout).unwrap())
}

#[test]
fn dims_reports_threshold_pair() {
    let dir = tempfile::tempdir().unwrap();
    let f = threshold_pair_file(dir.path(), "7");
    let out = mcld(&["dims", f.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["data"]["dimensions"]["mld"], 1);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["verdict"] == "pass"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // unreadable input is a usage error
    assert_eq!(mcld(&["dims", "/nonexistent.json"], &[]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", r#"{"k": 1, "domain_size": 2, "functions": [[0, 5]]}"#);
    assert_eq!(mcld(&["dims", bad.to_str().unwrap()], &[]).status.code(), Some(2));
    // a tiny class-size cap makes the product tightness check skip
    let out = mcld(&["tightness", "--k", "3", "--d", "2"], &[("MCLD_MAX_CLASS_SIZE", "8")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["checks"].as_array().unwrap().iter().any(|c| c["verdict"] == "skipped-cap"));
    assert_eq!(mcld(&["tightness", "--k", "3", "--d", "1"], &[]).status.code(), Some(0));
    assert_eq!(mcld(&["tightness", "--k", "3", "--d", "1"], &[("MCLD_MAX_DEPTH", "x")]).status.code(), Some(2));
}

#[test]
fn verify_all_is_reproducible() {
    let a = mcld(&["verify-all", "--random", "12", "--seed", "4"], &[]);
    let b = mcld(&["verify-all", "--random", "12", "--seed", "4"], &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timings(json(&a)), without_timings(json(&b)));
    let c = mcld(&["verify-all", "--random", "12", "--seed", "5"], &[]);
    assert_ne!(without_timings(json(&a)), without_timings(json(&c)));
}

#[test]
fn verify_all_on_constructions() {
    let out = mcld(&["verify-all", "--construct", "threshold-pair", "9"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "single.json", r#"{"k": 2, "domain_size": 1, "functions": [[2]]}"#);
    assert_eq!(mcld(&["verify-all", f.to_str().unwrap()], &[]).status.code(), Some(0));
}

#[test]
fn covers_witness_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = threshold_pair_file(dir.path(), "5");
    let w = dir.path().join("cert.json");
    let out = mcld(&["covers", f.to_str().unwrap(), "--depth", "2", "--exact", "--witness", w.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(cert["verified"], true);
}

#[test]
fn online_and_dp_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "th.json", r#"{"k": 1, "domain_size": 3, "functions": [[1,0,0],[1,1,0],[1,1,1]]}"#);
    let out = mcld(&["online", f.to_str().unwrap(), "--learner", "soa", "--horizon", "3", "--adversary"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let data = write(dir.path(), "data.json", "[[0, 1], [2, 0]]");
    let out = mcld(&["dp-verify", f.to_str().unwrap(), "--data", data.to_str().unwrap(), "--eps", "1"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = mcld(
        &["learn", "--reduction", f.to_str().unwrap(), data.to_str().unwrap(), "--seed", "2", "--concept", "1"],
        &[],
    );
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
    assert!(json(&out)["data"].is_object());
}

#[test]
fn repdim_self_check() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.json", r#"{"k": 1, "domain_size": 2, "functions": [[0,0],[0,1],[1,1]]}"#);
    let out = mcld(&["repdim", f.to_str().unwrap(), "--bruteforce", "--wm-experiment", "--trials", "50"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
