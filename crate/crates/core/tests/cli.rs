//! The `saccel` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn saccel(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_saccel"));
    cmd.args(args).env_remove("SACCEL_SEED");
    if let Some(s) = seed {
        cmd.env("SACCEL_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, value: &Value) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn brownian() -> Value {
    json!({
        "experiment": "brownian_single",
        "master_seed": 3,
        "A": 1.0,
        "ensemble_size": 300,
        "steps_per_period": 100,
        "tolerances": {"variance_rel": 0.5, "ks_alpha": 0.0}
    })
}

fn report(dir: &Path) -> String {
    std::fs::read_to_string(dir.join("report.json")).unwrap()
}

#[test]
fn list_shows_every_experiment() {
    let out = saccel(&["list"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with(' ')).count(), 9);

    let out = saccel(&["list", "--json"], None);
    let rows: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().any(|r| r["name"] == "quasilinear_finite_m"));
}

#[test]
fn version_prints() {
    let out = saccel(&["version"], None);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("saccel "));
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &brownian());
    let out_dir = dir.path().join("out");
    let out = saccel(&["run", "--config", &config, "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "manifest.json", "variance.csv", "increments.csv"] {
        assert!(out_dir.join(f).is_file(), "{f} missing");
    }
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 3);
    assert_eq!(manifest["experiment"], "brownian_single");
}

#[test]
fn invalid_config_exits_two_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = brownian();
    bad["steps_per_period"] = json!(-5);
    let config = write_config(dir.path(), &bad);
    let out_dir = dir.path().join("out");
    let out = saccel(&["run", "--config", &config, "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());

    let out = saccel(&["run", "--config", &config, "--set", "A=-1", "--set", "steps_per_period=10"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut strict = brownian();
    strict["tolerances"]["variance_rel"] = json!(0.0);
    let config = write_config(dir.path(), &strict);
    let out_dir = dir.path().join("out");
    let out = saccel(&["run", "--config", &config, "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(out_dir.join("report.json").is_file());
}

#[test]
fn report_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &brownian());
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let out_dir = dir.path().join(format!("t{threads}"));
        let out = saccel(&["run", "--config", &config, "--threads", threads, "--out", out_dir.to_str().unwrap()], None);
        assert_eq!(out.status.code(), Some(0));
        reports.push(report(&out_dir));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn seed_env_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &brownian());
    let run = |name: &str, seed: Option<&str>, sets: &[&str]| {
        let out_dir = dir.path().join(name);
        let mut args = vec!["run", "--config", &config, "--out", out_dir.to_str().unwrap()];
        for s in sets {
            args.extend(["--set", s]);
        }
        let out = saccel(&args, seed);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let manifest: Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
        (report(&out_dir), manifest)
    };
    let (base, _) = run("base", None, &[]);
    let (env, manifest) = run("env", Some("77"), &[]);
    assert_eq!(manifest["master_seed"], 77);
    assert_ne!(base, env);
    let (explicit, _) = run("explicit", None, &["master_seed=77"]);
    assert_eq!(env, explicit);
    let (_, manifest) = run("both", Some("77"), &["master_seed=5", "ensemble_size=200"]);
    assert_eq!(manifest["master_seed"], 5);
    assert_eq!(manifest["config"]["ensemble_size"], 200);
}
