use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn antpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_antpath")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    let out = dir.join("out");
    fs::write(&path, format!("schema_version = 1\n{body}\n[output]\ndir = {:?}\n", out.to_str().unwrap())).unwrap();
    path.to_str().unwrap().to_string()
}

const LOSANGE: &str = r#"
[graph]
named = "losange"
[process]
rule = "uniform-geodesic"
[run]
steps = 3000
replicas = 8
master_seed = 42
"#;

#[test]
fn balanced_bridge_has_unit_conductance() {
    let out = antpath(&["conductance", "--graph", "losange", "--weights", "1,1,1,1,1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["graph"], "losange");
}

#[test]
fn losange_point_reports_exact_probabilities() {
    let out = antpath(&["losange-analytics", "--point", "0.5,0.5,0.5,0.5,0.5", "--epsilon", "0.1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["probabilities"]["left_across"].as_f64().unwrap() - 1.0 / 13.0).abs() < 1e-12);
    assert!((v["probabilities"]["left"].as_f64().unwrap() - 11.0 / 26.0).abs() < 1e-12);
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), LOSANGE);
    let read = || {
        let out = antpath(&["simulate", "--config", &config, "--check"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let series = fs::read(dir.path().join("out/series.csv")).unwrap();
        let summary = fs::read(dir.path().join("out/summary.json")).unwrap();
        (series, summary, out.stdout)
    };
    let first = read();
    let second = read();
    assert!(first == second);
}

#[test]
fn outputs_carry_schema_and_config_echo() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), LOSANGE);
    let out = antpath(&["simulate", "--config", &config, "--replicas", "2", "--steps", "500"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("out/series.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema_version: 1"));
    let echo: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(echo["run"]["replicas"], 2);
    assert_eq!(echo["run"]["steps"], 500);
    assert_eq!(lines.next(), Some("replica,n,w0,w1,w2,w3,w4,conductance,geodesic"));
    let mut rows = 0;
    for line in lines {
        let f: Vec<u64> = line.split(',').take(7).map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[2] + f[5], f[1] + 2);
        assert_eq!(f[3] + f[6], f[1] + 2);
        rows += 1;
    }
    assert!(rows > 10);
    let summary: Value = serde_json::from_slice(&fs::read(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["config"], echo);
    assert_eq!(summary["replicas"]["completed"], 2);
}

#[test]
fn config_errors_name_the_field_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &LOSANGE.replace("replicas = 8", "replicas = 8\nrepilcas = 3"));
    let out = antpath(&["simulate", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run.repilcas"));
    let out = antpath(&["conductance", "--graph", "losange", "--sp", "e"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn all_failed_replicas_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &LOSANGE.replace("[run]", "step_cap = 1\n[run]"));
    let out = antpath(&["simulate", "--config", &config]);
    assert_eq!(out.status.code(), Some(3));
    let summary: Value = serde_json::from_slice(&fs::read(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["replicas"]["failed"], 8);
}

#[test]
fn failed_checks_exit_4() {
    let out = antpath(&["losange-analytics", "--point", "0.9,0.1,0.05,0.9,0.1", "--epsilon", "0.1", "--check"]);
    assert_eq!(out.status.code(), Some(4));
    let out = antpath(&["losange-analytics", "--point", "0.5,0.5,0.5,0.5,0.5", "--epsilon", "0.1", "--check"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn counterexample_and_urn_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = antpath(&["counterexample", "--length", "20", "--steps", "2000", "--replicas", "4", "--out-dir", d, "--check"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["drift_negative_on_grid"], true);
    assert!(v["symmetry_error"].as_f64().unwrap() < 1e-12);
    let drift = fs::read_to_string(dir.path().join("drift.csv")).unwrap();
    assert_eq!(drift.lines().nth(2), Some("x,p,drift,p_mirror"));
    assert_eq!(drift.lines().count(), 3 + 5);

    let out = antpath(&["urn", "--kind", "friedman", "--n", "1000", "--replicas", "3", "--out-dir", d]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["replicas"]["completed"], 3);
    let urn = fs::read_to_string(dir.path().join("urn.csv")).unwrap();
    assert_eq!(urn.lines().nth(2), Some("replica,n,r"));
}

#[test]
fn sublinear_classes_add_up() {
    let dir = tempfile::tempdir().unwrap();
    let out = antpath(&[
        "sublinear-superlinear",
        "--exponent",
        "2",
        "--steps",
        "2000",
        "--replicas",
        "10",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let c = &v["counts"];
    let total = ["direct", "detour", "all-survive"].iter().map(|k| c[k].as_u64().unwrap()).sum::<u64>();
    assert_eq!(total, 10);
}
