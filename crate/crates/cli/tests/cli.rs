use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};

fn ctent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctent")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn logistic_cumulative_entropy() {
    let v = json(&ctent(&["entropy", "--dist", "logistic", "--s", "0"]));
    assert_eq!(v["delta"].as_f64().unwrap(), 1.64493406685);
    assert_eq!(v["nabla"].as_f64().unwrap(), 1.64493406685);
}

#[test]
fn symmetric_bound_at_zero() {
    let v = json(&ctent(&["bounds", "--regime", "symmetric", "--s", "0"]));
    assert_eq!(v["upper"].as_f64().unwrap(), 0.906899682117);
    assert_eq!(v["maximizer"], "logistic(scaled)");
}

#[test]
fn two_point_sample_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# atoms at 0 and 1\n0\n\n1  # second").unwrap();
    let path = f.path().to_str().unwrap();
    let v = json(&ctent(&["estimate", "--file", path, "--s", "1"]));
    assert_eq!(v["delta"].as_f64().unwrap(), 0.25);
    let v = json(&ctent(&["entropy", "--file", path, "--s", "1"]));
    assert_eq!(v["method"], "plugin");
}

#[test]
fn exit_codes() {
    assert_eq!(ctent(&["entropy", "--dist", "logistic"]).status.code(), Some(1));
    assert_eq!(ctent(&["entropy", "--dist", "lomax", "--s", "1"]).status.code(), Some(1));
    assert_eq!(ctent(&["nosuchverb"]).status.code(), Some(1));
    let out = ctent(&["entropy", "--dist", "negative_lomax", "--param", "beta=2", "--s", "-0.6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("left tail"));
    assert_eq!(ctent(&["entropy", "--dist", "logistic", "--s", "-1"]).status.code(), Some(2));
    assert_eq!(ctent(&["--help"]).status.code(), Some(0));
}

#[test]
fn csv_grid_output() {
    let out = ctent(&["entropy", "--dist", "exponential", "--s-grid", "0:2:3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("dist,s,delta"));
    assert!(lines[1].starts_with("exponential(),0.0,0.644934066848"));
}

#[test]
fn simulation_is_deterministic_across_thread_counts() {
    let args = ["simulate", "--process", "ys", "--dist", "exponential", "--s", "2", "--trials", "200000", "--seed", "9"];
    let one = Command::new(env!("CARGO_BIN_EXE_ctent")).args(args).env("CTENT_THREADS", "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_ctent")).args(args).env("CTENT_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert!(v["z_score"].as_f64().unwrap().abs() < 4.0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gap.csv");
    let out = ctent(&["gammagap", "--s-grid", "0:1:3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next(), Some("s,phi"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn skewness_curve_and_risk() {
    let v = json(&ctent(&["skew", "--curve", "power-uniform", "--beta-grid", "-1:1:5"]));
    assert_eq!(v["rho_monotone"], true);
    assert_eq!(v["curve"].as_array().unwrap().len(), 5);
    let v = json(&ctent(&["risk", "--dist", "uniform", "--param", "scale=3", "--param", "shift=2", "--s", "1"]));
    assert_eq!(v["value"].as_f64().unwrap(), 4.0);
    let v = json(&ctent(&["skew", "--dist", "negative_exponential"]));
    assert!((v["rho"].as_f64().unwrap() + 0.365952713005).abs() < 1e-9);
}

#[test]
fn quick_selftest_passes() {
    let v = json(&ctent(&["selftest", "--level", "quick"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 7);
}
