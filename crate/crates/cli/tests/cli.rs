use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn crowdpay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crowdpay"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn plumber() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/plumber.json")
        .display()
        .to_string()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid json")
}

#[test]
fn design_stores_exact_entries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scheme.json");
    let run = crowdpay(&[
        "design", "--scenario", "optimal-ic", "--world", &plumber(), "--n", "2", "--lambda", "1",
        "-o", out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let summary = String::from_utf8(run.stdout).unwrap();
    assert!(summary.contains("2.625") && summary.contains("1.542"), "{summary}");

    let scheme = json(&std::fs::read(&out).unwrap());
    assert_eq!(scheme["pay0"], serde_json::json!(["2.625", "0"]));
    assert_eq!(scheme["pay1"], serde_json::json!(["0", "37/24"]));
    assert_eq!(scheme["provenance"]["scenario"], "optimal-ic");
    assert_eq!(scheme["provenance"]["world_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn closed_form_matches_lp_output() {
    let lp = crowdpay(&["design", "--scenario", "optimal-ic", "--world", &plumber(), "--n", "4"]);
    let cf = crowdpay(&["design", "--scenario", "optimal-ic", "--closed-form", "--world", &plumber(), "--n", "4"]);
    assert!(lp.status.success() && cf.status.success());
    assert_eq!(json(&lp.stdout)["pay0"], json(&cf.stdout)["pay0"]);
    assert_eq!(json(&lp.stdout)["pay1"], json(&cf.stdout)["pay1"]);
}

#[test]
fn verify_reports_equilibria() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("s.json");
    let design = crowdpay(&[
        "design", "--scenario", "unique-symmetric", "--delta", "0.000001", "--world", &plumber(), "--n", "4",
        "-o", scheme.to_str().unwrap(),
    ]);
    assert!(design.status.success());
    let run = crowdpay(&[
        "verify", "--world", &plumber(), "--scheme", scheme.to_str().unwrap(), "--enumerate", "--dominance", "1",
    ]);
    assert!(run.status.success());
    let report = json(&run.stdout);
    assert_eq!(report["honest"]["is_ne"], true);
    let profiles: Vec<&Value> = report["equilibria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| &e["profile"])
        .collect();
    assert!(!profiles.iter().any(|p| p["lie"] == 4), "all-lie survives: {profiles:?}");
    assert!(report["dominance"][0]["holds"].is_boolean());
}

#[test]
fn infeasible_design_exits_one_with_json_error() {
    let run = crowdpay(&["design", "--scenario", "dominant", "--ncol", "3", "--world", &plumber(), "--n", "4"]);
    assert_eq!(run.status.code(), Some(1));
    let err = json(&run.stderr);
    assert_eq!(err["error"], "Infeasible");
    assert!(err["message"].is_string());
}

#[test]
fn missing_file_exits_one() {
    let run = crowdpay(&["generate", "--seed", "1", "-o", "/nonexistent/dir/w.json"]);
    assert_eq!(run.status.code(), Some(1));
    assert_eq!(json(&run.stderr)["error"], "Io");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(crowdpay(&["design", "--bogus"]).status.code(), Some(2));
    assert_eq!(crowdpay(&["experiment", "cost-curve"]).status.code(), Some(2));
}

#[test]
fn generate_is_reproducible() {
    let a = crowdpay(&["generate", "--seed", "7", "--index", "3"]);
    let b = crowdpay(&["generate", "--seed", "7", "--index", "3"]);
    let c = crowdpay(&["generate", "--seed", "7", "--index", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn experiment_writes_csv() {
    let run = crowdpay(&["experiment", "cost-curve", "--seed", "2", "--samples", "3", "--agents", "4", "--digits", "4"]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with('#'));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(data.len() >= 3, "{text}");
}
