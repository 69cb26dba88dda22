//! End-to-end runs of the fischerlab binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fischerlab"))
}

fn run_ok(args: &[&str]) -> serde_json::Value {
    let output = bin().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "fischerlab {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("JSON output")
}

fn run_raw(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn decompose_hand_example() {
    let v = run_ok(&[
        "decompose",
        "--dim",
        "1",
        "--f",
        "z1^4",
        "--p",
        "z1^2 + 1",
    ]);
    assert_eq!(v["q"], "z1^2 - 1");
    assert_eq!(v["r"], "1");
    assert_eq!(v["kernel_check"], true);
    assert_eq!(v["reconstruction_check"], true);
}

#[test]
fn decompose_reads_document_input() {
    let dir = std::env::temp_dir();
    let path: PathBuf = dir.join("fischerlab_test_poly.json");
    let doc = serde_json::json!({
        "dim": 1,
        "terms": [ { "alpha": [2], "re": "1", "im": "0" } ]
    });
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let v = run_ok(&[
        "decompose",
        "--dim",
        "1",
        "--input",
        path.to_str().unwrap(),
        "--p",
        "z1^2 + 1",
    ]);
    assert_eq!(v["q"], "1");
    assert_eq!(v["r"], "-1");
    std::fs::remove_file(&path).ok();
}

#[test]
fn bound_matches_special_case() {
    let v = run_ok(&["bound", "--k", "2", "--beta1", "0", "--beta2", "0"]);
    assert_eq!(v["rho_max"], 2.0);
    assert_eq!(v["branch"], "TauWithinBetaTwo");
    assert_eq!(v["within_expected_range"], true);
}

#[test]
fn bound_rejects_bad_parameters() {
    let out = run_raw(&["bound", "--k", "1", "--beta1", "0", "--beta2", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ks_scan_json_and_csv() {
    let v = run_ok(&[
        "ks-scan",
        "--dim",
        "2",
        "--p",
        "z1^2",
        "--m-min",
        "0",
        "--m-max",
        "4",
    ]);
    let mu = v["report"]["mu"].as_array().unwrap();
    assert_eq!(mu.len(), 5);
    let expected = 2.0f64.sqrt();
    for x in mu {
        assert!((x.as_f64().unwrap() - expected).abs() < 1e-8);
    }

    let out = run_raw(&[
        "ks-scan",
        "--dim",
        "2",
        "--p",
        "z1^2",
        "--m-max",
        "2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("m,dim,mu,certified\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn ks_scan_reports_tau_admissibility() {
    let v = run_ok(&[
        "ks-scan",
        "--dim",
        "2",
        "--p",
        "z1^3",
        "--m-max",
        "2",
        "--tau",
        "2.5",
    ]);
    assert_eq!(v["tau_admissibility"]["admissible"], false);
}

#[test]
fn order_emits_csv() {
    let docs: Vec<serde_json::Value> = (0..=12u32)
        .map(|m| {
            serde_json::json!({
                "dim": 1,
                "terms": [ { "alpha": [m], "re": "1/100", "im": "0" } ]
            })
        })
        .collect();
    let path = std::env::temp_dir().join("fischerlab_test_csv_series.json");
    std::fs::write(&path, serde_json::to_string(&docs).unwrap()).unwrap();
    let out = run_raw(&[
        "order",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("m,sup_norm,apolar_norm\n"));
    assert_eq!(text.lines().count(), 14);
    std::fs::remove_file(&path).ok();
}

#[test]
fn ks_scan_rejects_inhomogeneous() {
    let out = run_raw(&["ks-scan", "--dim", "1", "--p", "z1^2 + 1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn order_of_truncated_exponential() {
    // Build slices z1^m/m! for m ≤ 60 as a series document.
    let mut docs = Vec::new();
    let mut fact = num_bigint::BigInt::from(1u32);
    for m in 0..=60u32 {
        if m > 0 {
            fact *= num_bigint::BigInt::from(m);
        }
        docs.push(serde_json::json!({
            "dim": 1,
            "terms": [ { "alpha": [m], "re": format!("1/{fact}"), "im": "0" } ]
        }));
    }
    let path = std::env::temp_dir().join("fischerlab_test_exp_series.json");
    std::fs::write(&path, serde_json::to_string(&docs).unwrap()).unwrap();
    let v = run_ok(&["order", "--input", path.to_str().unwrap()]);
    let rho = v["order_estimate"].as_f64().unwrap();
    assert!((0.9..=1.1).contains(&rho), "rho = {rho}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_suite_exits_zero() {
    let v = run_ok(&["verify", "--cases", "40", "--seed", "1"]);
    assert_eq!(v["all_passed"], true);
    for check in v["checks"].as_array().unwrap() {
        assert_eq!(check["failures"], 0, "{}", check["name"]);
    }
}

#[test]
fn verify_seed_env_override() {
    let out = bin()
        .args(["verify", "--cases", "10", "--seed", "3"])
        .env("FISCHERLAB_SEED", "99")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 99);
}

#[test]
fn lemma_check_end_to_end() {
    let seq: Vec<f64> = (0..40).map(|m| 0.5f64.powi(m)).collect();
    let path = std::env::temp_dir().join("fischerlab_test_sequence.json");
    std::fs::write(&path, serde_json::to_string(&seq).unwrap()).unwrap();
    let v = run_ok(&[
        "lemma-check",
        "--input",
        path.to_str().unwrap(),
        "--gap-set",
        "1",
        "--a",
        "2",
        "--sigma",
        "1",
        "--b0",
        "1",
        "--probe",
    ]);
    assert_eq!(v["regime"]["conclusion_applies"], true);
    assert_eq!(v["hypothesis_i"]["all_pass"], true);
    assert_eq!(v["probe"]["decreasing"], true);
    std::fs::remove_file(&path).ok();
}

#[test]
fn parse_error_exit_code_and_offset() {
    let out = run_raw(&["decompose", "--dim", "1", "--f", "z9", "--p", "z1^2+1"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("variable index out of range"), "{stderr}");
}
