//! End-to-end tests of the command-line interface: output contracts,
//! exit statuses, determinism, and failure reporting.

use std::path::PathBuf;
use std::process::{Command, Output};

fn write_spec(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmatrix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const MIXED_CHAIN: &str =
    r#"{"eta": "1", "sites": [{"two_l": 1, "delta": "0"}, {"two_l": 2, "delta": "3"}]}"#;
const TWO_HALF_CHAIN: &str =
    r#"{"eta": "1", "sites": [{"two_l": 1, "delta": "0"}, {"two_l": 1, "delta": "3"}]}"#;
const OVERLAPPING_CHAIN: &str =
    r#"{"eta": "1", "sites": [{"two_l": 1, "delta": "0"}, {"two_l": 1, "delta": "0"}]}"#;
const SINGLE_SITE: &str = r#"{"eta": "1", "sites": [{"two_l": 1, "delta": "0"}]}"#;
const REFERENCE_THREE: &str = r#"{"eta": "1", "sites": [{"two_l": 1, "delta": "0"}, {"two_l": 2, "delta": "5"}, {"two_l": 3, "delta": "11"}]}"#;

#[test]
fn spectrum_prints_lattices_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "chain.json", MIXED_CHAIN);
    let out = run(&["spectrum", "--spec", spec.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Lambda_1 = {-1/2, 1/2}"), "{text}");
    assert!(text.contains("Lambda_2 = {2, 3, 4}"), "{text}");
    assert!(text.contains("disjoint: true"), "{text}");
}

#[test]
fn spectrum_overlapping_strict_exit() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "chain.json", OVERLAPPING_CHAIN);
    let out = run(&["spectrum", "--spec", spec.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("disjoint: false"));
    let out = run(&["spectrum", "--spec", spec.to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_spec_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "broken.json", r#"{"eta": "1", "sites": ["#);
    let out = run(&["spectrum", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("invalid chain spec"), "{}", stderr(&out));
}

#[test]
fn build_f_single_site_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "one.json", SINGLE_SITE);
    let out = run(&["build", "--spec", spec.to_str().unwrap(), "--object", "f"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["object"], "f");
    assert_eq!(v["matrix"]["rows"], 2);
    assert_eq!(v["matrix"]["entries"][0][0], "1");
    assert_eq!(v["matrix"]["entries"][0][1], "0");
    assert_eq!(v["matrix"]["entries"][1][0], "0");
    assert_eq!(v["matrix"]["entries"][1][1], "1");
}

#[test]
fn build_q_two_spin_half_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "two.json", TWO_HALF_CHAIN);
    let out = run(&["build", "--spec", spec.to_str().unwrap(), "--object", "q"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let e = &v["matrix"]["entries"];
    let diag: Vec<&str> = (0..4).map(|i| e[i][i].as_str().unwrap()).collect();
    assert_eq!(diag, vec!["1", "1", "3/2", "1"]);
}

#[test]
fn build_r_spin_half_pair_is_fundamental() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "r.json",
        r#"{"eta": "1", "sites": [{"two_l": 1, "delta": "1"}, {"two_l": 1, "delta": "0"}]}"#,
    );
    let out = run(&["build", "--spec", spec.to_str().unwrap(), "--object", "r"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let e = &v["matrix"]["entries"];
    assert_eq!(e[0][0], "1");
    assert_eq!(e[1][1], "1/2");
    assert_eq!(e[1][2], "1/2");
    assert_eq!(e[2][1], "1/2");
    assert_eq!(e[3][3], "1");
}

#[test]
fn build_separated_emits_all_three_families() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "chain.json", MIXED_CHAIN);
    let out = run(&["build", "--spec", spec.to_str().unwrap(), "--object", "separated"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["x_hat"].as_array().unwrap().len(), 2);
    assert_eq!(v["x_plus"].as_array().unwrap().len(), 2);
    assert_eq!(v["x_minus"].as_array().unwrap().len(), 2);
    // x_hat at the first site is diag(delta1 + eta/2, ..., delta1 - eta/2)
    assert_eq!(v["x_hat"][0]["entries"][0][0], "1/2");
}

#[test]
fn build_r_rejects_wrong_site_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "one.json", SINGLE_SITE);
    let out = run(&["build", "--spec", spec.to_str().unwrap(), "--object", "r"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exactly 2 sites"));
}

#[test]
fn build_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "chain.json", MIXED_CHAIN);
    let a = run(&["build", "--spec", spec.to_str().unwrap(), "--object", "monodromy"]);
    let b = run(&["build", "--spec", spec.to_str().unwrap(), "--object", "monodromy"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // same through --out
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    run(&[
        "build",
        "--spec",
        spec.to_str().unwrap(),
        "--object",
        "f",
        "--out",
        out_a.to_str().unwrap(),
    ]);
    run(&[
        "build",
        "--spec",
        spec.to_str().unwrap(),
        "--object",
        "f",
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
}

#[test]
fn build_non_generic_names_the_factor() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "bad.json", OVERLAPPING_CHAIN);
    let out = run(&["build", "--spec", spec.to_str().unwrap(), "--object", "f"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("non-generic"), "{err}");
    assert!(err.contains("delta[1] - delta[2]"), "{err}");
}

#[test]
fn verify_all_reference_chain_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "ref.json", REFERENCE_THREE);
    let report = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--suite",
        "all",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("overall: pass"));
    assert!(!text.contains("FAIL"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["overall"], "pass");
    assert!(v["checks"].as_array().unwrap().len() > 10);
    assert!(v["version"].is_string());
    assert_eq!(v["spec"]["eta"], "1");
}

#[test]
fn verify_twist_single_site_trivially_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "one.json", SINGLE_SITE);
    let out = run(&["verify", "--spec", spec.to_str().unwrap(), "--suite", "twist"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("overall: pass"));
}

#[test]
fn verify_corrupted_r_reports_first_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "chain.json", MIXED_CHAIN);
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--suite",
        "ybe",
        "--corrupt",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("ybe-corrupted-control: FAIL at (0, 0)"), "{text}");
    assert!(text.contains("overall: fail"));
}

#[test]
fn verify_non_generic_is_a_distinct_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "bad.json", OVERLAPPING_CHAIN);
    let out = run(&["verify", "--spec", spec.to_str().unwrap(), "--suite", "twist"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("genericity: FAIL"), "{text}");
    assert!(text.contains("overall: fail"));
}

#[test]
fn max_dim_guard_refuses_large_chains() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "chain.json", MIXED_CHAIN);
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--suite",
        "rtt",
        "--max-dim",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exceeds --max-dim"));
}

#[test]
fn verify_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "chain.json", MIXED_CHAIN);
    let args = ["verify", "--spec", spec.to_str().unwrap(), "--suite", "rtt"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
