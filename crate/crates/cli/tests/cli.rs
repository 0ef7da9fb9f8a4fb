use std::process::{Command, Output};

use serde_json::Value;

const POW_QUARTER: &str = r#"{"dim":1,"pieces":[{"lo":0,"hi":"inf","coef":1,"pow":0.25,"logpow":0}]}"#;
const PHI_2_1: &str = r#"{"dim":1,"pieces":[{"lo":0,"hi":1,"coef":1,"pow":0.5,"logpow":0},{"lo":1,"hi":"inf","coef":1,"pow":1,"logpow":0}]}"#;
const DECREASING: &str = r#"{"dim":1,"pieces":[{"lo":0,"hi":"inf","coef":1,"pow":-1,"logpow":0}]}"#;
const PLUS: &str = r#"{"dim":1,"pieces":[{"lo":0,"hi":1,"coef":1,"pow":0,"logpow":0},{"lo":1,"hi":"inf","coef":1,"pow":0.5,"logpow":0}]}"#;
const TWO_STEPS: &str = r#"{"dim":1,"mode":"dyadic","parts":[{"value":3.0,"level":2,"index":[0]},{"value":1.0,"level":0,"index":[1]}]}"#;

fn morrey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morrey")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn delta_boundary_case() {
    let out = morrey(&["delta", "--phi", POW_QUARTER, "-s", "-0.75", "-p", "0.5", "-q", "inf", "-d", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["delta_member"], Value::Bool(true));
    let out = morrey(&["delta", "--phi", POW_QUARTER, "-s", "-0.75", "-p", "0.5", "-q", "4"]);
    assert_eq!(json(&out)["delta_member"], Value::Bool(false));
}

#[test]
fn classify_morrey_lp_like() {
    let out = morrey(&["classify-morrey", "--phi", PHI_2_1, "-p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "LpLike");
    assert_eq!(v["exponent"], 1.0);
    assert_eq!(v["index_uG"], 1.0);
    assert!(!v["citations"].as_array().unwrap().is_empty());
}

#[test]
fn gp_rejection_exits_with_report() {
    let out = morrey(&["phi-check", "--phi", DECREASING, "-p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["is_member"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
    // Other commands reject the same weight the same way.
    let out = morrey(&["classify-morrey", "--phi", DECREASING, "-p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_3() {
    assert_eq!(morrey(&["delta", "--phi", "{oops", "-s", "0", "-p", "1", "-q", "1"]).status.code(), Some(3));
    assert_eq!(
        morrey(&["delta", "--phi", POW_QUARTER, "-s", "0", "-p", "1", "-q", "x"]).status.code(),
        Some(3)
    );
    assert_eq!(morrey(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(morrey(&["rearrange", "--fn", "/nonexistent/file.json"]).status.code(), Some(3));
}

#[test]
fn domain_errors_exit_1() {
    let out = morrey(&["classify-besov", "--phi", PLUS, "-s", "0", "-p", "2", "-q", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "not_regular");
}

#[test]
fn output_is_deterministic() {
    let args = ["envelope", "--phi", PHI_2_1, "-p", "1", "--t-grid", "1,0.5,0.25", "--budget", "8"];
    let a = morrey(&args);
    let b = morrey(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn envelope_csv() {
    let out = morrey(&["envelope", "--phi", PHI_2_1, "-p", "1", "--t-grid", "0.5,0.25", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("t,"));
}

#[test]
fn rearrange_and_norm() {
    let out = morrey(&["rearrange", "--fn", TWO_STEPS]);
    let v = json(&out);
    assert_eq!(v["steps"][0]["height"], 3.0);
    assert_eq!(v["steps"][0]["width"], "1/4");
    let out = morrey(&["norm-morrey", "--fn", TWO_STEPS, "--phi", PHI_2_1, "-p", "1"]);
    let v = json(&out);
    assert_eq!(v["exact"], true);
    assert!(v["norm"].as_f64().unwrap() > 0.0);
}

#[test]
fn besov_queries() {
    let base = ["--phi", PHI_2_1, "-s", "0", "-p", "1", "-q", "1"];
    let out = morrey(&[&["l1loc"][..], &base].concat());
    assert_eq!(json(&out)["l1loc"], "Yes");
    let out = morrey(&[&["classify-besov"][..], &base].concat());
    assert_eq!(json(&out)["kind"], "LpLike");
    let out = morrey(&[&["linfty"][..], &base].concat());
    assert_eq!(json(&out)["into_linfty"], false);
}

#[test]
fn embeddings() {
    let out = morrey(&[
        "embed-besov",
        "--phi",
        PHI_2_1,
        "-s",
        "0.5",
        "-p",
        "1",
        "-q",
        "2",
        "--phi2",
        PHI_2_1,
        "--s2",
        "0.25",
        "--p2",
        "1",
        "--q2",
        "2",
    ]);
    assert_eq!(json(&out)["holds"], true);
    let out = morrey(&["embed-morrey", "--phi", PHI_2_1, "-p", "1", "--phi2", POW_QUARTER, "--p2", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "out_of_scope");
}

#[test]
fn families() {
    let out = morrey(&["family", "--kind", "flat", "--phi", PHI_2_1, "-p", "1", "-j", "3", "--copies", "2"]);
    // φ(t) t^{-1} does not vanish at infinity, so translated copies are refused.
    assert_eq!(out.status.code(), Some(1));
    let out = morrey(&["family", "--kind", "flat", "--phi", PHI_2_1, "-p", "1", "-j", "3"]);
    assert!((json(&out)["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let out = morrey(&[
        "family", "--kind", "case4", "--phi", PHI_2_1, "-s", "0.25", "-p", "1", "-q", "2", "-j", "6",
    ]);
    let v = json(&out);
    assert_eq!(v["coefficients"]["entries"].as_array().unwrap().len(), 8);
    let out =
        morrey(&["family", "--kind", "witness", "--phi", POW_QUARTER, "-s", "0.25", "-p", "1", "-j", "10"]);
    let v = json(&out);
    assert!(v["norm"].as_f64().unwrap() <= 1.0 + 1e-12);
    assert!((v["sum"].as_f64().unwrap() - 11.0).abs() < 1e-9);
}

#[test]
fn spread_output_is_certified() {
    let f = r#"{"dim":1,"mode":"dyadic","parts":[{"value":2.0,"level":2,"index":[0]},{"value":1.0,"level":1,"index":[1]}]}"#;
    let out = morrey(&["spread", "--fn", f, "--phi", PHI_2_1, "-p", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert!(v["lower_bound"].as_f64().unwrap() <= 1.0 + 1e-9);
}
