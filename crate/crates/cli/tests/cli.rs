use std::path::Path;
use std::process::{Command, Output};

fn weilhecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weilhecke"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn thm52_suite_passes() {
    let o = weilhecke(&["verify", "--suite", "thm52", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cases = r["cases"].as_array().unwrap();
    assert!(!cases.is_empty());
    assert!(cases.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn falsifier_reports_witness() {
    let o = weilhecke(&["verify", "--suite", "falsifier", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let case = &r["cases"][0];
    assert_eq!(case["status"], "witness-found");
    assert!(!case["witness"].is_null());
}

#[test]
fn falsifier_is_documented_in_help() {
    let o = weilhecke(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).to_lowercase().contains("falsifier"));
}

#[test]
fn classical_mismatch_exits_one() {
    let o = weilhecke(&["verify", "--suite", "classical", "--json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["cases"][0]["status"], "fail");
}

#[test]
fn malformed_config_leaves_no_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\"cases\": [ {\"suite\": ");
    let out = dir.path().join("report.json");
    let o = weilhecke(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"cases": [{"suite": "thm52", "lattice": "A1", "p": 3, "l": 1, "s": 1, "colour": 1}]}"#,
    );
    let o = weilhecke(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn precondition_violation_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"cases": [{"suite": "thm52", "lattice": "A1", "p": 2, "l": 1, "s": 1}]}"#);
    let o = weilhecke(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("odd prime"));
}

#[test]
fn bad_usage_exits_two() {
    assert_eq!(weilhecke(&["theta", "--lattice", "A1"]).status.code(), Some(2));
    assert_eq!(weilhecke(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(weilhecke(&["theta", "--lattice", "Z7", "--precision", "1"]).status.code(), Some(2));
}

#[test]
fn theta_roundtrip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("theta.json");
    let o = weilhecke(&["theta", "--lattice", "A1", "--precision", "2", "--out", first.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let second = dir.path().join("again.json");
    let o = weilhecke(&[
        "apply",
        "--input",
        first.to_str().unwrap(),
        "--op",
        r#"{"op": "H", "n": 1}"#,
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    let text = std::fs::read_to_string(&first).unwrap();
    let parsed = weilhecke::VVExpansion::from_json(&text).unwrap();
    assert_eq!(format!("{}\n", parsed.to_json()), text);
}

fn theta_a1() -> serde_json::Value {
    let o = weilhecke(&["theta", "--lattice", "A1", "--precision", "2", "--json"]);
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn apply_identity(dir: &Path, v: &serde_json::Value) -> Output {
    let input = write(dir, "in.json", &serde_json::to_string_pretty(v).unwrap());
    weilhecke(&["apply", "--input", &input, "--op", r#"{"op": "H", "n": 1}"#])
}

#[test]
fn unknown_expansion_field_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = theta_a1();
    v["colour"] = serde_json::json!(1);
    let o = apply_identity(dir.path(), &v);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn off_grid_exponent_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = theta_a1();
    let coeffs = v["coefficients"].as_array_mut().unwrap();
    let entry = coeffs.iter_mut().find(|c| c["component"][0] == "1/2").unwrap();
    entry["n"] = serde_json::json!("1/2");
    let o = apply_identity(dir.path(), &v);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("q(λ)") || stderr(&o).contains("mod 1"), "{}", stderr(&o));
}

#[test]
fn weil_beta_both_agree() {
    let o = weilhecke(&["weil-beta", "--lattice", "A2", "--p", "3", "--l", "2", "--s", "3", "--h", "2", "--both", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["equal"], true);
}

#[test]
fn describe_module_counts_scaled_elements() {
    let o = weilhecke(&["describe-module", "--lattice", "A1+A1", "--scale", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 36);
}

#[test]
fn bs_descriptor_applies() {
    let dir = tempfile::tempdir().unwrap();
    let theta = dir.path().join("t.json");
    let o = weilhecke(&["theta", "--lattice", "A1+A1", "--precision", "2", "--out", theta.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = weilhecke(&[
        "apply",
        "--input",
        theta.to_str().unwrap(),
        "--op",
        r#"{"op": "bs", "p": 3, "l": 1, "s": 1}"#,
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b = weilhecke::VVExpansion::from_json(&stdout(&o)).unwrap();
    assert_eq!(b.get(0, &weilhecke::scalars::int(0)), weilhecke::Cyclotomic::from_fraction(&weilhecke::scalars::frac(-2, 3)));
}
