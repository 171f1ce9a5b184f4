use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const SQUARE_DATASET: &str = r#"{
  "base_kernel": {"type": "rbf", "gamma": 1.0},
  "tuples": [
    {"label": "AB", "elements": [[0, 0], [1, 0]]},
    {"label": "AC", "elements": [[0, 0], [1, 1]]},
    {"label": "AD", "elements": [[0, 0], [0, 1]]},
    {"label": "BC", "elements": [[1, 0], [1, 1]]},
    {"label": "BD", "elements": [[1, 0], [0, 1]]},
    {"label": "CD", "elements": [[1, 1], [0, 1]]}
  ]
}"#;

fn oakernel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oakernel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn oakernel_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_oakernel"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn counterexample_is_refuted() {
    let out = oakernel(&["counterexample", "--gamma", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["refuted"], Value::Bool(true));
    assert_eq!(report["verdict"]["psd"], Value::Bool(false));
    let gap = report["contradiction_gap"].as_f64().unwrap();
    assert!((gap - 0.2696).abs() < 1e-4);
}

#[test]
fn counterexample_rejects_bad_gamma() {
    assert_eq!(
        oakernel(&["counterexample", "--gamma", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        oakernel(&["counterexample", "--gamma", "abc"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn spectrum_of_identity_csv() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "eye.csv", "1,0,0\n0,1,0\n0,0,1\n");
    let out = oakernel(&["spectrum", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    assert_eq!(s["psd"], Value::Bool(true));
    assert_eq!(s["margin"].as_f64(), Some(1.0));
    for v in s["eigenvalues"].as_array().unwrap() {
        assert_eq!(v.as_f64(), Some(1.0));
    }
}

#[test]
fn gram_piped_into_spectrum_matches_report() {
    let dir = TempDir::new().unwrap();
    let dataset = write(&dir, "square.json", SQUARE_DATASET);
    let report = json(&oakernel(&["counterexample", "--gamma", "1"]));

    for format in ["json", "csv"] {
        let gram = oakernel(&["gram", "--input", &dataset, "--format", format]);
        assert_eq!(gram.status.code(), Some(0));
        let gram_text = String::from_utf8(gram.stdout).unwrap();
        let spec = oakernel_stdin(&["spectrum", "--input", "-"], &gram_text);
        assert_eq!(spec.status.code(), Some(0));
        let s = json(&spec);
        assert_eq!(s["psd"], report["verdict"]["psd"]);
        assert_eq!(
            s["eigenvalues"], report["spectrum"]["eigenvalues"],
            "format {format}"
        );
    }
    let gram = json(&oakernel(&["gram", "--input", &dataset]));
    assert_eq!(gram["values"], report["gram_computed"]["values"]);
    assert_eq!(gram["labels"], report["gram_computed"]["labels"]);
}

#[test]
fn repair_then_spectrum_is_psd() {
    let dir = TempDir::new().unwrap();
    let dataset = write(&dir, "square.json", SQUARE_DATASET);
    let gram_path = dir.path().join("gram.json");
    let repaired_path = dir.path().join("repaired.csv");
    let status = oakernel(&[
        "gram",
        "--input",
        &dataset,
        "--output",
        path_str(&gram_path),
    ])
    .status;
    assert_eq!(status.code(), Some(0));
    let before = json(&oakernel(&["spectrum", "--input", path_str(&gram_path)]));
    assert_eq!(before["psd"], Value::Bool(false));

    let status = oakernel(&[
        "repair",
        "--input",
        path_str(&gram_path),
        "--format",
        "csv",
        "--output",
        path_str(&repaired_path),
    ])
    .status;
    assert_eq!(status.code(), Some(0));
    let after = json(&oakernel(&[
        "spectrum",
        "--input",
        path_str(&repaired_path),
    ]));
    assert_eq!(after["psd"], Value::Bool(true));
}

#[test]
fn sweep_csv_and_json() {
    let out = oakernel(&["sweep", "--grid", "0.5,1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "gamma,a,lambda_min,witness_value,contradiction_gap,refuted"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));

    let rows = json(&oakernel(&["sweep", "--grid", "1", "--format", "json"]));
    assert_eq!(rows[0]["refuted"], Value::Bool(true));
    assert_eq!(
        oakernel(&["sweep", "--grid", "1,-1"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_min_kernel_exit_codes() {
    let out = oakernel(&["verify-min-kernel", "--lengths", "1,2,3,5,8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["psd"], Value::Bool(true));
    assert_eq!(
        v["gram"]["values"][2],
        serde_json::json!([1.0, 2.0, 3.0, 3.0, 3.0])
    );
    assert_eq!(
        oakernel(&["verify-min-kernel", "--lengths", "0,2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        oakernel(&["spectrum", "--input", path_str(&missing)])
            .status
            .code(),
        Some(1)
    );
    let bad = write(&dir, "bad.csv", "1,2\n3,1\n");
    assert_eq!(
        oakernel(&["spectrum", "--input", &bad]).status.code(),
        Some(1)
    );
    let bad_ds = write(
        &dir,
        "bad.json",
        r#"{"base_kernel":{"type":"rbf","gamma":1},"tuples":[{"elements":["x"]}]}"#,
    );
    assert_eq!(
        oakernel(&["gram", "--input", &bad_ds]).status.code(),
        Some(1)
    );
    assert_eq!(oakernel(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let dataset = write(&dir, "square.json", SQUARE_DATASET);
    let runs: [&[&str]; 4] = [
        &["counterexample", "--gamma", "0.7"],
        &["sweep"],
        &["gram", "--input", &dataset, "--format", "csv"],
        &["verify-min-kernel", "--lengths", "4,9,2,7"],
    ];
    for args in runs {
        let a = oakernel(args).stdout;
        let b = oakernel(args).stdout;
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}
