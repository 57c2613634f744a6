use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use numrange::io::parse_matrix;
use numrange::matrix::ComplexMatrix;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_numrange"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn diag_file(dir: &Path, name: &str, d: &[f64]) -> PathBuf {
    let n = d.len();
    let re: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect())
        .collect();
    let im = vec![vec![0.0; n]; n];
    write(dir, name, &serde_json::json!({ "n": n, "re": re, "im": im }).to_string())
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_identity() {
    let dir = TempDir::new().unwrap();
    let input = diag_file(dir.path(), "id2.json", &[1.0, 1.0]);
    let out = dir.path().join("report.json");
    let o = run(&["analyze", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert!((v["radius"]["omega"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["sector"]["alpha"].as_f64().unwrap(), 0.0);
    assert_eq!(v["sector"]["accretive"], Value::Bool(true));
}

#[test]
fn power_of_diagonal() {
    let dir = TempDir::new().unwrap();
    let input = diag_file(dir.path(), "d49.json", &[4.0, 9.0]);
    let out = dir.path().join("r.json");
    let o = run(&[
        "power",
        "--t",
        "0.5",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let r = parse_matrix(&text).unwrap();
    assert!(r.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) <= 1e-10);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["power"]["method"], "both");
    assert!(v["power"]["discrepancy"].as_f64().unwrap() < 1e-10);
}

#[test]
fn power_output_round_trips_bitwise() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "a.json",
        r#"{"n": 2, "re": [[2.0, 0.3], [-0.1, 1.5]], "im": [[0.4, -0.2], [0.7, 0.1]]}"#,
    );
    let out = dir.path().join("p.json");
    let o = run(&[
        "power",
        "--t",
        "0.37",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let a = parse_matrix(&fs::read_to_string(&input).unwrap()).unwrap();
    let expect = numrange::power::fractional_power(&a, 0.37).unwrap().value;
    let got = parse_matrix(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(got, expect);
}

#[test]
fn range_csv() {
    let dir = TempDir::new().unwrap();
    let input = diag_file(dir.path(), "d.json", &[1.0, 3.0]);
    let out = dir.path().join("b.csv");
    let o = run(&[
        "range",
        "--input",
        input.to_str().unwrap(),
        "--grid",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,re,im");
    assert_eq!(lines.len(), 9);
    // theta = 0 supports at the largest eigenvalue
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 3.0, 0.0]);
}

#[test]
fn verify_ad_main_inequality() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v.json");
    let o = run(&[
        "verify",
        "--class",
        "ad",
        "--pid",
        "P3",
        "--samples",
        "100",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["properties"]["P3"]["violations"], 0);
    assert_eq!(v["properties"]["P3"]["samples"], 900);
    assert_eq!(v["seed"], 1);
    assert!(v["meta"]["wall_time_seconds"].is_number());
}

#[test]
fn verify_is_reproducible_modulo_meta() {
    let dir = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let o = run(&[
            "verify",
            "--class",
            "generic",
            "--pid",
            "P1",
            "--pid",
            "P10",
            "--samples",
            "10",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("meta");
        reports.push(v);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn hunt_scalars() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("h.json");
    let o = run(&[
        "hunt",
        "--budget",
        "50",
        "--n-min",
        "1",
        "--n-max",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert!(v["best_margin"].as_f64().unwrap().abs() <= 1e-10);
    assert_eq!(v["counterexample"], Value::Bool(false));
    assert_eq!(v["iterations"], 50);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["power", "--t", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--input", "/nonexistent/m.json"]).status.code(), Some(1));

    let dir = TempDir::new().unwrap();
    let neg = diag_file(dir.path(), "neg.json", &[1.0, -1.0]);
    let o = run(&["power", "--t", "0.5", "--input", neg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("branch cut"));

    let id = diag_file(dir.path(), "id.json", &[1.0, 1.0]);
    assert_eq!(run(&["power", "--t", "1.5", "--input", id.to_str().unwrap()]).status.code(), Some(1));
    let missing_dir = dir.path().join("nope").join("out.json");
    let o = run(&[
        "analyze",
        "--input",
        id.to_str().unwrap(),
        "--out",
        missing_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["verify", "--class", "sectorial", "--samples", "1"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--pid", "P99", "--samples", "1"]).status.code(), Some(1));
    assert_eq!(run(&["hunt", "--class", "generic", "--budget", "1"]).status.code(), Some(1));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let ragged = write(dir.path(), "r.json", r#"{"n": 2, "re": [[1, 0], [0]], "im": [[0, 0], [0, 0]]}"#);
    let o = run(&["analyze", "--input", ragged.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let garbage = write(dir.path(), "g.json", "not json");
    assert_eq!(run(&["analyze", "--input", garbage.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn not_accretive_quadrature_failure_names_precondition() {
    let dir = TempDir::new().unwrap();
    // Jordan block with Re A indefinite: the spectral route is defective and
    // quadrature needs accretivity.
    let j = write(dir.path(), "j.json", r#"{"n": 2, "re": [[1, 3], [0, 1]], "im": [[0, 0], [0, 0]]}"#);
    let o = run(&["power", "--t", "0.5", "--input", j.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("accretive") || err.contains("condition"), "{err}");
}
