use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn rectify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rectify"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rectify-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn lemma1_on_generated_triangle() {
    let out = rectify(&[
        "verify-lemma1",
        "--gen",
        "triangle",
        "--m",
        "1",
        "--p",
        "2",
        "--alpha",
        "0",
        "--R",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    assert!(results
        .iter()
        .all(|r| r["pass"] == true && r["exact"] == true));
    assert_eq!(results[0]["constant"], 24576.0);
    assert_eq!(doc["seed"], 0);
}

#[test]
fn beta_and_curvature_from_csv() {
    let dir = scratch("csv");
    let line = dir.join("line.csv");
    fs::write(&line, "x0,x1\n0,0\n0.5,0.5\n-0.25,-0.25\n1,1\n").unwrap();
    let out = rectify(&[
        "beta",
        "--input",
        line.to_str().unwrap(),
        "--center",
        "0,0",
        "--r",
        "1",
        "--m",
        "1",
        "--p",
        "2",
        "--centred",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["results"]["value"], 0.0);

    let tri = dir.join("tri.csv");
    fs::write(&tri, "x0,x1\n0,0\n1,0\n0.5,0.5\n").unwrap();
    let out = rectify(&[
        "curvature",
        "--input",
        tri.to_str().unwrap(),
        "--center",
        "0,0",
        "--R",
        "inf",
        "--m",
        "1",
        "--p",
        "2",
        "--alpha",
        "0",
        "--mode",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value = stdout_json(&out)["results"]["value"].as_f64().unwrap();
    assert!((value - 0.5).abs() < 1e-12);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn input_errors_exit_two_with_code() {
    let dir = scratch("bad");
    let bad = dir.join("bad.csv");
    fs::write(&bad, "x0,x1,w\n0,0,-1\n").unwrap();
    let out = rectify(&["info", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "input_error");
    assert!(out.stdout.is_empty());

    let out = rectify(&[
        "info",
        "--gen",
        "triangle",
        "--input",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "usage_error");

    let out = rectify(&[
        "curvature",
        "--gen",
        "triangle",
        "--center",
        "0,0",
        "--m",
        "1",
        "--R",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_is_written_to_output_file() {
    let dir = scratch("out");
    let path = dir.join("bounds.json");
    let out = rectify(&[
        "verify-bounds",
        "--samples",
        "200",
        "--seed",
        "4",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "verify-bounds");
    assert_eq!(doc["seed"], 4);
    assert_eq!(doc["results"][0]["pass"], true);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn plane_supported_inputs_are_vacuous() {
    let out = rectify(&[
        "verify-lemma2",
        "--gen",
        "plane:per_side=3",
        "--level",
        "0",
        "--m",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    for r in doc["results"].as_array().unwrap() {
        assert_eq!(
            (r["lhs"].as_f64(), r["rhs"].as_f64()),
            (Some(0.0), Some(0.0))
        );
        assert_eq!(r["vacuous"], true);
    }
}

#[test]
fn profile_csv_columns() {
    let out = rectify(&[
        "--format",
        "csv",
        "profile",
        "--gen",
        "right_triangle",
        "--center",
        "0,0",
        "--rho",
        "2",
        "--m",
        "1",
        "--centred",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r_lo,r_hi,mass,beta_numerator"));
    assert_eq!(lines.next(), Some("0,1,1,0"));
    assert_eq!(lines.next(), Some("1,2,3,1"));
}
