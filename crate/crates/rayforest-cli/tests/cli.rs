//! End-to-end checks of the installed binary: output shape, exit codes,
//! and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rayforest"))
}

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn poly_reports_forest_polynomial() {
    let out = run(&["poly", "--graph", &data("k3.graph"), "--trees"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("forest-polynomial"));
    assert!(text.contains("tree-polynomial y_e*y_f + y_e*y_g + y_f*y_g"));
}

#[test]
fn delta_exit_codes() {
    // Success.
    let out = run(&["delta", "--graph", &data("k3.graph"), "--edges", "e,f"]);
    assert_eq!(out.status.code(), Some(0));
    // Usage error: identical edges.
    let out = run(&["delta", "--graph", &data("k3.graph"), "--edges", "e,e"]);
    assert_eq!(out.status.code(), Some(1));
    // Usage error from the argument parser itself.
    let out = run(&["delta", "--graph", &data("k3.graph")]);
    assert_eq!(out.status.code(), Some(1));
    // Parse error: missing file.
    let out = run(&["delta", "--graph", "/no/such/file", "--edges", "e,f"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cert_construct_verify_and_tamper() {
    let dir = std::env::temp_dir();
    let cert_path = dir.join("rayforest-cli-c4.cert");
    let out = run(&[
        "cert",
        "construct",
        "--graph",
        &data("c4.graph"),
        "--edges",
        "a,c",
        "--out",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("verdict verified"));

    let out = run(&[
        "cert",
        "verify",
        "--graph",
        &data("c4.graph"),
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Duplicate an inner-set line: the exit code must be 3 and the
    // message must carry the difference polynomial.
    let doc = std::fs::read_to_string(&cert_path).unwrap();
    let a_line = doc
        .lines()
        .find(|l| l.starts_with("a "))
        .unwrap()
        .to_string();
    let tampered = doc.replacen(&a_line, &format!("{a_line}\n{a_line}"), 1);
    let bad_path = dir.join("rayforest-cli-c4-bad.cert");
    std::fs::write(&bad_path, tampered).unwrap();
    let out = run(&[
        "cert",
        "verify",
        "--graph",
        &data("c4.graph"),
        "--cert",
        bad_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("difference"));
}

#[test]
fn cert_construct_rejects_k4() {
    let out = run(&[
        "cert",
        "construct",
        "--graph",
        &data("k4.graph"),
        "--edges",
        "e01,e23",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("not series-parallel"));
}

#[test]
fn cert_search_budget_exit_code() {
    let out = run(&[
        "cert",
        "search",
        "--graph",
        &data("k4.graph"),
        "--edges",
        "e01,e23",
        "--budget",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn survey_runs_are_byte_identical() {
    let args = [
        "survey",
        "--count",
        "5",
        "--seed",
        "9",
        "--max-steps",
        "5",
        "--trials",
        "2",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("summary tasks=5 passed=5 failures=0"));
}

#[test]
fn k33_command_succeeds() {
    let out = run(&["k33", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("four-negative-terms yes"));
}
