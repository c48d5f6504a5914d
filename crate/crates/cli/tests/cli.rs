//! End-to-end runs of the `netbell` binary.
#![allow(clippy::approx_constant)]

use std::path::Path;
use std::process::{Command, Output};

fn netbell(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netbell")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn field(path: &Path, column: &str) -> f64 {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let idx = reader.headers().unwrap().iter().position(|h| h == column).unwrap();
    reader.records().next().unwrap().unwrap()[idx].parse().unwrap()
}

#[test]
fn maximize_example_a_reaches_root_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = netbell(dir.path(), &["maximize", "example-a", "--phi", "0.7854"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("example-a-maximize.csv");
    let want = (1.0 + (2.0 * 0.7854f64).sin().powi(2)).sqrt();
    assert!((field(&csv, "value") - want).abs() < 1e-9);
    assert!((want - 2f64.sqrt()).abs() < 1e-8);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("example-a-maximize.json")).unwrap()).unwrap();
    assert_eq!(json["command"], "maximize");
    assert_eq!(json["report"]["k"], 2);
    assert!(json["observables"].as_array().unwrap().len() == 4);
}

#[test]
fn classical_bound_of_example_a_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = netbell(dir.path(), &["classical-bound", "example-a"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(field(&dir.path().join("example-a-classical-bound.csv"), "value"), 1.0);
}

#[test]
fn tilted_star_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = netbell(dir.path(), &["tilted", "star", "--N", "3", "--phibar", "0.3927", "--beta", "auto"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("star-3-tilted.csv");
    let (s, c, t) = ((2.0 * 0.3927f64).sin(), (2.0 * 0.3927f64).cos(), (2.0 * 0.3927f64).tan());
    let beta = 1.0 / (1.0 + 2.0 * t * t).sqrt();
    let theta = s.atan();
    assert!((field(&csv, "beta") - beta).abs() < 1e-12);
    assert!((field(&csv, "theta") - theta).abs() < 1e-12);
    let g = beta * c + theta.cos() + theta.sin() * s;
    assert!((field(&csv, "G") - g).abs() < 1e-9);
    assert!(field(&csv, "G") > 1.0 + beta);
}

#[test]
fn csv_header_is_frozen() {
    let dir = tempfile::tempdir().unwrap();
    assert!(netbell(dir.path(), &["evaluate", "chsh", "--theta", "0.3"]).status.success());
    let mut reader = csv::Reader::from_path(dir.path().join("chsh-evaluate.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["scenario", "command", "theta", "beta", "I", "J", "P", "C", "value", "G", "classical_bound", "violation", "value_stderr", "seed"]
    );
    let theta: f64 = 0.3;
    let phi = std::f64::consts::FRAC_PI_8;
    assert!((field(&dir.path().join("chsh-evaluate.csv"), "I") - theta.cos()).abs() < 1e-12);
    assert!((field(&dir.path().join("chsh-evaluate.csv"), "J") - theta.sin() * (2.0 * phi).sin()).abs() < 1e-12);
}

#[test]
fn sampling_is_deterministic_and_records_rounds() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["sample", "chsh", "--rounds", "3000", "--seed", "9", "--mode", "per-qubit-discard", "--record"];
    assert!(netbell(a.path(), &args).status.success());
    assert!(netbell(b.path(), &args).status.success());
    for f in ["chsh-sample.json", "chsh-sample.csv", "chsh-rounds.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert_eq!(rows(&a.path().join("chsh-rounds.csv")).len(), 3000);
    assert_eq!(field(&a.path().join("chsh-sample.csv"), "seed"), 9.0);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_netbell"))
        .env("NETBELL_OUT", dir.path())
        .args(["evaluate", "five-one-three-split"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("five-one-three-split-evaluate.csv").exists());
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(netbell(dir.path(), &["validate", "example-a"]).status.code(), Some(0));

    let example = netbell_core::Scenario::builtin("example-a", Default::default()).unwrap();
    let mut s: serde_json::Value = serde_json::from_str(&example.to_json().unwrap()).unwrap();
    s["M"] = 2.into();
    let path = dir.path().join("two-receivers.json");
    std::fs::write(&path, s.to_string()).unwrap();
    let out = netbell(dir.path(), &["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL R2"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n \"name\": \"x\",\n").unwrap();
    let out = netbell(dir.path(), &["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let out = netbell(dir.path(), &["evaluate", "chsh", "--grid", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = netbell(dir.path(), &["sample", "chsh", "--beta", "0.5", "--mode", "direct-observable"]);
    assert_eq!(out.status.code(), Some(1));
    let out = netbell(dir.path(), &["evaluate", "chsh", "--N", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = netbell(dir.path(), &["evaluate", "star", "--N", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    std::fs::write(&file, "x").unwrap();
    let out = netbell(&file.join("sub"), &["evaluate", "chsh"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reproduce_paper_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = netbell(dir.path(), &["reproduce-paper"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 10);
    assert!(!rows(&dir.path().join("reproduce-paper.csv")).is_empty());
}
