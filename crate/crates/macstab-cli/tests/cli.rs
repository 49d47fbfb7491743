//! End-to-end tests of the compiled binary: exit codes, output record
//! shape, CSV layout, and reproducibility across invocations.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_macstab"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON record")
}

const SINGLE: &str = r#"{
    "coding": { "m": [2], "p": [3.0], "sigma2": 1.0, "rho": 1.0, "pe": 0.01 },
    "k": 1,
    "w": 1000.0,
    "arrivals": [ { "kind": "bernoulli", "q": 0.15 } ],
    "policy": { "target": [0.15] },
    "run": { "horizon": 100000, "seed": 21 }
}"#;

const PAIR: &str = r#"{
    "coding": { "m": [2, 2], "p": [1.0, 1.0], "sigma2": 1.0, "rho": 1.0, "pe": 0.01 },
    "k": 2
}"#;

#[test]
fn nlen_reports_canonical_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "single.json", SINGLE);
    let output = bin().args(["nlen", "--config", &config]).output().unwrap();
    let record = stdout_json(&output);

    assert_eq!(record["command"], "nlen");
    let row = &record["outputs"]["schedules"][0];
    assert_eq!(row["schedule"], "1");
    assert_eq!(row["n"], 6);
    assert_eq!(row["lower"], 6);
    assert_eq!(row["upper"], 6);
    assert!((row["chi_at_n"].as_f64().unwrap() - 0.008192).abs() < 1e-9);
    assert!((row["chi_before"].as_f64().unwrap() - 0.02048).abs() < 1e-9);
}

#[test]
fn nlen_flags_unreachable_reliability() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "rho0.json",
        r#"{
            "coding": { "m": [2], "p": [3.0], "sigma2": 1.0, "rho": 0.0, "pe": 0.01 },
            "k": 1
        }"#,
    );
    let output = bin().args(["nlen", "--config", &config]).output().unwrap();
    assert_eq!(output.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("constant at 1"), "stderr was: {stderr}");
}

#[test]
fn regions_writes_catalog_and_boundary_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "pair.json", PAIR);
    let out = dir.path().join("regions.csv");
    let output = bin()
        .args(["regions", "--config", &config, "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    let record = stdout_json(&output);
    assert_eq!(record["outputs"]["catalog_rows"], 5);

    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "schedule;N;v_1;v_2;Rbar_1;Rbar_2");
    assert!(lines.iter().any(|l| l.starts_with("1,1;15;")));
    assert!(lines.contains(&"region;dir_1;dir_2;radius"));

    // The diagonal capacity radius solves r*(d1+d2) = ln 3.
    let diagonal = lines
        .iter()
        .find(|l| l.starts_with("capacity;0.7071"))
        .expect("diagonal capacity row");
    let radius: f64 = diagonal.rsplit(';').next().unwrap().parse().unwrap();
    assert!((radius - 3.0f64.ln() / 2.0f64.sqrt()).abs() < 1e-9);
}

#[test]
fn regions_requires_the_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "pair.json", PAIR);
    let output = bin().args(["regions", "--config", &config]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn policy_synthesizes_interior_targets() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "single.json", SINGLE);
    let output = bin().args(["policy", "--config", &config]).output().unwrap();
    let record = stdout_json(&output);

    let outputs = &record["outputs"];
    assert_eq!(outputs["origin"], "synthesized");
    assert_eq!(outputs["probabilities"][1], 1.0);
    assert!((outputs["psi"][0].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert!((outputs["margin"].as_f64().unwrap() - (1.0 / 6.0 - 0.15)).abs() < 1e-9);
    // Messages per second are exactly the bandwidth times the per-slot mean.
    assert_eq!(outputs["lambda_per_second"][0], 150.0);
}

#[test]
fn policy_rejects_targets_outside_the_region() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "single.json", SINGLE);
    let output = bin()
        .args(["policy", "--config", &config, "--rate", "0.2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&output.stderr).contains("slack"));
}

#[test]
fn simulate_is_reproducible_and_writes_series() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "single.json", SINGLE);
    let out = dir.path().join("series.csv");

    let first = stdout_json(
        &bin()
            .args(["simulate", "--config", &config, "--out", out.to_str().unwrap()])
            .output()
            .unwrap(),
    );
    let second = stdout_json(&bin().args(["simulate", "--config", &config]).output().unwrap());

    assert_eq!(first["outputs"]["digest"], second["outputs"]["digest"]);
    assert_eq!(first["outputs"]["invariant_violations"], 0);
    let rate = first["outputs"]["queue_departure_rates"][0].as_f64().unwrap();
    assert!((rate - 0.15).abs() < 0.01, "departure rate {rate}");

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("slot;backlog;workload"));
    assert!(lines.count() > 1000);
}

#[test]
fn simulate_rejects_a_zero_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "single.json", SINGLE);
    let output = bin()
        .args(["simulate", "--config", &config, "--horizon", "0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn simulate_expands_sweeps_with_derived_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.json",
        r#"{
            "coding": { "m": [2], "p": [3.0], "sigma2": 1.0, "rho": 1.0, "pe": 0.01 },
            "k": 1,
            "arrivals": [ { "kind": "bernoulli", "q": 0.15 } ],
            "policy": { "probabilities": [0.0, 1.0] },
            "run": { "horizon": 20000, "seed": 33 },
            "sweep": { "parameter": "arrival_scale", "values": [0.5, 1.0] }
        }"#,
    );
    let record = stdout_json(&bin().args(["simulate", "--config", &config]).output().unwrap());
    let entries = record["outputs"]["sweep"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["seed"], 33);
    assert_eq!(entries[1]["seed"], 34);
    assert_eq!(entries[0]["value"], 0.5);
    assert_ne!(entries[0]["digest"], entries[1]["digest"]);
}

#[test]
fn capcheck_passes_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "pair.json", PAIR);
    let record = stdout_json(
        &bin()
            .args(["capcheck", "--config", &config, "--samples", "20", "--seed", "5"])
            .output()
            .unwrap(),
    );
    assert_eq!(record["outputs"]["forward"]["pass"], 20);
    assert_eq!(record["outputs"]["forward"]["fail"], 0);
    assert_eq!(record["outputs"]["reverse"]["pass"], 20);
    assert_eq!(record["outputs"]["reverse"]["fail"], 0);
}

#[test]
fn capcheck_requires_a_seed_when_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "pair.json", PAIR);
    let output = bin().args(["capcheck", "--config", &config]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));

    let empty = stdout_json(
        &bin()
            .args(["capcheck", "--config", &config, "--samples", "0"])
            .output()
            .unwrap(),
    );
    assert_eq!(empty["outputs"]["forward"]["samples"], 0);
}

#[test]
fn config_digest_is_stable_across_runs_and_tracks_content() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "single.json", SINGLE);
    let first = stdout_json(&bin().args(["nlen", "--config", &config]).output().unwrap());
    let second = stdout_json(&bin().args(["nlen", "--config", &config]).output().unwrap());
    assert_eq!(first["config_digest"], second["config_digest"]);

    let changed = write_config(dir.path(), "changed.json", &SINGLE.replace("0.01", "0.02"));
    let third = stdout_json(&bin().args(["nlen", "--config", &changed]).output().unwrap());
    assert_ne!(first["config_digest"], third["config_digest"]);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let output = bin().args(["nlen", "--config", "/nonexistent/x.json"]).output().unwrap();
    assert_eq!(output.status.code(), Some(5));
}
