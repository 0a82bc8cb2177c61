use std::path::Path;
use std::process::{Command, Output};

use fkpp::io::{read_json, read_profile};
use fkpp::manifest::RunManifest;
use serde_json::Value;

fn fkpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fkpp")).args(args).output().expect("binary runs")
}

fn out_flag(dir: &Path) -> String {
    dir.display().to_string()
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

#[test]
fn inadmissible_diffusion_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fkpp(&["--out", &out_flag(dir.path()), "wave", "--c", "2", "--d", "2", "--r", "0", "--find-front"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d < 1"));
}

#[test]
fn missing_mode_and_conflicting_flags_are_rejected() {
    assert_eq!(fkpp(&["wave", "--d", "0.1"]).status.code(), Some(2));
    assert_eq!(fkpp(&["wave", "--d", "0.1", "--k", "1.9", "--find-front"]).status.code(), Some(2));
    assert_eq!(fkpp(&["simulate", "--scenario", "fig2"]).status.code(), Some(2));
}

#[test]
fn wave_then_spectrum_then_report() {
    let root = tempfile::tempdir().unwrap();
    let wave_dir = root.path().join("wave");
    let out = fkpp(&["--out", &out_flag(&wave_dir), "wave", "--d", "0.3", "--r", "1", "--find-front"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: RunManifest = read_json(&wave_dir.join("manifest.json")).unwrap();
    let k = manifest.summary["k_star"].as_f64().unwrap();
    assert!((k - 1.95403).abs() < 1e-3, "K* = {k}");
    let profile = read_profile(&wave_dir.join("profile.csv")).unwrap();
    assert_eq!(profile.k, k);

    let profile_path = wave_dir.join("profile.csv");
    let bad = fkpp(&[
        "--out",
        &out_flag(&root.path().join("bad")),
        "spectrum",
        "--profile",
        &out_flag(&profile_path),
        "--alpha-minus",
        "1.2",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("α₋ < 1 required"));

    let spec_dir = root.path().join("spectrum");
    let out = fkpp(&["--out", &out_flag(&spec_dir), "spectrum", "--profile", &out_flag(&profile_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let verdict: Value = read_json(&spec_dir.join("evans_verdict.json")).unwrap();
    assert_eq!(verdict["winding"], 0);

    let out = fkpp(&["report", "--dir", &out_flag(root.path())]);
    assert_eq!(out.status.code(), Some(0));
    let md = std::fs::read_to_string(root.path().join("report.md")).unwrap();
    assert!(md.contains("| 1 |") && md.contains("0.3"), "{md}");
}

#[test]
fn missing_profile_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fkpp(&["--out", &out_flag(dir.path()), "spectrum", "--profile", "/nonexistent/profile.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn steadiness_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("steadiness.toml");
    let out = fkpp(&["--out", &out_flag(dir.path()), "simulate", "--config", &out_flag(&cfg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary: Value = read_json(&dir.path().join("summary.json")).unwrap();
    assert!(summary["finest_drift"].as_f64().unwrap() < 5e-3);
}

#[test]
fn negative_control_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("validate_fk_negative.toml");
    let out = fkpp(&["--threads", "2", "--out", &out_flag(dir.path()), "validate-fk", "--config", &out_flag(&cfg)]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = read_json(&dir.path().join("fk_report.json")).unwrap();
    assert_eq!(report["density"]["verdict"], "Fail");
    assert!(report["tail"]["verdict"].as_str().unwrap().starts_with("precondition-failed"));
}

#[test]
fn runs_are_reproducible_across_thread_counts() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("small.toml");
    std::fs::write(&cfg, "seed = 11\n[density]\ndt = 1e-3\nn_paths = 5000\n").unwrap();
    let mut reports = Vec::new();
    for threads in ["1", "3"] {
        let dir = root.path().join(threads);
        let out = fkpp(&["--threads", threads, "--out", &out_flag(&dir), "validate-fk", "--config", &out_flag(&cfg)]);
        assert!(out.status.code().is_some_and(|c| c <= 1));
        reports.push(std::fs::read_to_string(dir.join("fk_report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.toml");
    std::fs::write(&cfg, "scenario = \"fig1\"\ntend = 3.0\n").unwrap();
    let out = fkpp(&["--out", &out_flag(dir.path()), "simulate", "--config", &out_flag(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
}
