use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn edirac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edirac")).args(args).output().unwrap()
}

fn run(cmd: &str, config: &str, out: &Path) -> Output {
    let cfg = out.join(format!("{cmd}-config.json"));
    std::fs::create_dir_all(out).unwrap();
    std::fs::write(&cfg, config).unwrap();
    edirac(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

const SUPER: &str = r#"{"mode": "supercritical", "targets": [{"lambda": 1, "theta_deg": 30}], "amplitude": 2}"#;
const BUMP: &str = r#"{"mode": "bump", "targets": [{"lambda": 1}, {"lambda": -1}, {"lambda": 3}],
    "bump": {"x0": 300, "x1": 900}, "k_gap": 220, "seed": 5}"#;

#[test]
fn supercritical_potential_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("construct", SUPER, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&dir.path().join("potential.csv"));
    assert_eq!(header, "x,V,phi,p,q,envelope");
    let row = rows.iter().find(|r| (r[0] - 9.0).abs() < 1e-9).expect("a row at x = 9");
    assert!((row[5] - 0.2).abs() < 1e-15);
    for r in &rows {
        assert!((r[3].hypot(r[4]) - r[5]).abs() < 1e-14);
    }
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["construction"]["envelope_bound"], 2.0);
}

#[test]
fn bump_envelope_vanishes_off_support() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run("construct", BUMP, dir.path()).status.success());
    let (_, rows) = csv_rows(&dir.path().join("potential.csv"));
    assert!(rows.iter().any(|r| r[5] > 0.0));
    for r in rows.iter().filter(|r| r[0] <= 300.0 || r[0] >= 900.0) {
        assert_eq!(r[5], 0.0, "x = {}", r[0]);
    }
}

#[test]
fn multi_manifest_lists_round_robin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"mode": "multi", "targets": [{"lambda": 1}, {"lambda": -1}], "k_gap": 220}"#;
    assert!(run("construct", cfg, dir.path()).status.success());
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["targets"].as_array().unwrap().len(), 2);
    let order: Vec<u64> = m["construction"]["schedule"]["pieces"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["target"].as_u64().unwrap())
        .collect();
    assert_eq!(order, vec![0, 1, 0, 1, 0, 1]);
}

#[test]
fn verify_supercritical_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("verify", SUPER, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = read_json(&dir.path().join("certificate.json"));
    assert!((cert["alpha"].as_f64().unwrap() - 2.0).abs() < 0.01);
    assert_eq!(cert["l2_verdict"], "converging");
    let (header, rows) = csv_rows(&dir.path().join("trajectory_0.csv"));
    assert_eq!(header, "x,lnR,theta");
    for r in &rows {
        assert!((r[1] + 2.0 * (1.0 + r[0]).ln()).abs() < 1e-7);
    }
}

#[test]
fn verify_subcritical_has_no_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"mode": "supercritical", "targets": [{"lambda": -2, "theta_rad": 0.3}], "amplitude": 0.4,
        "expectation": "no-eigenvalue"}"#;
    let out = run("verify", cfg, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = read_json(&dir.path().join("certificate.json"));
    assert_eq!(cert["l2_verdict"], "diverging");
    assert_eq!(cert["lower_bound"]["passed"], true);
}

#[test]
fn weak_bump_fails_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BUMP.replace(r#""mode": "bump""#, r#""mode": "bump", "c_amp": 50"#);
    let out = run("verify", &cfg, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "assertion");
    assert_eq!(err["failed"], serde_json::json!(["decay_100_exponent"]));
    assert!(dir.path().join("certificate.json").exists());
}

#[test]
fn config_errors_exit_1_with_json() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in [
        "{not json",
        r#"{"mode": "supercritical", "targets": [{"lambda": 1}]}"#,
        r#"{"mode": "multi", "targets": [{"lambda": 1}, {"lambda": 1}]}"#,
        r#"{"mode": "bump", "targets": [{"lambda": 1}, {"lambda": -1}], "bump": {"x0": 300, "x1": 900}, "k_gap": 400}"#,
        // a log budget only covers the amplitude past e^110
        r#"{"mode": "multi", "targets": [{"lambda": 1}, {"lambda": -1}], "schedule": {"budget": "log"}}"#,
    ] {
        let out = run("construct", cfg, dir.path());
        assert_eq!(out.status.code(), Some(1), "{cfg}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert!(err["message"].is_string());
    }
    assert_eq!(edirac(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(edirac(&["verify"]).status.code(), Some(1));
}

#[test]
fn sweep_empty_and_repeated_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("sweep", r#"{"grid": {"amplitudes": [], "lambdas": [1]}}"#, dir.path());
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap(), "A,lambda,alpha,l2_verdict\n");

    let out = run("sweep", r#"{"grid": {"amplitudes": [0.7, 0.7], "lambdas": [2]}, "span": [0, 1000]}"#, dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], lines[2]);
    assert!(lines[1].ends_with(",converging"));
}

#[test]
fn manifest_round_trip_reproduces_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BUMP.replace(r#", "k_gap": 220"#, "");
    assert!(run("construct", &cfg, &dir.path().join("a")).status.success());
    assert!(run("verify", &cfg, &dir.path().join("a")).status.success());
    let manifest = dir.path().join("a/manifest.json");
    let out = dir.path().join("b");
    let status = edirac(&["verify", "--config", manifest.to_str().unwrap(), "--out", out.to_str().unwrap()]).status;
    assert!(status.success());
    let a = std::fs::read(dir.path().join("a/certificate.json")).unwrap();
    let b = std::fs::read(out.join("certificate.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_flag_changes_only_seeded_parts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bump.json");
    std::fs::write(&cfg, BUMP).unwrap();
    let mut certs = Vec::new();
    for (sub, seed) in [("a", "5"), ("b", "5"), ("c", "6")] {
        let out = dir.path().join(sub);
        let st = edirac(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed, "--jobs", "2"]);
        assert!(st.status.success());
        certs.push(read_json(&out.join("certificate.json")));
    }
    assert_eq!(certs[0], certs[1]);
    let bc = |c: &Value| c["bump_certificates"][0].clone();
    assert_eq!(bc(&certs[0])["decay_ratio_ln"], bc(&certs[2])["decay_ratio_ln"]);
    assert_ne!(bc(&certs[0])["sup_growth_others"], bc(&certs[2])["sup_growth_others"]);
}
