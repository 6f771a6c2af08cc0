use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn hamming(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamming"))
        .args(args)
        .env_remove("HAMMING_ORACLE_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn entropy_of_one_block_in_the_four_cube() {
    let out = hamming(&["compute", "--measure", "entropy", "--model", "nn", "--alpha0", "0", "--d", "4", "--q", "2", "--n", "1", "--r", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 3.0 * std::f64::consts::LN_2).abs() < 1e-13);
    assert_eq!(v["k0"], 2);
    assert_eq!(v["fermi_set"], serde_json::json!([0, 1, 2]));
}

#[test]
fn tripartite_information_vanishes_at_distance_one() {
    let out = hamming(&["compute", "--measure", "tripartite", "--q", "3", "--r", "1", "--d", "9"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["sign"], 0);
}

#[test]
fn tripartite_information_needs_three_letters() {
    let out = hamming(&["compute", "--measure", "tripartite", "--q", "2", "--r", "1", "--d", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tripartite undefined for q=2"));
}

#[test]
fn invalid_geometry_is_a_usage_error() {
    let out = hamming(&["compute", "--measure", "entropy", "--q", "3", "--d", "4", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn huge_values_report_log10_only() {
    let out = hamming(&["compute", "--measure", "entropy", "--q", "5", "--d", "1000", "--k0", "200"]);
    let v = json(&out);
    assert!(v["value"].is_null());
    assert!(v["log10"].as_f64().unwrap() > 600.0);
}

fn sweep_to(config: &Path, dir: &Path, name: &str, format: &str) -> (Output, Vec<u8>) {
    let path = dir.join(name);
    let out = hamming(&["sweep", "--config", config.to_str().unwrap(), "--output", path.to_str().unwrap(), "--format", format]);
    let bytes = std::fs::read(&path).unwrap_or_default();
    (out, bytes)
}

#[test]
fn sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("entropy_distance_one.toml");
    let (a, first) = sweep_to(&cfg, dir.path(), "a.csv", "csv");
    let (b, second) = sweep_to(&cfg, dir.path(), "b.csv", "csv");
    assert!(a.status.success() && b.status.success());
    assert!(!first.is_empty());
    assert_eq!(first, second);
}

#[test]
fn csv_numbers_round_trip_and_match_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("filling_vs_d.toml");
    let (_, csv_bytes) = sweep_to(&cfg, dir.path(), "f.csv", "csv");
    let (_, json_bytes) = sweep_to(&cfg, dir.path(), "f.json", "json");
    let text = String::from_utf8(csv_bytes).unwrap();
    assert!(text.starts_with("# schema=1\n"));
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().unwrap().clone();
    let value_col = header.iter().position(|h| h == "value").unwrap();
    let doc: Value = serde_json::from_slice(&json_bytes).unwrap();
    assert_eq!(doc["meta"]["schema"], 1);
    let rows = doc["rows"].as_array().unwrap();
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(rows) {
        let cell = &rec[value_col];
        let x: f64 = cell.parse().unwrap();
        assert_eq!(format!("{x:.16e}"), cell);
        assert_eq!(x, row["value"].as_f64().unwrap());
    }
    let last = records.iter().rev().find(|r| &r[5] == "0.0000000000000000e0").unwrap();
    let nu: f64 = last[value_col].parse().unwrap();
    assert!((nu - 0.5).abs() < 0.05, "filling {nu}");
}

#[test]
fn sweep_keeps_going_past_invalid_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "measure = \"entropy\"\nfermi = \"d_over_q\"\n[grid]\nd = [6, 7]\nq = [3]\nr = [1]\n").unwrap();
    let (out, bytes) = sweep_to(&cfg, dir.path(), "bad.csv", "csv");
    assert!(out.status.success());
    let text = String::from_utf8(bytes).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data.len(), 2);
    assert!(data[0].ends_with(','));
    assert!(data[1].contains("multiple of q=3"));

    std::fs::write(&cfg, "measure = \"entropy\"\nfermi = \"d_over_q\"\n[grid]\nd = [7]\nq = [3]\nr = [1]\n").unwrap();
    let (out, _) = sweep_to(&cfg, dir.path(), "bad.csv", "csv");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coefficient_sweep_decays_with_distance() {
    let dir = tempfile::tempdir().unwrap();
    let (out, bytes) = sweep_to(&configs().join("g2_vs_r.toml"), dir.path(), "g2.json", "json");
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&bytes).unwrap();
    let logs: Vec<f64> = doc["rows"].as_array().unwrap().iter().map(|r| r["measure_log10"].as_f64().unwrap()).collect();
    assert!(logs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn small_certification_passes() {
    let out = hamming(&["certify", "--cap", "16"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["noncontiguous"], 200);
    assert!(v["max_spectrum_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn certification_cap_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_hamming"))
        .args(["certify", "--noncontiguous", "0"])
        .env("HAMMING_ORACLE_CAP", "8")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["cap"], 8);
}

#[test]
fn corrupted_closed_forms_fail_certification() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = hamming(&["certify", "--cap", "16", "--corrupt", "1e-3", "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let full: Value = serde_json::from_slice(&std::fs::read(report).unwrap()).unwrap();
    assert_eq!(full["summary"]["passed"], false);
    assert!(!full["reports"].as_array().unwrap().is_empty());
}

#[test]
fn fit_prints_reference_values() {
    let out = hamming(&["fit", "beta-gamma", "--r", "10,20", "--d-over-r", "20,40", "--n", "1", "--q", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["reference"]["beta"], 0.7203);
    assert_eq!(v["reference"]["gamma"], 0.0278);
    assert!((v["beta"].as_f64().unwrap() - 0.72).abs() < 0.05);

    let out = hamming(&["fit", "beta-tilde", "--delta", "0.2", "--d", "250,500", "--q", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["reference"]["normalized"], 0.6988);
    assert!((v["normalized"].as_f64().unwrap() - 0.6988).abs() < 0.02);
}

#[test]
fn degenerate_fit_grid_is_a_usage_error() {
    let out = hamming(&["fit", "beta-gamma", "--r", "10", "--d-over-r", "20", "--n", "1", "--q", "3"]);
    assert_eq!(out.status.code(), Some(2));
}
