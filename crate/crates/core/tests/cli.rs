use std::process::Command;

use optoforce::io::{parse_curve_csv, CSV_HEADER, OUT_DIR_ENV};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_optoforce"))
}

#[test]
fn sweep_writes_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sweep", "--model", "cavityless", "--tmax-scaled", "6.2832", "--points", "400", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("cavityless_0_0.csv")).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    assert_eq!(parse_curve_csv(&text).unwrap().len(), 400);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.contains("400 records"), "{stdout}");
}

#[test]
fn config_error_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["sweep", "--theta-over-chi", "0.9", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("theta must exceed chi") && err.contains("theta_over_chi"), "{err}");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);

    let out = bin().args(["sweep", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# squeezed run\ns = 5\npoints = 50\nformat = json\n").unwrap();
    let out = bin()
        .args(["sweep", "--s", "2", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cavityless_2_0.json")).unwrap()).unwrap();
    assert_eq!(json["metadata"]["s"], 2.0);
    assert_eq!(json["records"].as_array().unwrap().len(), 50);
    // t = 0 has zero signal.
    assert_eq!(json["records"][0]["f_min"], "inf");

    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    let out = bin().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["sql"]).env(OUT_DIR_ENV, dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sql.json")).unwrap()).unwrap();
    let f = json["cavity"]["f_min"].as_f64().unwrap();
    assert!((f - 0.2821).abs() < 1e-3, "{f}");
    assert!(json["cavityless"]["f_min"].as_f64().unwrap() > 0.0);
}

#[test]
fn power_scaling_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["power-scaling", "--model", "cavity", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("power_cavity.csv")).unwrap();
    assert!(text.starts_with("power_ratio,f_min,in_regime\n"));
    assert_eq!(text.lines().count(), 82);
}
