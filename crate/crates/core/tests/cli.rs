use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gevrey_prandtl::io::{TIMESERIES_COLUMNS, TOY_COLUMNS};
use gevrey_prandtl::Field;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gevrey-lab")).args(args).output().unwrap()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn header(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().next().unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn unknown_suite_kind_is_a_usage_error() {
    let out = lab(&["suite", "no-such-suite", "--out", "/tmp/unused"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_timeseries_meta_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = lab(&[
        "run",
        "--config",
        config("quick.json").to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = out_dir.join("timeseries.csv");
    assert_eq!(header(&csv), TIMESERIES_COLUMNS);
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count() - 1;
    // t = 0 plus every fifth of 20 steps
    assert_eq!(rows, 5);

    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["status"], "completed");
    assert_eq!(meta["samples"], 5);
    // amplitude 0.05 is far outside the small-data regime; only the report shape is checked
    assert!(meta["decay"]["pass"].is_boolean());
    assert!(!meta["deviations"].as_array().unwrap().is_empty());

    let (u, dump) = Field::read_dump(&out_dir.join("fields").join("u_00004")).unwrap();
    assert_eq!(dump.name, "u");
    assert!((dump.t - 0.2).abs() < 1e-12);
    assert_eq!((dump.n_modes, dump.ny), (9, 65));
    assert!(u.is_finite() && u.max_abs_coeff() > 0.0);
}

#[test]
fn toy_writes_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("toy");
    let out = lab(&["toy", "--config", config("toy.json").to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(&out_dir.join("timeseries.csv")), TOY_COLUMNS);
}

#[test]
fn bad_config_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{ \"grid\": 3 }").unwrap();
    let out = lab(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}
