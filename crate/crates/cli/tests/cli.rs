use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sandwich_core::config::TABLE1;

fn sandwich(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sandwich"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "0")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn edited(dir: &Path, name: &str, edit: impl Fn(&str) -> String) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, edit(TABLE1)).unwrap();
    path
}

fn space_file() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/data/table1_space.conf")
}

#[test]
fn validate_bundled_design() {
    let o = sandwich(&["validate"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn validate_flags_negative_roc() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "neg.conf", |t| t.replacen("roc = 0.030", "roc = -0.030", 1));
    let o = sandwich(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let lines: Vec<_> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 1, "{lines:?}");
    assert!(lines[0].contains(": "), "{}", lines[0]);
}

#[test]
fn validate_missing_file() {
    let o = sandwich(&["validate", "--config", "/nonexistent/design.conf"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn budget_writes_spectra_summary_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = sandwich(&["budget", "--out", out]);
    assert_eq!(code(&o), 0);
    let summary = stdout(&o);
    assert!(summary.contains("23.07e3 Hz"), "{summary}");
    assert!(summary.contains("225.4e-21 m/√Hz"), "{summary}");
    let csv = fs::read_to_string(dir.path().join("spectra.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1001);
    assert!(csv.starts_with("frequency_hz,sql,shot,radiation_pressure,"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("budget.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "budget");
    assert_eq!(manifest["timestamp"], "1970-01-01T00:00:00Z");
    assert!(manifest["config_digest"].as_str().unwrap().starts_with("sha256:"));
    assert!(dir.path().join("budget_summary.txt").exists());
}

#[test]
fn budget_minimal_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = sandwich(&["budget", "--points", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("spectra.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn budget_empty_range_is_usage_error() {
    let o = sandwich(&["budget", "--f-min", "1000", "--f-max", "1000"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn stability_bundled_design() {
    let o = sandwich(&["stability"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("vertical    spring pass, damping pass"), "{s}");
    assert!(s.contains("rotational  spring pass"), "{s}");
    assert!(s.contains("horizontal  spring pass"), "{s}");
    assert!(s.contains("53.20e-12 m"), "{s}");
}

#[test]
fn stability_swapped_detunings_fail_vertically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "swap.conf", |t| {
        t.replacen("detuning_norm = -0.005", "detuning_norm = 0.005", 1)
            .replacen("detuning_norm = 0.018", "detuning_norm = -0.018", 1)
    });
    let o = sandwich(&["stability", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("vertical    spring FAIL"), "{}", stdout(&o));
}

#[test]
fn feasibility_bundled_design() {
    let dir = tempfile::tempdir().unwrap();
    let o = sandwich(&["feasibility", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("feasibility.csv")).unwrap();
    assert_eq!(csv.lines().count(), 20);
}

#[test]
fn strict_damping_makes_design_infeasible() {
    let o = sandwich(&["feasibility", "--strict-horizontal-damping"]);
    assert_eq!(code(&o), 1);
    let o = sandwich(&["stability", "--strict-horizontal-damping"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn reproduce_reports_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = sandwich(&["reproduce", "--out", dir.path().to_str().unwrap()]);
    let s = stdout(&o);
    let failing: Vec<_> = s.lines().filter(|l| l.ends_with("FAIL")).collect();
    // the gas-thermal bound is the only row the bundled design misses
    assert_eq!(failing.len(), 1, "{s}");
    assert!(failing[0].contains("gas thermal"));
    assert_eq!(code(&o), 1);
    for f in ["reproduce.csv", "spectra.csv", "reproduce.manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn reproduce_strict_reports_damping_sign() {
    let dir = tempfile::tempdir().unwrap();
    let o = sandwich(&["reproduce", "--strict-horizontal-damping", "--out", dir.path().to_str().unwrap()]);
    let s = stdout(&o);
    let row = s.lines().find(|l| l.contains("net horizontal damping")).unwrap();
    assert!(row.ends_with("FAIL"), "{row}");
}

#[test]
fn reproduce_unwritable_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"").unwrap();
    let o = sandwich(&["reproduce", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn optimize_single_point_space_echoes_base() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("point.conf");
    fs::write(&space, "[cavity.lower]\ninput_power = 13\n").unwrap();
    let out = dir.path().join("out");
    let o = sandwich(&[
        "optimize",
        "--space",
        space.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let best = fs::read_to_string(out.join("best_config.conf")).unwrap();
    let parsed = sandwich_core::config::parse_config(&best).unwrap();
    assert_eq!(parsed, sandwich_core::SystemConfig::table1());
}

#[test]
fn optimize_demo_is_deterministic_and_dominates_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = sandwich(&[
            "optimize",
            "--space",
            space_file(),
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        (
            fs::read(out.join("trace.csv")).unwrap(),
            fs::read(out.join("best_config.conf")).unwrap(),
        )
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    let trace = String::from_utf8(a.0).unwrap();
    let objective = |line: &str| -> f64 {
        let cols: Vec<&str> = line.split(',').collect();
        cols[cols.len() - 3].parse().unwrap()
    };
    let mut lines = trace.lines().skip(1);
    let baseline = objective(lines.next().unwrap());
    let best = lines
        .filter(|l| l.split(',').nth_back(1) == Some("true"))
        .map(objective)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(best >= baseline);
}

#[test]
fn optimize_malformed_space() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("bad.conf");
    fs::write(&space, "[cavity.lower\ninput_power_min = banana\n").unwrap();
    let o = sandwich(&["optimize", "--space", space.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = sandwich(&["budget", "--no-such-flag"]);
    assert_eq!(code(&o), 2);
}
