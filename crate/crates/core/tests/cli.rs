//! End-to-end runs of the binary.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const PLANAR: &str = r#"{"lambda": 1, "G": 0, "g0": 1, "points": [[0, 0]], "grid": {"R": 20, "n": 257}}"#;
const RADIAL: &str = r#"{"lambda": 1, "G": 0.005, "g0": 1, "points": [[0, 0], [0, 0]], "radial": {}}"#;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_gl-vortex"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("runs"))
        .output()
        .unwrap()
}

/// The single run directory created under `runs/` with the given prefix.
fn run_dirs(dir: &Path, prefix: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir.join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(prefix))
        .collect();
    v.sort();
    v
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_planar_reports_flux_2pi() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), PLANAR, &["solve-planar", "--quiet", "--binary"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let d = &run_dirs(tmp.path(), "solve-planar-")[0];
    for f in ["fields.csv", "fields.bin", "telemetry.json", "report.json", "manifest.json"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let flux = json(&d.join("report.json"))["flux"].as_f64().unwrap();
    assert!((flux - 2.0 * PI).abs() < 0.01 * 2.0 * PI, "{flux}");
    let m = json(&d.join("manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["config"]["grid"]["n"], 257);
    assert!(m["wall_clock_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn inadmissible_coupling_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), PLANAR, &["solve-planar", "--set", "G=0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("4 pi G N"), "{err}");
    assert!(!tmp.path().join("runs").exists());
}

#[test]
fn unknown_override_and_missing_config_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), PLANAR, &["solve-planar", "--set", "solver.nope=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_gl-vortex"))
        .args(["solve-radial", "--config", "/nonexistent/c.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3_with_marker() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), PLANAR, &["solve-planar", "--set", "solver.max_iter=1", "--set", "G=0.01"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let d = &run_dirs(tmp.path(), "solve-planar-")[0];
    assert!(d.join("FAILED").exists());
    assert_eq!(json(&d.join("manifest.json"))["status"], "failed");
}

#[test]
fn radial_outputs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let out = run(tmp.path(), RADIAL, &["solve-radial", "--quiet"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let dirs = run_dirs(tmp.path(), "solve-radial-");
    assert_eq!(dirs.len(), 2);
    for f in ["profile.csv", "telemetry.json", "report.json"] {
        let a = std::fs::read(dirs[0].join(f)).unwrap();
        let b = std::fs::read(dirs[1].join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
    let header = std::fs::read_to_string(dirs[0].join("profile.csv")).unwrap();
    assert!(header.starts_with("r,u,du,v,dv,eta\n"));
}

#[test]
fn sweep_g_keeps_flux_and_sweep_n_scales_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), PLANAR, &["sweep", "--sweep", "G=0,0.005,0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(tmp.path(), PLANAR, &["sweep", "--sweep", "N=1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let dirs = run_dirs(tmp.path(), "sweep-");
    assert_eq!(dirs.len(), 2);
    let column = |csv: &str, name: &str| -> Vec<f64> {
        let mut lines = csv.lines();
        let k = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
        lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
    };
    let mut sweeps: Vec<String> = dirs.iter().map(|d| std::fs::read_to_string(d.join("sweep.csv")).unwrap()).collect();
    // directories sort by timestamp and suffix; identify each sweep by its axis
    sweeps.sort_by_key(|s| !s.lines().nth(1).unwrap().starts_with("G,"));
    for f in column(&sweeps[0], "flux") {
        assert!((f - 2.0 * PI).abs() < 0.01 * 2.0 * PI, "{f}");
    }
    for (k, e) in column(&sweeps[1], "energy").into_iter().enumerate() {
        let target = PI * (k + 1) as f64;
        assert!((e - target).abs() < 0.02 * target, "{e}");
    }
}

#[test]
fn empty_sweep_is_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), PLANAR, &["sweep", "--sweep", "lambda="]);
    assert_eq!(out.status.code(), Some(0));
    let d = &run_dirs(tmp.path(), "sweep-")[0];
    let csv = std::fs::read_to_string(d.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("axis,value,status,message,"));
}

#[test]
fn self_test_exits_0() {
    let out = Command::new(env!("CARGO_BIN_EXE_gl-vortex")).args(["self-test", "--quiet"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
