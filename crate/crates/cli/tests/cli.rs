use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn uavmac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavmac")).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let p = dir.path().join("scenario.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn error_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error JSON on stderr")
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn empty_config_needs_positions() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "");
    let out = uavmac(&["--config", &cfg, "solve", "--scheme", "noma"]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_json(&out);
    assert_eq!(e["error"]["kind"], "config");
    assert!(e["error"]["message"].as_str().unwrap().contains("positions required"));
}

#[test]
fn negative_altitude_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[layout]\npositions = [0, 100]\naltitude = -250\n");
    let out = uavmac(&["--config", &cfg, "solve", "--scheme", "noma"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_json(&out)["error"]["message"].as_str().unwrap().contains("altitude"));
}

#[test]
fn unknown_field_names_its_path() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[layout]\npositions = [0, 100]\n[uav]\nspeed = 3\n");
    let out = uavmac(&["--config", &cfg, "solve", "--scheme", "noma"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_json(&out)["error"]["message"].as_str().unwrap().contains("speed"));
}

#[test]
fn unwritable_output_is_a_solver_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[layout]\npositions = [0, 100]\n");
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = uavmac(&["--config", &cfg, "--out", blocker.to_str().unwrap(), "solve", "--scheme", "tdma"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"]["exit_code"], 3);
}

#[test]
fn failed_self_validation_exits_4() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[layout]\npositions = [0, 300]\n[solver]\nvalidation_tol = 1e-300\n");
    let out = uavmac(&["--config", &cfg, "--out", dir.path().to_str().unwrap(), "solve", "--scheme", "fdma"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn tdma_four_users_hover_above_every_user() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("four_users.toml");
    let out_dir = dir.path().to_str().unwrap();
    let out = uavmac(&["--config", cfg.to_str().unwrap(), "--out", out_dir, "solve", "--scheme", "tdma"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sol: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("solution.json")).unwrap()).unwrap();
    assert_eq!(sol["hover_count"], 4);
    let users = [0.0, 800.0 / 3.0, 1600.0 / 3.0, 800.0];
    let points: Vec<f64> = sol["hover_points"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(points.len(), 4);
    for (p, w) in points.iter().zip(users) {
        assert!((p - w).abs() < 1.0, "{points:?}");
    }
    let r = sol["R"].as_f64().unwrap();
    assert!((sol["validated_rate"].as_f64().unwrap() - r).abs() <= 1e-6);

    let (header, traj) = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(header, ["t", "x"]);
    assert_eq!(traj.first().unwrap(), &vec![0.0, 0.0]);
    assert_eq!(traj.last().unwrap()[0], 100.0);
    let (header, sched) = csv_rows(&dir.path().join("schedule.csv"));
    assert_eq!(header, ["t", "a_1", "a_2", "a_3", "a_4"]);
    assert_eq!(sched.len(), traj.len());
    for row in &sched {
        assert!((row[1..].iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("two_user_d100.toml");
    let mut files = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = uavmac(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "solve",
            "--scheme",
            "fdma",
            "--alpha",
            "0.3,0.7",
        ]);
        assert!(out.status.success());
        files.push(
            ["solution.json", "trajectory.csv", "schedule.csv"].map(|f| fs::read(out_dir.join(f)).unwrap()),
        );
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn oracle_prints_one_scalar() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("two_user_d800.toml");
    let out = uavmac(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "oracle",
        "--k2",
        "--scheme",
        "tdma",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let r: f64 = text.trim().parse().expect("a single number");
    assert!(r > 0.0 && r < 20.0);
    assert!(dir.path().join("oracle.json").exists());
}

#[test]
fn oracle_refuses_more_than_two_users() {
    let cfg = configs().join("four_users.toml");
    let out = uavmac(&["--config", cfg.to_str().unwrap(), "oracle", "--k2", "--scheme", "tdma"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nesting_report_is_ordered() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[layout]\npositions = [0, 400]\n[profiles]\nalpha = [[0.5, 0.5], [0.2, 0.8]]\n");
    let out = uavmac(&["--config", &cfg, "--out", dir.path().to_str().unwrap(), "report", "nesting"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("nesting.json")).unwrap()).unwrap();
    assert_eq!(report["ordered"], true);
    assert_eq!(report["entries"].as_array().unwrap().len(), 2);
}

#[test]
fn sweep_writes_region_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[layout]\npositions = [0, 100]\n[profiles]\nalpha = [[1, 0], [0.5, 0.5], [0, 1]]\n");
    let out = uavmac(&["--config", &cfg, "--out", dir.path().to_str().unwrap(), "sweep", "--scheme", "tdma"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&dir.path().join("region_tdma.csv"));
    assert_eq!(header, ["alpha_1", "alpha_2", "r_1", "r_2", "R"]);
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!((row[0] * row[4] - row[2]).abs() < 1e-6 && (row[1] * row[4] - row[3]).abs() < 1e-6);
    }
}
