//! End-to-end runs of the `mlhr-opt` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run(dir: &Path, config: &Value, args: &[&str]) -> (Output, PathBuf) {
    let cfg_path = dir.join("run.json");
    std::fs::write(&cfg_path, serde_json::to_vec_pretty(config).unwrap()).unwrap();
    let out = dir.join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_mlhr-opt"))
        .args(args)
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .args(["--workers", "1"])
        .env("MLHR_OPT_LOG", "quiet")
        .output()
        .unwrap();
    (o, out)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_optimize() -> Value {
    json!({
        "seed": 3,
        "optimize": { "nsga2": { "pop_size": 20, "max_generations": 4 } }
    })
}

#[test]
fn sample_writes_a_latin_design() {
    let tmp = TempDir::new().unwrap();
    let (o, out) = run(tmp.path(), &json!({ "seed": 1, "sample": { "n": 10, "dims": 3, "iterations": 50 } }), &["sample"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("samples.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    assert!(mlhr_opt::sampling::is_latin(&rows));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("phi_p before:") && stdout.contains("phi_p after:"));
}

#[test]
fn seed_flag_overrides_missing_config_seed() {
    let tmp = TempDir::new().unwrap();
    let (o, _) = run(tmp.path(), &json!({ "sample": { "n": 5, "dims": 2 } }), &["sample", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn configuration_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let (o, _) = run(tmp.path(), &json!({ "seed": 1, "sample": { "n": 1 } }), &["sample"]);
    assert_eq!(code(&o), 2);
    let (o, _) = run(tmp.path(), &json!({}), &["sample"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("seed"));
    let (o, _) = run(tmp.path(), &json!({}), &["optimize"]);
    assert_eq!(code(&o), 2);
    let (o, _) = run(tmp.path(), &json!({ "sede": 1 }), &["map"]);
    assert_eq!(code(&o), 2);
    let (o, _) = run(tmp.path(), &json!({ "seed": 1 }), &["explode"]);
    assert_eq!(code(&o), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_mlhr-opt"))
        .args(["map", "--config"])
        .arg(tmp.path().join("nowhere.json"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn evaluator_failure_exits_3_with_partial_history() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_optimize();
    cfg["optimize"]["fail_on_evaluation"] = json!(30);
    let (o, out) = run(tmp.path(), &cfg, &["optimize"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let history = std::fs::read_to_string(out.join("history.csv")).unwrap();
    assert!(history.lines().count() >= 2, "{history}");
    assert!(!out.join("front.json").exists());
}

#[test]
fn optimize_outputs() {
    let tmp = TempDir::new().unwrap();
    let (o, out) = run(tmp.path(), &small_optimize(), &["optimize"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["history.csv", "front.json", "archive.json", "summary.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let history = std::fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 1 + 5);
}

#[test]
fn zero_generations_returns_the_initial_front() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_optimize();
    cfg["optimize"]["nsga2"]["max_generations"] = json!(0);
    let (o, out) = run(tmp.path(), &cfg, &["optimize"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let front: Value = serde_json::from_slice(&std::fs::read(out.join("front.json")).unwrap()).unwrap();
    assert!(!front["members"].as_array().unwrap().is_empty(), "{front}");
}

#[test]
fn map_outputs_and_threshold() {
    let tmp = TempDir::new().unwrap();
    let grid = json!({ "speed": { "start": 0, "stop": 1000, "step": 50 }, "torque": { "start": 0, "stop": 212, "step": 5 } });
    let area = |threshold: f64| {
        let mut map = grid.clone();
        map["threshold"] = json!(threshold);
        let dir = tmp.path().join(format!("t{threshold}"));
        std::fs::create_dir_all(&dir).unwrap();
        let (o, out) = run(&dir, &json!({ "map": map }), &["map"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let csv = std::fs::read_to_string(out.join("map.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 21 * 43);
        let tpca: Value = serde_json::from_slice(&std::fs::read(out.join("tpca.json")).unwrap()).unwrap();
        let sum = tpca["low"].as_f64().unwrap() + tpca["accelerating"].as_f64().unwrap() + tpca["high"].as_f64().unwrap();
        assert!((sum - tpca["total"].as_f64().unwrap()).abs() <= 1e-6 * sum);
        let p: Value = serde_json::from_slice(&std::fs::read(out.join("premium.json")).unwrap()).unwrap();
        p["area_fraction"].as_f64().unwrap()
    };
    assert!(area(0.5) > area(0.94));
}

#[test]
fn unreachable_map_exits_4() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({ "map": { "speed": { "start": 0, "stop": 100, "step": 50 }, "torque": { "start": 1000, "stop": 1100, "step": 50 } } });
    let (o, _) = run(tmp.path(), &cfg, &["map"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn drive_outputs() {
    let tmp = TempDir::new().unwrap();
    let (o, out) = run(tmp.path(), &json!({ "drive": { "cycles": ["triangle", "trapezoid"] } }), &["drive"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let pts = std::fs::read_to_string(out.join("triangle_points.csv")).unwrap();
    assert_eq!(pts.lines().next(), Some("t_s,omega_mech_rad_s,torque_Nm,feasible"));
    assert_eq!(pts.lines().count(), 21);
    let d: Value = serde_json::from_slice(&std::fs::read(out.join("drivability.json")).unwrap()).unwrap();
    assert!(d["a_x_max"].as_f64().unwrap() > 0.0);
    assert!(d["theta_max_deg"].as_f64().unwrap() > 0.0);
    for c in d["cycles"].as_array().unwrap() {
        assert!(c["count_in_premium"].as_u64().unwrap() <= c["total_points"].as_u64().unwrap());
    }
}

#[test]
fn cycle_from_csv_relative_to_config() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("mine.csv"), "t_s,v_mps\n0,0\n1,3\n2,5\n").unwrap();
    let (o, out) = run(tmp.path(), &json!({ "drive": { "cycles": ["mine.csv"] } }), &["drive"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(out.join("mine_points.csv")).unwrap().lines().count(), 3);
}

#[test]
fn bad_cycles_exit_5() {
    let tmp = TempDir::new().unwrap();
    let (o, _) = run(tmp.path(), &json!({ "drive": { "cycles": ["absent.csv"] } }), &["drive"]);
    assert_eq!(code(&o), 5);

    std::fs::write(tmp.path().join("broken.csv"), "t_s,v_mps\n0,0\n1,fast\n").unwrap();
    let (o, _) = run(tmp.path(), &json!({ "drive": { "cycles": ["broken.csv"] } }), &["drive"]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}
