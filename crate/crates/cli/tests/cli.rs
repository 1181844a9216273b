use std::path::Path;
use std::process::{Command, Output};

fn rcbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcbf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn ceres_run_lands_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = rcbf(&["run", "ceres-landing", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("Landing"));
    let s = summary(dir.path());
    assert_eq!(s["success"], true);
    assert_eq!(s["meta"]["seed"], 7);
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x0,x1,x2,x3,x4,x5,u0,u1,u2,"));
}

#[test]
fn timeout_exits_nonzero_and_summary_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let out = rcbf(&["run", "leo-docking", "--timeout", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("Timeout"));
    assert_eq!(summary(dir.path())["success"], false);
}

#[test]
fn infeasible_tolerances_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = rcbf(&["run", "leo-docking", "--gamma2", "0.071", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("feasibility"), "{}", stderr(&out));
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn auto_gain_is_solved_from_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let out = rcbf(&["run", "ceres-landing", "--k", "auto", "--timeout", "10", "--out", dir.path().to_str().unwrap()]);
    assert!(stdout(&out).contains("k = 0.355292"), "{}", stdout(&out));
}

#[test]
fn empty_seed_range_is_rejected() {
    let out = rcbf(&["sweep", "leo-docking", "--seeds", "5..5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = rcbf(&["sweep", "leo-docking", "--seeds", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_reports_every_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = rcbf(&["sweep", "leo-docking", "--seeds", "0..3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("3/3 successful"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    let seeds: Vec<u64> = report["runs"].as_array().unwrap().iter().map(|r| r["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, vec![0, 1, 2]);
}

#[test]
fn portrait_writes_six_trajectories_and_four_level_sets() {
    let dir = tempfile::tempdir().unwrap();
    let out = rcbf(&["portrait", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert_eq!(names.iter().filter(|n| n.starts_with("trajectory_")).count(), 6);
    assert_eq!(names.iter().filter(|n| n.starts_with("level_set_")).count(), 4);
    assert!(names.iter().any(|n| n == "portrait.json"));
}

#[test]
fn config_file_and_preset_name_agree() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/leo-docking.json");
    let from_preset = rcbf(&["run", "leo-docking", "--seed", "2", "--out", a.path().to_str().unwrap()]);
    let from_file = rcbf(&["run", "--config", file.to_str().unwrap(), "--seed", "2", "--out", b.path().to_str().unwrap()]);
    assert_eq!(from_preset.status.code(), Some(0));
    assert_eq!(from_file.status.code(), Some(0));
    let read = |d: &Path| std::fs::read(d.join("trajectory.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn unknown_field_is_rejected() {
    let out = rcbf(&["run", "leo-docking", "--set", "warp_factor=9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("warp_factor"), "{}", stderr(&out));
}
