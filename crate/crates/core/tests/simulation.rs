use std::path::PathBuf;

use rcbf::barrier::Membership;
use rcbf::config::{Resolved, ScenarioConfig};
use rcbf::dynamics::DisturbancePolicy;
use rcbf::sim::{
    level_set_polyline, log_header, run_phase_portrait, run_scenario, run_sweep, write_log_csv, write_portrait,
    Scenario, LAYER_EXIT_TOL, SimClass, StartRegion,
};
use rcbf::Error;

fn scenario(cfg: ScenarioConfig) -> Scenario<f64> {
    match cfg.resolve().unwrap() {
        Resolved::Run { scenario, .. } => scenario,
        Resolved::Portrait { .. } => panic!("expected a run scenario"),
    }
}

fn csv_bytes(s: &Scenario<f64>) -> Vec<u8> {
    let (log, _) = run_scenario(s).unwrap();
    let mut out = Vec::new();
    write_log_csv(&log, &mut out).unwrap();
    out
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn identical_seeds_give_identical_csv() {
    let base = scenario(ScenarioConfig::docking_preset());
    let a = csv_bytes(&base.with_policy(DisturbancePolicy::random(5)));
    let b = csv_bytes(&base.with_policy(DisturbancePolicy::random(5)));
    let c = csv_bytes(&base.with_policy(DisturbancePolicy::random(6)));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn csv_round_trips_every_float() {
    let s = scenario(ScenarioConfig::docking_preset()).with_policy(DisturbancePolicy::random(2));
    let (log, _) = run_scenario(&s).unwrap();
    let mut out = Vec::new();
    write_log_csv(&log, &mut out).unwrap();
    let mut reader = csv::Reader::from_reader(out.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, log_header(4, 2));
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), log.records.len());
    for (row, rec) in rows.iter().zip(&log.records) {
        assert_eq!(row[0].parse::<f64>().unwrap().to_bits(), rec.t.to_bits());
        for i in 0..4 {
            assert_eq!(row[1 + i].parse::<f64>().unwrap().to_bits(), rec.x[i].to_bits());
        }
        assert_eq!(row[header.iter().position(|h| h == "H1").unwrap()].parse::<f64>().unwrap(), rec.h1);
        let mantissa = row[1].split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17);
    }
}

#[test]
fn ceres_seed_seven_lands() {
    let mut cfg = ScenarioConfig::ceres_preset();
    cfg.run_settings_mut().unwrap().seed = 7;
    let (log, o) = run_scenario(&scenario(cfg)).unwrap();
    assert_eq!(o.classification, SimClass::Landing);
    assert!(o.terminal_h_dot > 0.0 && o.terminal_h_dot <= 1.5);
    assert_eq!(o.violation_count, 0);
    assert!(log.records.iter().all(|r| r.margin >= -1e-8));
    assert!(log.records.iter().all(|r| r.u.iter().all(|v| v.abs() <= 0.5)));
}

#[test]
fn docking_zero_policy_is_deterministic_and_centered() {
    let s = scenario(ScenarioConfig::docking_preset()).with_policy(DisturbancePolicy::Zero);
    let (_, a) = run_scenario(&s).unwrap();
    let (_, b) = run_scenario(&s).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.classification, SimClass::Docking);
    assert!(a.terminal_state[0].abs() <= 0.03 + 1e-4);
    assert!((0.07..=0.12).contains(&a.terminal_h_dot));
}

#[test]
fn layer_is_never_left_for_the_interior() {
    let base = scenario(ScenarioConfig::docking_preset());
    for policy in [DisturbancePolicy::Helpful, DisturbancePolicy::Zero, DisturbancePolicy::Adversarial] {
        let (log, o) = run_scenario(&base.with_policy(policy)).unwrap();
        assert_eq!(o.membership_regressions, 0);
        let first = log.records.iter().position(|r| matches!(r.membership, Membership::BoundaryLayer(_))).unwrap();
        let eps = o.layer_width;
        let floor = -eps * (1.0 + LAYER_EXIT_TOL);
        assert!(log.records[first..].iter().all(|r| r.h1 >= floor && r.h1 <= 1e-6));
    }
}

#[test]
fn short_horizon_times_out() {
    let mut cfg = ScenarioConfig::docking_preset();
    cfg.set_field("timeout", "5").unwrap();
    let (_, o) = run_scenario(&scenario(cfg)).unwrap();
    assert_eq!(o.classification, SimClass::Timeout);
    assert!(o.contact.is_none());
    assert!((o.t_f - 5.0).abs() < 1e-9);
}

#[test]
fn sweep_orders_by_seed_and_matches_single_runs() {
    let base = scenario(ScenarioConfig::docking_preset());
    let report = run_sweep(&base, 3..6, 1.0).unwrap();
    assert_eq!(report.total, 3);
    assert_eq!(report.runs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![3, 4, 5]);
    assert_eq!(report.successes, 3);
    let (_, single) = run_scenario(&base.with_policy(DisturbancePolicy::random(4))).unwrap();
    assert_eq!(report.runs[1].outcome.as_ref().unwrap(), &single);
}

#[test]
fn empty_sweep_is_rejected() {
    let base = scenario(ScenarioConfig::docking_preset());
    assert!(matches!(run_sweep(&base, 4..4, 1.0), Err(Error::Config { .. })));
}

#[test]
fn portrait_has_six_trajectories_and_four_level_sets() {
    let Resolved::Portrait { settings, .. } = ScenarioConfig::portrait_preset().resolve().unwrap() else {
        panic!("portrait preset")
    };
    let p = run_phase_portrait(&settings).unwrap();
    assert_eq!(p.trajectories.len(), 6);
    assert_eq!(p.level_sets.len(), 4);
    let gamma1 = settings.tolerances.gamma1;
    let gamma2 = settings.tolerances.gamma2;
    for tr in &p.trajectories {
        assert!(tr.outcome.peak_h1 <= 1e-6, "{} {}", tr.region.name(), tr.policy);
        if tr.region == StartRegion::Inside {
            assert!(tr.outcome.contact.is_some());
            assert!(tr.outcome.terminal_h_dot >= gamma1);
            if tr.policy == "adversarial" {
                assert!(tr.outcome.terminal_h_dot <= gamma2);
            }
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let files = write_portrait(&p, dir.path()).unwrap();
    let names: Vec<String> = files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(names.iter().filter(|n| n.starts_with("trajectory_")).count(), 6);
    assert_eq!(names.iter().filter(|n| n.starts_with("level_set_")).count(), 4);
}

#[test]
fn zero_level_set_ends_at_the_contact_speed_cap() {
    let Resolved::Portrait { settings, .. } = ScenarioConfig::portrait_preset().resolve().unwrap() else {
        panic!("portrait preset")
    };
    let p = run_phase_portrait(&settings).unwrap();
    let ls = level_set_polyline(&p.spec, 0.0, -10.0, 11);
    let (h, v) = *ls.points.last().unwrap();
    assert_eq!(h, 0.0);
    assert!((v - (2.0 * p.spec.delta()).sqrt()).abs() < 1e-12);
}

#[test]
fn checked_in_configs_match_presets() {
    for name in ScenarioConfig::preset_names() {
        let path = configs_dir().join(format!("{name}.json"));
        let loaded = ScenarioConfig::load(&path).unwrap();
        assert_eq!(loaded, ScenarioConfig::preset(name).unwrap(), "{name}");
        let again = ScenarioConfig::from_json(&loaded.to_json().unwrap()).unwrap();
        assert_eq!(again, loaded);
    }
}

#[test]
fn slow_docking_start_outside_the_layer_is_rejected() {
    let mut cfg = ScenarioConfig::docking_preset();
    if let ScenarioConfig::LeoDocking(c) = &mut cfg {
        c.initial_state = vec![0.0, -100.0, 0.0, 0.5];
    }
    let err = cfg.resolve().unwrap_err().to_string();
    assert!(err.contains("boundary layer"), "{err}");
}

#[test]
fn infeasible_tolerances_are_rejected() {
    let mut cfg = ScenarioConfig::docking_preset();
    cfg.set_field("gamma2", "0.071").unwrap();
    let err = cfg.resolve().unwrap_err().to_string();
    assert!(err.contains("feasibility assumption violated"), "{err}");
}
