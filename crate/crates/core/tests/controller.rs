use rcbf::barrier::cbf_margin;
use rcbf::controller::{docking_control, landing_control, nominal_docking_control, DockingControllerConfig, RowSource};
use rcbf::dynamics::{CeresModel, DisturbancePolicy, HcwModel};
use rcbf::presets;
use rcbf::qp::LineBinding;
use rcbf::sim::run_scenario;
use rcbf::config::{Resolved, ScenarioConfig};

fn docking() -> (DockingControllerConfig<f64>, rcbf::controller::DockingSpecs<f64>, HcwModel<f64>) {
    let cfg = DockingControllerConfig::reference();
    let m = HcwModel::reference();
    let specs = presets::docking_specs(&cfg, &m).unwrap();
    (cfg, specs, m)
}

#[test]
fn equality_branch_zeroes_the_margin() {
    let (_, specs, m) = docking();
    let x = [0.0, -50.0, 0.0, 2.3885];
    let step = landing_control(&specs.h1, &m, 0.0, &x).unwrap();
    assert_eq!(step.binding, LineBinding::Cbf);
    assert!(step.u.iter().all(|v| v.abs() < 0.082));
    let margin = cbf_margin(&specs.h1, &m, 0.0, &x, &step.u).unwrap();
    assert!(margin.abs() < 1e-8, "{margin}");
}

#[test]
fn saturation_branch_keeps_positive_margin() {
    let m = CeresModel::<f64>::reference();
    let spec = presets::ceres_h1(&m, presets::CERES_GAIN).unwrap();
    let x = [m.radius + 900_000.0, 0.0, 0.0, 0.0, 15.0, 0.0];
    let step = landing_control(&spec, &m, 0.0, &x).unwrap();
    assert_eq!(step.binding, LineBinding::Box);
    assert!(step.u.iter().any(|v| v.abs() == 0.5));
    assert!(step.u.iter().all(|v| v.abs() <= 0.5));
    assert!(cbf_margin(&spec, &m, 0.0, &x, &step.u).unwrap() > 0.0);
}

#[test]
fn nominal_equality_term_is_exact() {
    let (cfg, specs, m) = docking();
    let x = [0.0, -40.0, 0.0, 1.1];
    let u = nominal_docking_control(&specs.h1, &m, 0.0, &x, cfg.kp).unwrap();
    assert!(cbf_margin(&specs.h1, &m, 0.0, &x, &u).unwrap().abs() < 1e-8);
}

#[test]
fn lateral_term() {
    let (cfg, specs, m) = docking();
    let centered = nominal_docking_control(&specs.h1, &m, 0.0, &[0.0, -40.0, 0.0, 1.1], cfg.kp).unwrap();
    let offset = nominal_docking_control(&specs.h1, &m, 0.0, &[0.03, -40.0, 0.0, 1.1], cfg.kp).unwrap();
    assert!((offset[0] - centered[0] + 0.003).abs() < 1e-15);
    assert_eq!(offset[1], centered[1]);
    assert_eq!(centered[0], 0.0);
}

#[test]
fn left_row_joins_after_latch() {
    let (cfg, specs, m) = docking();
    let far = [0.0, -100.0, 0.0, 0.5];
    let mut latch = false;
    let step = docking_control(&cfg, &specs, &m, 0.0, &far, &mut latch).unwrap();
    assert!(step.h0_left > 0.0);
    assert!(!latch);
    assert_eq!(step.rows.len(), 3);
    assert!(step.rows.iter().all(|r| r.source != RowSource::H0Left));

    let close = [0.0, -0.01, 0.0, 0.1];
    let step = docking_control(&cfg, &specs, &m, 0.0, &close, &mut latch).unwrap();
    assert!(latch);
    assert_eq!(step.rows.len(), 4);
    assert!(step.relaxed.is_empty());
    docking_control(&cfg, &specs, &m, 0.0, &far, &mut latch).unwrap();
    assert!(latch);
}

#[test]
fn filtered_input_satisfies_every_row() {
    let (cfg, specs, m) = docking();
    for x in [[0.02, -60.0, 0.01, 2.0], [-0.01, -5.0, -0.02, 0.6], [0.0, -0.05, 0.0, 0.11]] {
        let mut latch = false;
        let step = docking_control(&cfg, &specs, &m, 0.0, &x, &mut latch).unwrap();
        assert!(step.u.iter().all(|v| v.abs() <= 0.082));
        for r in &step.rows {
            assert!(r.slack(&step.u) >= -1e-8, "{:?} slack {}", r.source, r.slack(&step.u));
        }
    }
}

#[test]
fn full_docking_run_respects_rows_and_box() {
    let Resolved::Run { scenario, .. } = ScenarioConfig::docking_preset().resolve().unwrap() else {
        panic!("docking preset resolves to a run")
    };
    for policy in [DisturbancePolicy::Zero, DisturbancePolicy::random(1), DisturbancePolicy::Adversarial] {
        let (log, o) = run_scenario(&scenario.with_policy(policy)).unwrap();
        assert!(o.peak_u_inf <= 0.082);
        assert!(log.records.iter().all(|r| r.u.iter().all(|v| v.abs() <= 0.082)));
        assert!(o.min_row_slack.unwrap() >= -1e-8, "{:?}", o.min_row_slack);
        assert_eq!(o.violation_count, 0, "{:?}", o.violations);
    }
}
