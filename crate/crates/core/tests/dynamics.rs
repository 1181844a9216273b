use rcbf::barrier::DisturbanceBounds;
use rcbf::controller::DockingControllerConfig;
use rcbf::dynamics::{
    hcw_h_family, velocity_constraint, CeresModel, ControlAffine, DisturbanceGenerator, DisturbancePolicy,
    DisturbanceSample, DoubleIntegrator, HcwModel,
};
use rcbf::linalg::norm;
use rcbf::presets;
use rcbf::sim::{detect_contact, integrate_step, HeldInput};
use rcbf::verify::two_body_error;

fn quiet_ceres() -> CeresModel<f64> {
    let mut m = CeresModel::reference();
    m.bounds = DisturbanceBounds::none();
    m
}

fn coast() -> HeldInput<f64> {
    HeldInput { u: vec![0.0; 3], w: DisturbanceSample::zero(6, 3) }
}

#[test]
fn altitude_examples() {
    let m = CeresModel::<f64>::reference();
    let out = m.altitude_output();
    assert_eq!(out.value(0.0, &[476_000.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
    assert_eq!(out.value(0.0, &[0.0, 477_000.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), -1000.0);
    for r in [[1.0, 2.0, 3.0], [-4.0e5, 3.0e5, 1.0e3], [0.0, 0.0, -7.0]] {
        let jet = out.jet(0.0, &[r[0], r[1], r[2], 1.0, 2.0, 3.0]).unwrap();
        assert!((norm(&jet.grad[..3]) - 1.0).abs() < 1e-14);
        assert!(jet.grad[3..].iter().all(|&g| g == 0.0));
    }
}

#[test]
fn velocity_limit_examples() {
    assert_eq!(velocity_constraint(10.0, &[0.0, 0.0, 0.0, 0.0]).0, -10.0);
    assert_eq!(velocity_constraint(10.0, &[0.0, 0.0, 3.0, -10.0]).0, 0.0);
    assert_eq!(velocity_constraint(10.0, &[0.0, 0.0, 11.0, 0.0]).0, 1.0);
}

#[test]
fn hcw_family_examples() {
    let fam = hcw_h_family(0.03_f64);
    let x = [0.0, -10.0, 0.0, 0.0];
    assert_eq!(fam.axial.value(0.0, &x).unwrap(), -10.0);
    assert!((fam.right.value(0.0, &x).unwrap() + 0.03).abs() < 1e-15);
    assert!((fam.left.value(0.0, &x).unwrap() - 9.97).abs() < 1e-12);
    assert_eq!(fam.right.value(0.0, &[0.03, 0.0, 0.0, 0.0]).unwrap(), 0.0);
}

#[test]
fn hcw_origin_stays_put() {
    let m = HcwModel::<f64>::reference();
    let held = HeldInput { u: vec![0.0; 2], w: DisturbanceSample::zero(4, 2) };
    let mut x = vec![0.0; 4];
    for k in 0..5000 {
        x = integrate_step(&m, k as f64 * 0.1, &x, &held, 0.1);
    }
    assert_eq!(x, vec![0.0; 4]);
}

#[test]
fn circular_orbit_radius_drift_over_one_period() {
    let m = quiet_ceres();
    let r = m.radius + 20_000.0;
    let v = (m.mu / r).sqrt();
    let period = 2.0 * std::f64::consts::PI * r / v;
    let dt = 0.1;
    let steps = (period / dt).ceil() as usize;
    let mut x = vec![r, 0.0, 0.0, 0.0, v, 0.0];
    let e0 = m.specific_energy(&x);
    let mut worst: f64 = 0.0;
    for k in 0..steps {
        x = integrate_step(&m, k as f64 * dt, &x, &coast(), dt);
        worst = worst.max((norm(&x[..3]) - r).abs());
    }
    assert!(worst < 1e-3, "radius drift {worst}");
    let drift = (m.specific_energy(&x) - e0).abs() / e0.abs();
    assert!(drift < 1e-10, "energy drift {drift}");
}

#[test]
fn energy_is_conserved_on_an_eccentric_coast() {
    let m = quiet_ceres();
    let mut x = vec![m.radius + 50_000.0, 0.0, 0.0, 0.0, 300.0, 40.0];
    let e0 = m.specific_energy(&x);
    for k in 0..20_000 {
        x = integrate_step(&m, k as f64 * 0.1, &x, &coast(), 0.1);
    }
    assert!((m.specific_energy(&x) - e0).abs() / e0.abs() < 1e-9);
}

#[test]
fn rk4_global_order() {
    let e1 = two_body_error(40.0);
    let e2 = two_body_error(20.0);
    let order = (e1 / e2).log2();
    assert!(order >= 3.8, "observed order {order}");
}

#[test]
fn halving_dt_shrinks_error_sixteenfold() {
    let m = quiet_ceres();
    let x0 = vec![m.radius + 100_000.0, 0.0, 0.0, -20.0, 250.0, 0.0];
    let run = |dt: f64| {
        let steps = (2000.0 / dt).round() as usize;
        let mut x = x0.clone();
        for k in 0..steps {
            x = integrate_step(&m, k as f64 * dt, &x, &coast(), dt);
        }
        x
    };
    let fine = run(1.25);
    let a = run(20.0);
    let b = run(10.0);
    let ea = norm(&[a[0] - fine[0], a[1] - fine[1], a[2] - fine[2]]);
    let eb = norm(&[b[0] - fine[0], b[1] - fine[1], b[2] - fine[2]]);
    let ratio = ea / eb;
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn contact_at_the_linear_root() {
    // p(t) = −2.3 + t crosses zero at t = 2.3
    let m = DoubleIntegrator::<f64>::new(1.0, DisturbanceBounds::none());
    let held = HeldInput { u: vec![0.0], w: DisturbanceSample::zero(2, 1) };
    let (t, x) = detect_contact(&m, &m.position_output(), 2.0, &[-0.3, 1.0], &held, 0.5, 1e-9).unwrap();
    assert!((t - 2.3).abs() <= 1e-9);
    assert!(x[0].abs() <= 1e-9);
}

#[test]
fn policies_match_their_definitions() {
    let m = HcwModel::<f64>::reference();
    let spec = presets::docking_specs(&DockingControllerConfig::reference(), &m).unwrap().h1;
    let x = [0.01, -30.0, 0.0, 0.8];
    let mut zero = DisturbanceGenerator::new(DisturbancePolicy::Zero).unwrap();
    assert_eq!(zero.sample(&spec, &m, 0.0, &x).unwrap(), DisturbanceSample::zero(4, 2));

    let mut adv = DisturbanceGenerator::new(DisturbancePolicy::Adversarial).unwrap();
    let mut help = DisturbanceGenerator::new(DisturbancePolicy::Helpful).unwrap();
    let a = adv.sample(&spec, &m, 0.0, &x).unwrap();
    let h = help.sample(&spec, &m, 0.0, &x).unwrap();
    for (p, q) in a.w_u.iter().zip(&h.w_u).chain(a.w_x.iter().zip(&h.w_x)) {
        assert_eq!(*p, -*q);
    }
    assert!((norm(&a.w_u) - 0.002).abs() < 1e-15);
    assert!((norm(&a.w_x) - 0.001).abs() < 1e-15);
    assert_eq!(&a.w_x[2..], &[0.0, 0.0]);
}

#[test]
fn same_seed_same_sequence() {
    let m = CeresModel::<f64>::reference();
    let spec = presets::ceres_h1(&m, presets::CERES_GAIN).unwrap();
    let x = [m.radius + 1e4, 0.0, 0.0, 0.0, 10.0, 0.0];
    let draw = |seed| {
        let mut g = DisturbanceGenerator::new(DisturbancePolicy::SeededRandom { seed, hold_interval: 1.0 }).unwrap();
        (0..200).map(|k| g.sample(&spec, &m, k as f64 * 0.5, &x).unwrap()).collect::<Vec<_>>()
    };
    let a = draw(42);
    assert_eq!(a, draw(42));
    assert_ne!(a, draw(43));
    for s in &a {
        assert!(norm(&s.w_u) <= 0.025 && norm(&s.w_x) <= 0.01);
        assert_eq!(&s.w_x[3..], &[0.0, 0.0, 0.0]);
    }
}

#[test]
fn input_matrices_have_the_documented_shape() {
    let c = CeresModel::<f64>::reference();
    let g = c.input_matrix(0.0, &[5e5, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!((g.rows(), g.cols()), (6, 3));
    assert_eq!(g.get(3, 0), 1.0);
    assert_eq!(g.get(0, 0), 0.0);
    let h = HcwModel::<f64>::reference();
    let g = h.input_matrix(0.0, &[0.0; 4]);
    assert_eq!((g.rows(), g.cols()), (4, 2));
    assert_eq!(g.get(3, 1), 1.0);
}
