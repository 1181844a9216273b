//! Self-check suite behind the `verify` command: each check re-derives one
//! invariant of the library on sampled data and reports pass or fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::barrier::BarrierSpec;
use crate::config::{Resolved, ScenarioConfig};
use crate::controller::DockingControllerConfig;
use crate::dynamics::{CeresModel, ControlAffine, DisturbancePolicy, DisturbanceSample, HcwModel};
use crate::error::Result;
use crate::linalg::norm;
use crate::presets;
use crate::qp::{kkt_residual, solve_min_norm, QpProblem};
use crate::sim::{integrate_step, run_phase_portrait, run_scenario, write_log_csv, HeldInput, SimClass, StartRegion};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn from_result(name: &'static str, r: Result<(bool, String)>) -> Check {
    match r {
        Ok((passed, detail)) => check(name, passed, detail),
        Err(e) => check(name, false, format!("error: {e}")),
    }
}

/// Runs every check; `samples` scales the sampled checks.
pub fn run_suite(samples: usize) -> Vec<Check> {
    vec![
        from_result("ceres gain", gain_check(true)),
        from_result("docking gain", gain_check(false)),
        from_result("contact speed cap", contact_cap(samples)),
        from_result("lift gradient", gradient_check(samples / 10 + 1)),
        from_result("qp kkt", qp_check(samples / 10 + 1)),
        from_result("rk4 order", rk4_order()),
        from_result("docking zero policy", docking_zero()),
        from_result("ceres landing", ceres_landing()),
        from_result("determinism", determinism()),
        from_result("phase portrait", portrait()),
    ]
}

/// Table with one `PASS`/`FAIL` line per check.
pub fn format_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}  {:<width$}  {}\n", c.name, c.detail));
    }
    out
}

fn gain_check(ceres: bool) -> Result<(bool, String)> {
    let (spec, bounds, expected) = if ceres {
        let m = CeresModel::<f64>::reference();
        (presets::ceres_h1(&m, presets::CERES_GAIN)?, m.bounds, 0.355)
    } else {
        let m = HcwModel::<f64>::reference();
        (presets::docking_specs(&DockingControllerConfig::reference(), &m)?.h1, m.bounds, 24.7)
    };
    let k = spec.solve_alpha_gain(&bounds)?;
    let rel = (k - expected).abs() / expected;
    Ok((rel <= 0.005, format!("k = {k:.6}, expected {expected} (rel. gap {rel:.2e})")))
}

fn docking_h1() -> Result<(BarrierSpec<f64>, HcwModel<f64>)> {
    let m = HcwModel::reference();
    Ok((presets::docking_specs(&DockingControllerConfig::reference(), &m)?.h1, m))
}

fn contact_cap(samples: usize) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (dock, hcw) = docking_h1()?;
    let ceres = CeresModel::<f64>::reference();
    let landing = presets::ceres_h1(&ceres, presets::CERES_GAIN)?;
    let mut worst = f64::NEG_INFINITY;
    let mut accepted = 0usize;
    for i in 0..samples {
        let h = rng.random_range(-1e-6..=1e-6);
        let (spec, model, x): (&BarrierSpec<f64>, &dyn ControlAffine<f64>, Vec<f64>) = if i % 2 == 0 {
            let x = vec![rng.random_range(-0.03..0.03), h, rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5)];
            (&dock, &hcw, x)
        } else {
            let r = ceres.radius - h;
            let v = [rng.random_range(-3.0..3.0), rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
            (&landing, &ceres, vec![r, 0.0, 0.0, v[0], v[1], v[2]])
        };
        if spec.value(model, 0.0, &x)? > 0.0 {
            continue;
        }
        accepted += 1;
        let cap = (2.0 * spec.delta()).sqrt();
        worst = worst.max(spec.h_dot_w(model, 0.0, &x)? - cap);
    }
    Ok((accepted > 0 && worst <= 1e-8, format!("{accepted} states in the set, max(h_dot_w - cap) = {worst:.3e}")))
}

/// Worst relative error of the analytic lift gradient against central
/// differences. The step is `1e−6` times the norm of the configuration or
/// velocity block the component belongs to (at least 1).
pub fn gradient_error(spec: &BarrierSpec<f64>, model: &dyn ControlAffine<f64>, x: &[f64]) -> Result<f64> {
    let eval = spec.evaluate(model, 0.0, x)?;
    let half = x.len() / 2;
    let block_scale = [norm(&x[..half]).max(1.0), norm(&x[half..]).max(1.0)];
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let step = 1e-6 * block_scale[usize::from(i >= half)];
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += step;
        xm[i] -= step;
        let fd = (spec.value(model, 0.0, &xp)? - spec.value(model, 0.0, &xm)?) / (2.0 * step);
        let scale = norm(&eval.grad).max(1e-12);
        worst = worst.max((fd - eval.grad[i]).abs() / scale);
    }
    Ok(worst)
}

fn gradient_check(samples: usize) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (dock, hcw) = docking_h1()?;
    let ceres = CeresModel::<f64>::reference();
    let landing = presets::ceres_h1(&ceres, presets::CERES_GAIN)?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = [rng.random_range(-1.0..0.0), rng.random_range(-200.0..-1.0), rng.random_range(-0.5..0.5), rng.random_range(0.0..2.0)];
        worst = worst.max(gradient_error(&dock, &hcw, &x)?);
        let alt = rng.random_range(1_000.0..100_000.0);
        let x = [ceres.radius + alt, rng.random_range(-1e4..1e4), 0.0, rng.random_range(-20.0..5.0), rng.random_range(-20.0..20.0), 0.0];
        worst = worst.max(gradient_error(&landing, &ceres, &x)?);
    }
    Ok((worst < 1e-5, format!("{} states, worst relative error {worst:.3e}", 2 * samples)))
}

fn qp_check(samples: usize) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let m = 2 + i % 2;
        let mut p = QpProblem::new((0..m).map(|_| rng.random_range(-1.5..1.5)).collect(), 1.0);
        let anchor: Vec<f64> = (0..m).map(|_| rng.random_range(-0.5..0.5)).collect();
        for _ in 0..rng.random_range(0..=4) {
            let a: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b = a.iter().zip(&anchor).map(|(x, y)| x * y).sum::<f64>() + rng.random_range(0.1..1.0);
            p = p.with_halfspace(a, b);
        }
        let sol = solve_min_norm(&p)?;
        worst = worst.max(kkt_residual(&p, &sol).max());
    }
    Ok((worst < 1e-8, format!("{samples} problems, worst KKT residual {worst:.3e}")))
}

/// Final position error of a circular orbit integrated for a quarter period.
pub fn two_body_error(dt: f64) -> f64 {
    let mut model = CeresModel::<f64>::reference();
    model.bounds = crate::barrier::DisturbanceBounds::none();
    let r = model.radius + 10_000.0;
    let omega = (model.mu / r.powi(3)).sqrt();
    let horizon = 0.5 * std::f64::consts::PI / omega;
    let steps = (horizon / dt).round() as usize;
    let dt = horizon / steps as f64;
    let held = HeldInput { u: vec![0.0; 3], w: DisturbanceSample::zero(6, 3) };
    let mut x = vec![r, 0.0, 0.0, 0.0, r * omega, 0.0];
    for k in 0..steps {
        x = integrate_step(&model, k as f64 * dt, &x, &held, dt);
    }
    let exact = [r * (omega * horizon).cos(), r * (omega * horizon).sin(), 0.0];
    norm(&[x[0] - exact[0], x[1] - exact[1], x[2] - exact[2]])
}

fn rk4_order() -> Result<(bool, String)> {
    let e1 = two_body_error(40.0);
    let e2 = two_body_error(20.0);
    let order = (e1 / e2).log2();
    Ok((order >= 3.8, format!("errors {e1:.3e} -> {e2:.3e}, observed order {order:.2}")))
}

fn docking_run(policy: DisturbancePolicy<f64>) -> Result<(crate::sim::TrajectoryLog<f64>, crate::sim::SimOutcome<f64>)> {
    let Resolved::Run { scenario, .. } = ScenarioConfig::docking_preset().resolve()? else {
        unreachable!("docking preset is a run scenario")
    };
    run_scenario(&scenario.with_policy(policy))
}

fn docking_zero() -> Result<(bool, String)> {
    let (_, o) = docking_run(DisturbancePolicy::Zero)?;
    let lateral = o.terminal_state[0].abs();
    let ok = o.classification == SimClass::Docking && o.violation_count == 0 && lateral <= 0.03 + 1e-4;
    Ok((ok, format!("{:?} at t = {:.2} s, h_dot = {:.4}, |x1| = {lateral:.2e}", o.classification, o.t_f, o.terminal_h_dot)))
}

fn ceres_landing() -> Result<(bool, String)> {
    let Resolved::Run { scenario, .. } = ScenarioConfig::ceres_preset().resolve()? else {
        unreachable!("landing preset is a run scenario")
    };
    let (_, o) = run_scenario(&scenario)?;
    let ok = o.classification == SimClass::Landing && o.violation_count == 0 && o.terminal_h_dot > 0.0 && o.terminal_h_dot <= 1.5;
    Ok((ok, format!("{:?} at t = {:.1} s, h_dot = {:.4}", o.classification, o.t_f, o.terminal_h_dot)))
}

fn determinism() -> Result<(bool, String)> {
    let policy = DisturbancePolicy::random(3);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_log_csv(&docking_run(policy.clone())?.0, &mut a)?;
    write_log_csv(&docking_run(policy)?.0, &mut b)?;
    Ok((a == b, format!("{} bytes of CSV compared", a.len())))
}

fn portrait() -> Result<(bool, String)> {
    let Resolved::Portrait { settings, .. } = ScenarioConfig::portrait_preset().resolve()? else {
        unreachable!("portrait preset")
    };
    let p = run_phase_portrait(&settings)?;
    let gamma1 = settings.tolerances.gamma1;
    let mut ok = p.trajectories.len() == 6 && p.level_sets.len() == 4;
    for tr in &p.trajectories {
        ok &= tr.outcome.peak_h1 <= 1e-6;
        if tr.region == StartRegion::Inside {
            ok &= tr.outcome.contact.is_some() && tr.outcome.terminal_h_dot >= gamma1;
        }
    }
    Ok((ok, format!("{} trajectories, {} level sets", p.trajectories.len(), p.level_sets.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_one_line_per_check() {
        let checks = vec![check("a", true, "x".into()), check("bb", false, "y".into())];
        let t = format_table(&checks);
        assert_eq!(t.lines().count(), 2);
        assert!(t.starts_with("PASS  a "));
        assert!(t.contains("FAIL  bb"));
    }

    #[test]
    fn gradient_error_small_on_reference_states() {
        let (spec, model) = docking_h1().unwrap();
        assert!(gradient_error(&spec, &model, &[-0.2, -40.0, 0.01, 1.2]).unwrap() < 1e-5);
    }
}
