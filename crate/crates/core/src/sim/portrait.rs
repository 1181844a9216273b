use std::path::{Path, PathBuf};

use serde::Serialize;

use super::export::write_table;
use super::scenario::{run_scenario, ControlLaw, Plant, Scenario, SimOutcome};
use crate::barrier::{BarrierSpec, ContactTolerances};
use crate::controller::DockingControllerConfig;
use crate::dynamics::{DisturbancePolicy, DoubleIntegrator};
use crate::error::{Error, Result};
use crate::presets::axis_h1;
use crate::scalar::{abssq_inv, Scalar};

/// Phase-portrait setup on the approach axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PortraitSettings<T> {
    pub controller: DockingControllerConfig<T>,
    pub tolerances: ContactTolerances<T>,
    pub model: DoubleIntegrator<T>,
    /// Start of the in-layer trajectories; the speed is chosen so that
    /// `H₁ = −inside_depth·α_w⁻¹(2)`.
    pub inside_h: T,
    pub inside_depth: T,
    /// Start of the out-of-layer trajectories in the `(h, ḣ_w)` plane.
    pub outside_h: T,
    pub outside_h_dot_w: T,
    pub dt: T,
    pub timeout: T,
    /// Level-set values as multiples of `−α_w⁻¹(2)`.
    pub level_multiples: Vec<T>,
    pub level_h_min: T,
    pub level_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartRegion {
    Inside,
    Outside,
}

impl StartRegion {
    pub fn name(self) -> &'static str {
        match self {
            StartRegion::Inside => "inside",
            StartRegion::Outside => "outside",
        }
    }
}

/// One trajectory in the `(h, ḣ_w)` plane; points are `(t, h, ḣ, ḣ_w, H₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PortraitTrajectory<T> {
    pub region: StartRegion,
    pub policy: &'static str,
    pub outcome: SimOutcome<T>,
    pub points: Vec<[T; 5]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet<T> {
    pub level: T,
    /// `(h, ḣ_w)` pairs with `H₁(h, ḣ_w) = level`.
    pub points: Vec<(T, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Portrait<T> {
    pub spec: BarrierSpec<T>,
    pub trajectories: Vec<PortraitTrajectory<T>>,
    pub level_sets: Vec<LevelSet<T>>,
}

/// `ḣ_w` on the level set `H₁ = level` at height `h`:
/// `abssq⁻¹(2·(Φ(h) + δ − Φ(level)))`.
pub fn level_speed<T: Scalar>(spec: &BarrierSpec<T>, h: T, level: T) -> T {
    let p = spec.potential();
    abssq_inv(T::lit(2.0) * (p.eval(h) + spec.delta() - p.eval(level)))
}

pub fn level_set_polyline<T: Scalar>(spec: &BarrierSpec<T>, level: T, h_min: T, points: usize) -> LevelSet<T> {
    let n = points.max(2);
    let pts = (0..n)
        .map(|i| {
            let h = h_min - h_min * T::lit(i as f64) / T::lit((n - 1) as f64);
            (h, level_speed(spec, h, level))
        })
        .collect();
    LevelSet { level, points: pts }
}

/// Axis state with the given `h` and worst-case `ḣ_w`.
pub fn state_from_phase<T: Scalar>(model: &DoubleIntegrator<T>, h: T, h_dot_w: T) -> Vec<T> {
    vec![h, h_dot_w - model.bounds.w_x_max]
}

pub fn run_phase_portrait<T: Scalar>(settings: &PortraitSettings<T>) -> Result<Portrait<T>> {
    let spec = axis_h1(&settings.controller, &settings.model, settings.tolerances)?;
    let eps = spec.layer_width();
    let inside_speed = level_speed(&spec, settings.inside_h, -settings.inside_depth * eps);
    let inside = state_from_phase(&settings.model, settings.inside_h, inside_speed);
    let outside = state_from_phase(&settings.model, settings.outside_h, settings.outside_h_dot_w);
    let outside_value = spec.lift_value(settings.outside_h, settings.outside_h_dot_w)?;
    if !(outside_value < -eps) {
        return Err(Error::config("outside", "out-of-layer start must have H1 < -layer width"));
    }
    if !(settings.inside_depth >= T::zero() && settings.inside_depth <= T::one()) {
        return Err(Error::config("inside_depth", "must lie in [0, 1]"));
    }

    let mut trajectories = Vec::new();
    for (region, x0) in [(StartRegion::Inside, inside), (StartRegion::Outside, outside)] {
        for policy in [DisturbancePolicy::Helpful, DisturbancePolicy::Zero, DisturbancePolicy::Adversarial] {
            let scenario = Scenario {
                id: format!("phase-portrait-{}-{}", region.name(), policy.name()),
                plant: Plant::Axis(settings.model.clone()),
                law: ControlLaw::LineMax { spec: spec.clone() },
                policy: policy.clone(),
                x0: x0.clone(),
                t0: T::zero(),
                dt: settings.dt,
                timeout: settings.timeout,
                log_stride: 1,
                config_hash: String::new(),
            };
            let (log, outcome) = run_scenario(&scenario)?;
            let points = log.records.iter().map(|r| [r.t, r.h, r.h_dot, r.h_dot_w, r.h1]).collect();
            trajectories.push(PortraitTrajectory { region, policy: policy.name(), outcome, points });
        }
    }
    let level_sets = settings
        .level_multiples
        .iter()
        .map(|&mult| level_set_polyline(&spec, -mult * eps, settings.level_h_min, settings.level_points))
        .collect();
    Ok(Portrait { spec, trajectories, level_sets })
}

/// Writes one CSV per trajectory and per level set into `dir`.
pub fn write_portrait<T: Scalar>(portrait: &Portrait<T>, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for tr in &portrait.trajectories {
        let path = dir.join(format!("trajectory_{}_{}.csv", tr.region.name(), tr.policy));
        write_table(&path, &["t", "h", "h_dot", "h_dot_w", "H1"], tr.points.iter().map(|p| p.to_vec()))?;
        written.push(path);
    }
    for (i, ls) in portrait.level_sets.iter().enumerate() {
        let path = dir.join(format!("level_set_{i}.csv"));
        write_table(&path, &["level", "h", "h_dot_w"], ls.points.iter().map(|&(h, v)| vec![ls.level, h, v]))?;
        written.push(path);
    }
    Ok(written)
}
