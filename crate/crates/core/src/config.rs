//! JSON scenario configuration: presets, overrides, validation and
//! conversion into runnable scenarios.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::barrier::{BarrierSpec, DisturbanceBounds, Membership, SafetyFunction};
use crate::controller::{DockingControllerConfig, DockingSpecs};
use crate::dynamics::{CeresModel, DisturbancePolicy, DoubleIntegrator, HcwModel};
use crate::error::{Error, Result};
use crate::presets;
use crate::sim::{ControlLaw, Plant, PortraitSettings, Scenario};

/// Relative gap between an auto-solved gain and the stored reference above
/// which a warning is emitted.
pub const GAIN_WARN_FRACTION: f64 = 0.01;

/// A fixed class-K gain or one solved from the tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainSetting {
    Auto,
    Value(f64),
}

impl Serialize for GainSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GainSetting::Auto => s.serialize_str("auto"),
            GainSetting::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for GainSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(GainSetting::Value(v)),
            Raw::Text(s) if s == "auto" => Ok(GainSetting::Auto),
            Raw::Text(s) => s
                .parse::<f64>()
                .map(GainSetting::Value)
                .map_err(|_| serde::de::Error::custom(format!("gain must be a number or \"auto\", got {s:?}"))),
        }
    }
}

impl std::str::FromStr for GainSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(GainSetting::Auto);
        }
        s.parse::<f64>()
            .map(GainSetting::Value)
            .map_err(|_| Error::config("k", format!("expected `auto` or a number, got `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Random,
    Zero,
    Adversarial,
    Helpful,
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PolicyKind::Random),
            "zero" => Ok(PolicyKind::Zero),
            "adversarial" => Ok(PolicyKind::Adversarial),
            "helpful" => Ok(PolicyKind::Helpful),
            _ => Err(Error::config("policy", format!("unknown policy `{s}`"))),
        }
    }
}

/// Step size, horizon, disturbance and logging settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    pub dt: f64,
    pub timeout: f64,
    pub policy: PolicyKind,
    pub seed: u64,
    pub hold_interval: f64,
    pub log_stride: usize,
}

impl RunSettings {
    pub fn policy(&self) -> DisturbancePolicy<f64> {
        match self.policy {
            PolicyKind::Random => DisturbancePolicy::SeededRandom { seed: self.seed, hold_interval: self.hold_interval },
            PolicyKind::Zero => DisturbancePolicy::Zero,
            PolicyKind::Adversarial => DisturbancePolicy::Adversarial,
            PolicyKind::Helpful => DisturbancePolicy::Helpful,
        }
    }

    fn validate(&self) -> Result<()> {
        positive("run.dt", self.dt)?;
        positive("run.timeout", self.timeout)?;
        positive("run.hold_interval", self.hold_interval)?;
        if self.log_stride == 0 {
            return Err(Error::config("run.log_stride", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CeresConfig {
    pub mu: f64,
    pub radius: f64,
    pub input_bound: f64,
    pub w_u_max: f64,
    pub w_x_max: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub lipschitz: f64,
    pub gain: GainSetting,
    /// `(r, v)`, m and m/s.
    pub initial_state: Vec<f64>,
    pub run: RunSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DockingConfig {
    pub mean_motion: f64,
    pub input_bound: f64,
    pub w_u_max: f64,
    pub w_x_max: f64,
    pub lateral_tolerance: f64,
    pub max_speed: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub lipschitz: f64,
    /// Gain on `H₁`.
    pub k1: GainSetting,
    pub k0: f64,
    pub kv: f64,
    pub kp: f64,
    pub u1: f64,
    pub u0: f64,
    /// `(x₁, x₂, ẋ₁, ẋ₂)`, m and m/s.
    pub initial_state: Vec<f64>,
    /// Reject initial states outside the boundary layer of `H₁`.
    pub require_layer: bool,
    pub run: RunSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitConfig {
    pub input_bound: f64,
    pub w_u_max: f64,
    pub w_x_max: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub k1: GainSetting,
    pub u1: f64,
    pub inside_h: f64,
    /// In-layer start depth as a fraction of the layer width.
    pub inside_depth: f64,
    pub outside_h: f64,
    pub outside_h_dot_w: f64,
    pub dt: f64,
    pub timeout: f64,
    pub level_multiples: Vec<f64>,
    pub level_h_min: f64,
    pub level_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum ScenarioConfig {
    CeresLanding(CeresConfig),
    LeoDocking(DockingConfig),
    PhasePortrait(PortraitConfig),
}

/// Gain actually used, with its origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedGain {
    pub value: f64,
    /// Gain from the tolerances, when it could be solved.
    pub solved: Option<f64>,
    pub auto: bool,
    /// Published value the solved gain is compared against.
    pub reference: f64,
}

impl ResolvedGain {
    /// Relative gap between the solved gain and the reference.
    pub fn reference_gap(&self) -> Option<f64> {
        self.solved.map(|s| (s - self.reference).abs() / self.reference)
    }
}

#[derive(Debug, Clone)]
pub enum Resolved {
    Run { scenario: Scenario<f64>, gain: ResolvedGain },
    Portrait { settings: PortraitSettings<f64>, gain: ResolvedGain },
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v}")))
    }
}

fn nonnegative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be nonnegative and finite, got {v}")))
    }
}

fn check_feasible(spec: &BarrierSpec<f64>, bounds: &DisturbanceBounds<f64>, gamma1: f64, gamma2: f64, lh: f64) -> Result<()> {
    if spec.feasibility_check(bounds) {
        return Ok(());
    }
    let required = gamma1 + 2.0 * lh * bounds.w_x_max;
    Err(Error::config(
        "gamma2",
        format!("feasibility assumption violated: gamma2 = {gamma2} must exceed gamma1 + 2 l_h w_x_max = {required}"),
    ))
}

fn resolve_gain(
    setting: GainSetting,
    reference: f64,
    field: &str,
    solve: impl Fn() -> Result<f64>,
) -> Result<ResolvedGain> {
    let solved = solve().ok();
    let gain = match setting {
        GainSetting::Auto => {
            let value = solve().map_err(|e| Error::config(field, format!("cannot solve gain: {e}")))?;
            ResolvedGain { value, solved: Some(value), auto: true, reference }
        }
        GainSetting::Value(v) => {
            positive(field, v)?;
            ResolvedGain { value: v, solved, auto: false, reference }
        }
    };
    if gain.auto {
        if let Some(gap) = gain.reference_gap() {
            if gap > GAIN_WARN_FRACTION {
                log::warn!(
                    "solved {field} = {:.6} differs from the reference {reference} by {:.2}%",
                    gain.value,
                    100.0 * gap
                );
            }
        }
    }
    Ok(gain)
}

impl ScenarioConfig {
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "ceres-landing" => Some(Self::ceres_preset()),
            "leo-docking" => Some(Self::docking_preset()),
            "phase-portrait" => Some(Self::portrait_preset()),
            _ => None,
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["ceres-landing", "leo-docking", "phase-portrait"]
    }

    pub fn ceres_preset() -> Self {
        let m = CeresModel::<f64>::reference();
        ScenarioConfig::CeresLanding(CeresConfig {
            mu: m.mu,
            radius: m.radius,
            input_bound: m.input_bound,
            w_u_max: m.bounds.w_u_max,
            w_x_max: m.bounds.w_x_max,
            gamma1: presets::CERES_GAMMA1,
            gamma2: presets::CERES_GAMMA2,
            lipschitz: 1.0,
            gain: GainSetting::Value(presets::CERES_GAIN),
            initial_state: vec![m.radius + CERES_START_ALTITUDE, 0.0, 0.0, 0.0, 15.0, 0.0],
            run: RunSettings {
                dt: CERES_DT,
                timeout: 10_000.0,
                policy: PolicyKind::Random,
                seed: 0,
                hold_interval: 1.0,
                log_stride: 50,
            },
        })
    }

    pub fn docking_preset() -> Self {
        let m = HcwModel::<f64>::reference();
        let c = DockingControllerConfig::<f64>::reference();
        ScenarioConfig::LeoDocking(DockingConfig {
            mean_motion: m.mean_motion,
            input_bound: m.input_bound,
            w_u_max: m.bounds.w_u_max,
            w_x_max: m.bounds.w_x_max,
            lateral_tolerance: m.lateral_tolerance,
            max_speed: m.max_speed,
            gamma1: presets::DOCKING_GAMMA1,
            gamma2: presets::DOCKING_GAMMA2,
            lipschitz: 1.0,
            k1: GainSetting::Value(c.k1),
            k0: c.k0,
            kv: c.kv,
            kp: c.kp,
            u1: c.u1,
            u0: c.u0,
            initial_state: vec![-5.0, -100.0, 0.0, DOCKING_START_SPEED],
            require_layer: true,
            run: RunSettings {
                dt: DOCKING_DT,
                timeout: 5_000.0,
                policy: PolicyKind::Random,
                seed: 0,
                hold_interval: 1.0,
                log_stride: 20,
            },
        })
    }

    pub fn portrait_preset() -> Self {
        let m = HcwModel::<f64>::reference();
        let c = DockingControllerConfig::<f64>::reference();
        ScenarioConfig::PhasePortrait(PortraitConfig {
            input_bound: m.input_bound,
            w_u_max: m.bounds.w_u_max,
            w_x_max: m.bounds.w_x_max,
            gamma1: presets::DOCKING_GAMMA1,
            gamma2: presets::DOCKING_GAMMA2,
            k1: GainSetting::Value(c.k1),
            u1: c.u1,
            inside_h: -10.0,
            inside_depth: 0.5,
            outside_h: -10.0,
            outside_h_dot_w: 0.2,
            dt: 0.02,
            timeout: 2_000.0,
            level_multiples: vec![0.0, 1.0, 1.4, 2.0],
            level_h_min: -12.0,
            level_points: 241,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioConfig::CeresLanding(_) => "ceres-landing",
            ScenarioConfig::LeoDocking(_) => "leo-docking",
            ScenarioConfig::PhasePortrait(_) => "phase-portrait",
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the compact JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn run_settings_mut(&mut self) -> Option<&mut RunSettings> {
        match self {
            ScenarioConfig::CeresLanding(c) => Some(&mut c.run),
            ScenarioConfig::LeoDocking(c) => Some(&mut c.run),
            ScenarioConfig::PhasePortrait(_) => None,
        }
    }

    /// Applies a named numeric override. Field names match the JSON keys;
    /// `k` addresses the primary gain (`gain` or `k1`).
    pub fn set_field(&mut self, field: &str, value: &str) -> Result<()> {
        let num = || value.parse::<f64>().map_err(|_| Error::config(field, format!("`{value}` is not a number")));
        if field == "k" {
            let g: GainSetting = value.parse()?;
            match self {
                ScenarioConfig::CeresLanding(c) => c.gain = g,
                ScenarioConfig::LeoDocking(c) => c.k1 = g,
                ScenarioConfig::PhasePortrait(c) => c.k1 = g,
            }
            return Ok(());
        }
        let slot: &mut f64 = match (self, field) {
            (ScenarioConfig::CeresLanding(c), "gamma1") => &mut c.gamma1,
            (ScenarioConfig::CeresLanding(c), "gamma2") => &mut c.gamma2,
            (ScenarioConfig::CeresLanding(c), "input_bound") => &mut c.input_bound,
            (ScenarioConfig::CeresLanding(c), "w_u_max") => &mut c.w_u_max,
            (ScenarioConfig::CeresLanding(c), "w_x_max") => &mut c.w_x_max,
            (ScenarioConfig::CeresLanding(c), "mu") => &mut c.mu,
            (ScenarioConfig::CeresLanding(c), "radius") => &mut c.radius,
            (ScenarioConfig::CeresLanding(c), "lipschitz") => &mut c.lipschitz,
            (ScenarioConfig::CeresLanding(c), "dt") => &mut c.run.dt,
            (ScenarioConfig::CeresLanding(c), "timeout") => &mut c.run.timeout,
            (ScenarioConfig::LeoDocking(c), "gamma1") => &mut c.gamma1,
            (ScenarioConfig::LeoDocking(c), "gamma2") => &mut c.gamma2,
            (ScenarioConfig::LeoDocking(c), "input_bound") => &mut c.input_bound,
            (ScenarioConfig::LeoDocking(c), "w_u_max") => &mut c.w_u_max,
            (ScenarioConfig::LeoDocking(c), "w_x_max") => &mut c.w_x_max,
            (ScenarioConfig::LeoDocking(c), "mean_motion") => &mut c.mean_motion,
            (ScenarioConfig::LeoDocking(c), "lateral_tolerance") => &mut c.lateral_tolerance,
            (ScenarioConfig::LeoDocking(c), "max_speed") => &mut c.max_speed,
            (ScenarioConfig::LeoDocking(c), "lipschitz") => &mut c.lipschitz,
            (ScenarioConfig::LeoDocking(c), "k0") => &mut c.k0,
            (ScenarioConfig::LeoDocking(c), "kv") => &mut c.kv,
            (ScenarioConfig::LeoDocking(c), "kp") => &mut c.kp,
            (ScenarioConfig::LeoDocking(c), "u1") => &mut c.u1,
            (ScenarioConfig::LeoDocking(c), "u0") => &mut c.u0,
            (ScenarioConfig::LeoDocking(c), "dt") => &mut c.run.dt,
            (ScenarioConfig::LeoDocking(c), "timeout") => &mut c.run.timeout,
            (ScenarioConfig::PhasePortrait(c), "gamma1") => &mut c.gamma1,
            (ScenarioConfig::PhasePortrait(c), "gamma2") => &mut c.gamma2,
            (ScenarioConfig::PhasePortrait(c), "input_bound") => &mut c.input_bound,
            (ScenarioConfig::PhasePortrait(c), "w_u_max") => &mut c.w_u_max,
            (ScenarioConfig::PhasePortrait(c), "w_x_max") => &mut c.w_x_max,
            (ScenarioConfig::PhasePortrait(c), "u1") => &mut c.u1,
            (ScenarioConfig::PhasePortrait(c), "dt") => &mut c.dt,
            (ScenarioConfig::PhasePortrait(c), "timeout") => &mut c.timeout,
            (cfg, _) => {
                return Err(Error::config(field, format!("not an overridable field of {}", cfg.name())));
            }
        };
        *slot = num()?;
        Ok(())
    }

    /// Validates every field and builds the runnable form.
    pub fn resolve(&self) -> Result<Resolved> {
        let hash = self.hash();
        match self {
            ScenarioConfig::CeresLanding(c) => resolve_ceres(c, hash),
            ScenarioConfig::LeoDocking(c) => resolve_docking(c, hash),
            ScenarioConfig::PhasePortrait(c) => resolve_portrait(c),
        }
    }
}

/// Altitude of the reference landing start above the surface, m.
pub const CERES_START_ALTITUDE: f64 = 900_000.0;
/// Control and integration step of the landing run, s.
pub const CERES_DT: f64 = 0.02;
/// Docking control step, s. The held input lets `H₁` creep above zero by
/// roughly `5e−4·dt` under the adversarial policy.
pub const DOCKING_DT: f64 = 0.001;
/// Approach speed placing the reference docking start at the middle of the
/// boundary layer (`H₁ = −α_w⁻¹(2)/2` at `x₂ = −100` m with `k₁ = 25`).
pub const DOCKING_START_SPEED: f64 = 3.376845467158023;

fn resolve_ceres(c: &CeresConfig, hash: String) -> Result<Resolved> {
    positive("mu", c.mu)?;
    positive("radius", c.radius)?;
    positive("input_bound", c.input_bound)?;
    nonnegative("w_u_max", c.w_u_max)?;
    nonnegative("w_x_max", c.w_x_max)?;
    positive("gamma1", c.gamma1)?;
    positive("gamma2", c.gamma2)?;
    positive("lipschitz", c.lipschitz)?;
    c.run.validate()?;
    if c.initial_state.len() != 6 {
        return Err(Error::config("initial_state", "expected 6 components (r, v)"));
    }
    let bounds = DisturbanceBounds::new(c.w_u_max, c.w_x_max)?;
    let model = CeresModel::new(c.mu, c.radius, c.input_bound, bounds)?;
    let tol = presets::ceres_tolerances(c.gamma1, c.gamma2);
    if !(c.gamma2 > c.gamma1) {
        return Err(Error::config("gamma2", "must exceed gamma1"));
    }
    let probe = presets::ceres_h1_with(&model, tol, presets::CERES_GAIN).map_err(|e| Error::config("potential", e.to_string()))?;
    check_feasible(&probe, &bounds, c.gamma1, c.gamma2, c.lipschitz)?;
    let probe = BarrierSpec::h1(
        model.altitude_output(),
        probe.potential().clone(),
        tol,
        probe.alpha().clone(),
        c.lipschitz,
    )?;
    let gain = resolve_gain(c.gain, presets::CERES_GAIN, "gain", || probe.solve_alpha_gain(&bounds))?;
    let spec = probe.with_alpha(crate::barrier::ClassK::linear(gain.value)?);
    require_safe(&spec, &model, &c.initial_state, false)?;
    let scenario = Scenario {
        id: "ceres-landing".into(),
        plant: Plant::Ceres(model),
        law: ControlLaw::LineMax { spec },
        policy: c.run.policy(),
        x0: c.initial_state.clone(),
        t0: 0.0,
        dt: c.run.dt,
        timeout: c.run.timeout,
        log_stride: c.run.log_stride,
        config_hash: hash,
    };
    Ok(Resolved::Run { scenario, gain })
}

fn docking_controller(c: &DockingConfig, k1: f64) -> Result<DockingControllerConfig<f64>> {
    for (f, v) in [("k0", c.k0), ("kv", c.kv), ("kp", c.kp), ("u1", c.u1), ("u0", c.u0)] {
        positive(f, v)?;
    }
    Ok(DockingControllerConfig { k1, k0: c.k0, kv: c.kv, kp: c.kp, u1: c.u1, u0: c.u0 })
}

fn resolve_docking(c: &DockingConfig, hash: String) -> Result<Resolved> {
    nonnegative("mean_motion", c.mean_motion)?;
    positive("input_bound", c.input_bound)?;
    nonnegative("w_u_max", c.w_u_max)?;
    nonnegative("w_x_max", c.w_x_max)?;
    positive("lateral_tolerance", c.lateral_tolerance)?;
    positive("max_speed", c.max_speed)?;
    positive("gamma1", c.gamma1)?;
    positive("gamma2", c.gamma2)?;
    positive("lipschitz", c.lipschitz)?;
    c.run.validate()?;
    if c.initial_state.len() != 4 {
        return Err(Error::config("initial_state", "expected 4 components (x1, x2, x1_dot, x2_dot)"));
    }
    if !(c.gamma2 > c.gamma1) {
        return Err(Error::config("gamma2", "must exceed gamma1"));
    }
    let bounds = DisturbanceBounds::new(c.w_u_max, c.w_x_max)?;
    let model = HcwModel::new(c.mean_motion, c.input_bound, bounds, c.lateral_tolerance, c.max_speed)?;
    let tol = presets::docking_tolerances(c.gamma1, c.gamma2);
    let reference_k1 = DockingControllerConfig::<f64>::reference().k1;
    let probe_cfg = docking_controller(c, reference_k1)?;
    let probe = presets::docking_specs_with(&probe_cfg, &model, tol)?;
    let h1 = BarrierSpec::h1(
        probe.h1.output().clone(),
        probe.h1.potential().clone(),
        tol,
        probe.h1.alpha().clone(),
        c.lipschitz,
    )?;
    check_feasible(&h1, &bounds, c.gamma1, c.gamma2, c.lipschitz)?;
    let gain = resolve_gain(c.k1, reference_k1, "k1", || h1.solve_alpha_gain(&bounds))?;
    let config = docking_controller(c, gain.value)?;
    let mut specs: DockingSpecs<f64> = presets::docking_specs_with(&config, &model, tol)?;
    specs.h1 = h1.with_alpha(crate::barrier::ClassK::linear(gain.value)?);
    let x = &c.initial_state;
    require_safe(&specs.h1, &model, x, c.require_layer)?;
    if specs.h0_right.value(&model, 0.0, x)? > 0.0 {
        return Err(Error::config("initial_state", "violates the right lateral constraint (H0r > 0)"));
    }
    if specs.velocity.jet(&model, 0.0, x)?.value > 0.0 {
        return Err(Error::config("initial_state", "exceeds the velocity limit"));
    }
    let scenario = Scenario {
        id: "leo-docking".into(),
        plant: Plant::Hcw(model),
        law: ControlLaw::Docking { config, specs },
        policy: c.run.policy(),
        x0: x.clone(),
        t0: 0.0,
        dt: c.run.dt,
        timeout: c.run.timeout,
        log_stride: c.run.log_stride,
        config_hash: hash,
    };
    Ok(Resolved::Run { scenario, gain })
}

fn require_safe(
    spec: &BarrierSpec<f64>,
    model: &dyn crate::dynamics::ControlAffine<f64>,
    x: &[f64],
    layer: bool,
) -> Result<()> {
    let membership = spec
        .membership(model, 0.0, x, None)
        .map_err(|e| Error::config("initial_state", e.to_string()))?;
    match membership {
        Membership::Outside => {
            let value = spec.value(model, 0.0, x)?;
            Err(Error::config("initial_state", format!("not in the safe set: H1 = {value:e}")))
        }
        Membership::Interior if layer => {
            let value = spec.value(model, 0.0, x)?;
            Err(Error::config(
                "initial_state",
                format!("not in the boundary layer: H1 = {value:e} < -{:e}", spec.layer_width()),
            ))
        }
        _ => Ok(()),
    }
}

fn resolve_portrait(c: &PortraitConfig) -> Result<Resolved> {
    positive("input_bound", c.input_bound)?;
    nonnegative("w_u_max", c.w_u_max)?;
    nonnegative("w_x_max", c.w_x_max)?;
    positive("gamma1", c.gamma1)?;
    positive("u1", c.u1)?;
    positive("dt", c.dt)?;
    positive("timeout", c.timeout)?;
    if !(c.gamma2 > c.gamma1) {
        return Err(Error::config("gamma2", "must exceed gamma1"));
    }
    if !(c.inside_h < 0.0 && c.outside_h < 0.0) {
        return Err(Error::config("inside_h", "start heights must be negative"));
    }
    if !(c.level_h_min < 0.0) {
        return Err(Error::config("level_h_min", "must be negative"));
    }
    if c.level_points < 2 {
        return Err(Error::config("level_points", "need at least 2 points"));
    }
    let bounds = DisturbanceBounds::new(c.w_u_max, c.w_x_max)?;
    let model = DoubleIntegrator::new(c.input_bound, bounds);
    let tol = presets::docking_tolerances(c.gamma1, c.gamma2);
    let mut controller = DockingControllerConfig::<f64>::reference();
    controller.u1 = c.u1;
    let probe = presets::axis_h1(&controller, &model, tol)?;
    check_feasible(&probe, &bounds, c.gamma1, c.gamma2, 1.0)?;
    let gain = resolve_gain(c.k1, controller.k1, "k1", || probe.solve_alpha_gain(&bounds))?;
    controller.k1 = gain.value;
    let settings = PortraitSettings {
        controller,
        tolerances: tol,
        model,
        inside_h: c.inside_h,
        inside_depth: c.inside_depth,
        outside_h: c.outside_h,
        outside_h_dot_w: c.outside_h_dot_w,
        dt: c.dt,
        timeout: c.timeout,
        level_multiples: c.level_multiples.clone(),
        level_h_min: c.level_h_min,
        level_points: c.level_points,
    };
    Ok(Resolved::Portrait { settings, gain })
}
