use serde::Serialize;

use super::integrate::{detect_contact, integrate_step, HeldInput};
use crate::barrier::{eval_w, margin_from_jet, BarrierSpec, ContactClass, ContactObjective, Membership, SafetyFunction};
use crate::controller::{docking_control, landing_control, DockingControllerConfig, DockingSpecs, RowSource};
use crate::dynamics::{CeresModel, ControlAffine, DisturbanceGenerator, DisturbancePolicy, DoubleIntegrator, HcwModel};
use crate::error::{Error, Result};
use crate::linalg::{dot, is_finite, norm_inf};
use crate::qp::LineBinding;
use crate::scalar::Scalar;

/// Threshold above which a monitored barrier value counts as a violation.
pub const SAFETY_TOL: f64 = 1e-6;
/// Threshold below which a CBF margin counts as violated.
pub const MARGIN_TOL: f64 = 1e-8;
/// Relative slack below `−ε` tolerated before a layer exit counts as a
/// regression; the held input biases the floor by O(dt).
pub const LAYER_EXIT_TOL: f64 = 1e-4;
const MAX_STORED_EVENTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum Plant<T> {
    Ceres(CeresModel<T>),
    Hcw(HcwModel<T>),
    Axis(DoubleIntegrator<T>),
}

impl<T: Scalar> Plant<T> {
    pub fn model(&self) -> &dyn ControlAffine<T> {
        match self {
            Plant::Ceres(m) => m,
            Plant::Hcw(m) => m,
            Plant::Axis(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControlLaw<T> {
    /// Equality tracking of `H₁` along `∇H₁·g` (the landing law).
    LineMax { spec: BarrierSpec<T> },
    /// Nominal input projected onto the docking rows.
    Docking { config: DockingControllerConfig<T>, specs: DockingSpecs<T> },
}

impl<T: Scalar> ControlLaw<T> {
    pub fn h1(&self) -> &BarrierSpec<T> {
        match self {
            ControlLaw::LineMax { spec } => spec,
            ControlLaw::Docking { specs, .. } => &specs.h1,
        }
    }
}

/// Everything needed for one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub id: String,
    pub plant: Plant<T>,
    pub law: ControlLaw<T>,
    pub policy: DisturbancePolicy<T>,
    pub x0: Vec<T>,
    pub t0: T,
    pub dt: T,
    pub timeout: T,
    /// Keep every `log_stride`-th step in the log; monitors still see every step.
    pub log_stride: usize,
    pub config_hash: String,
}

impl<T: Scalar> Scenario<T> {
    pub fn with_policy(&self, policy: DisturbancePolicy<T>) -> Self {
        Self { policy, ..self.clone() }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.policy {
            DisturbancePolicy::SeededRandom { seed, .. } => Some(seed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub t: T,
    pub x: Vec<T>,
    pub u: Vec<T>,
    pub w_u: Vec<T>,
    pub w_x: Vec<T>,
    pub h: T,
    pub h_dot: T,
    pub h_dot_w: T,
    pub h1: T,
    pub h0_right: Option<T>,
    pub h0_left: Option<T>,
    pub h_v: Option<T>,
    pub w: T,
    /// `H₁` margin of the applied input.
    pub margin: T,
    pub membership: Membership<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogMeta {
    pub scenario: String,
    pub seed: Option<u64>,
    pub policy: String,
    pub dt: f64,
    pub log_stride: usize,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog<T> {
    pub meta: LogMeta,
    pub records: Vec<StepRecord<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimClass {
    Landing,
    Docking,
    UnsafeContact,
    Timeout,
    SafetyViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "source")]
pub enum ViolationKind {
    /// A monitored barrier exceeded the safety tolerance.
    Barrier(RowSource),
    /// The applied `H₁` margin fell below `−1e−8`.
    NegativeMargin,
    /// An input left the box.
    InputBound,
    /// A docking row was dropped to restore QP feasibility.
    Relaxed(RowSource),
    /// The landing law had no admissible scaling.
    LineInfeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationEvent<T> {
    pub t: T,
    #[serde(flatten)]
    pub kind: ViolationKind,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimOutcome<T> {
    pub classification: SimClass,
    /// Contact class of the terminal state, when contact occurred.
    pub contact: Option<ContactClass>,
    /// Contact time, or the final time on timeout.
    pub t_f: T,
    pub steps: u64,
    pub terminal_state: Vec<T>,
    /// Undisturbed `ḣ` at the terminal state.
    pub terminal_h_dot: T,
    /// `ḣ` including the realized unmatched disturbance.
    pub terminal_h_dot_disturbed: T,
    pub peak_h1: T,
    pub peak_h0_right: Option<T>,
    /// Peak of `H₀,l` after its row first became active.
    pub peak_h0_left: Option<T>,
    pub peak_velocity: Option<T>,
    pub peak_u_inf: T,
    pub min_margin: T,
    /// Smallest slack over all enforced docking rows.
    pub min_row_slack: Option<T>,
    pub w_min: T,
    pub w_max: T,
    pub layer_width: T,
    /// First time `H₁ ≥ −1.05·α_w⁻¹(2)`.
    pub layer_entry_time: Option<T>,
    pub min_h1_after_entry: Option<T>,
    /// Steps below `−ε(1 + LAYER_EXIT_TOL)` after a `BoundaryLayer` report.
    pub membership_regressions: u64,
    pub latch_time: Option<T>,
    pub violation_count: usize,
    pub violations: Vec<ViolationEvent<T>>,
}

impl<T: Scalar> SimOutcome<T> {
    /// Reached the contact class the scenario aims for, with no violation events.
    pub fn is_success(&self, objective: ContactObjective) -> bool {
        let wanted = match objective {
            ContactObjective::Landing => SimClass::Landing,
            ContactObjective::Docking => SimClass::Docking,
        };
        self.classification == wanted && self.violation_count == 0
    }
}

struct Monitor<T> {
    outcome: SimOutcome<T>,
    seen_layer: bool,
    warned_small_w: bool,
}

impl<T: Scalar> Monitor<T> {
    fn event(&mut self, t: T, kind: ViolationKind, value: T) {
        self.outcome.violation_count += 1;
        if self.outcome.violations.len() < MAX_STORED_EVENTS {
            self.outcome.violations.push(ViolationEvent { t, kind, value });
        }
    }

    fn barrier(&mut self, t: T, source: RowSource, value: T) {
        if value > T::lit(SAFETY_TOL) {
            self.event(t, ViolationKind::Barrier(source), value);
        }
    }
}

fn peak<T: Scalar>(slot: &mut Option<T>, v: T) {
    *slot = Some(slot.map_or(v, |p| p.max(v)));
}

/// Control decision at one step.
struct Decision<T> {
    u: Vec<T>,
    binding: Option<LineBinding>,
    relaxed: Vec<RowSource>,
    row_slack: Option<T>,
    h0_right: Option<T>,
    h0_left: Option<T>,
    h_v: Option<T>,
}

fn decide<T: Scalar>(law: &ControlLaw<T>, model: &dyn ControlAffine<T>, t: T, x: &[T], latch: &mut bool) -> Result<Decision<T>> {
    match law {
        ControlLaw::LineMax { spec } => {
            let step = landing_control(spec, model, t, x)?;
            Ok(Decision {
                u: step.u,
                binding: Some(step.binding),
                relaxed: Vec::new(),
                row_slack: None,
                h0_right: None,
                h0_left: None,
                h_v: None,
            })
        }
        ControlLaw::Docking { config, specs } => {
            let step = docking_control(config, specs, model, t, x, latch)?;
            let slack = step.rows.iter().map(|r| r.slack(&step.u)).fold(T::infinity(), T::min);
            let value = |s: RowSource| step.rows.iter().find(|r| r.source == s).map(|r| r.value);
            let h_v = match value(RowSource::Velocity) {
                Some(v) => Some(v),
                None => Some(specs.velocity.jet(model, t, x)?.value),
            };
            Ok(Decision {
                h0_right: value(RowSource::H0Right),
                h0_left: if *latch { Some(step.h0_left) } else { None },
                h_v,
                u: step.u,
                binding: None,
                relaxed: step.relaxed,
                row_slack: Some(slack),
            })
        }
    }
}

/// Runs one closed-loop simulation until contact or timeout.
pub fn run_scenario<T: Scalar>(scenario: &Scenario<T>) -> Result<(TrajectoryLog<T>, SimOutcome<T>)> {
    if !(scenario.dt > T::zero() && scenario.dt.is_finite()) {
        return Err(Error::param("dt", "must be positive and finite"));
    }
    if !(scenario.timeout > T::zero()) {
        return Err(Error::param("timeout", "must be positive"));
    }
    let model = scenario.plant.model();
    if scenario.x0.len() != model.state_dim() {
        return Err(Error::param("x0", format!("expected {} components", model.state_dim())));
    }
    let h1 = scenario.law.h1();
    let eps = h1.layer_width();
    let input_bound = model.input_bound();
    let mut generator = DisturbanceGenerator::new(scenario.policy.clone())?;
    let stride = scenario.log_stride.max(1);

    let meta = LogMeta {
        scenario: scenario.id.clone(),
        seed: scenario.seed(),
        policy: scenario.policy.name().to_string(),
        dt: scenario.dt.to_f64_lossy(),
        log_stride: stride,
        config_hash: scenario.config_hash.clone(),
    };
    let mut log = TrajectoryLog { meta, records: Vec::new() };
    let mut mon = Monitor {
        outcome: SimOutcome {
            classification: SimClass::Timeout,
            contact: None,
            t_f: scenario.t0,
            steps: 0,
            terminal_state: scenario.x0.clone(),
            terminal_h_dot: T::zero(),
            terminal_h_dot_disturbed: T::zero(),
            peak_h1: T::neg_infinity(),
            peak_h0_right: None,
            peak_h0_left: None,
            peak_velocity: None,
            peak_u_inf: T::zero(),
            min_margin: T::infinity(),
            min_row_slack: None,
            w_min: T::infinity(),
            w_max: T::zero(),
            layer_width: eps,
            layer_entry_time: None,
            min_h1_after_entry: None,
            membership_regressions: 0,
            latch_time: None,
            violation_count: 0,
            violations: Vec::new(),
        },
        seen_layer: false,
        warned_small_w: false,
    };

    let output = h1.output();
    let mut latch = false;
    let mut x = scenario.x0.clone();
    let mut k: u64 = 0;
    loop {
        let t = scenario.t0 + T::lit(k as f64) * scenario.dt;
        let decision = decide(&scenario.law, model, t, &x, &mut latch)?;
        if latch && mon.outcome.latch_time.is_none() {
            mon.outcome.latch_time = Some(t);
        }
        let w = generator.sample(h1, model, t, &x)?;
        let held = HeldInput { u: decision.u.clone(), w };
        let record = observe(h1, model, t, &x, &held, &decision, eps)?;
        monitor_step(&mut mon, &record, &decision, input_bound, eps, t);
        if k % stride as u64 == 0 {
            log.records.push(record);
        }

        let dt = scenario.dt;
        let next = integrate_step(model, t, &x, &held, dt);
        if !is_finite(&next) {
            return Err(Error::NonFiniteState { t: (t + dt).to_f64_lossy() });
        }
        let h_next = output.value(t + dt, &next)?;
        let tol = h1.contact_tolerance();
        if h_next >= -tol {
            let (t_f, x_f) = if h_next.abs() <= tol {
                (t + dt, next)
            } else {
                detect_contact(model, output, t, &x, &held, dt, tol)?
            };
            // the input logged at contact is what the controller would command there
            let decision = decide(&scenario.law, model, t_f, &x_f, &mut latch)?;
            let held = HeldInput { u: decision.u.clone(), w: held.w };
            let terminal = observe(h1, model, t_f, &x_f, &held, &decision, eps)?;
            monitor_step(&mut mon, &terminal, &decision, input_bound, eps, t_f);
            let class = h1.classify_contact(t_f, &x_f, terminal.h_dot)?;
            let jet = output.jet(t_f, &x_f)?;
            mon.outcome.contact = Some(class);
            mon.outcome.terminal_h_dot = terminal.h_dot;
            mon.outcome.terminal_h_dot_disturbed = terminal.h_dot + dot(&jet.grad, &held.w.w_x);
            mon.outcome.classification = match class {
                ContactClass::Landing => SimClass::Landing,
                ContactClass::Docking => SimClass::Docking,
                ContactClass::UnsafeContact | ContactClass::NoContact => SimClass::UnsafeContact,
            };
            mon.outcome.t_f = t_f;
            mon.outcome.terminal_state = x_f;
            mon.outcome.steps = k + 1;
            log.records.push(terminal);
            break;
        }
        x = next;
        k += 1;
        if T::lit(k as f64) * scenario.dt >= scenario.timeout {
            let t_end = scenario.t0 + T::lit(k as f64) * scenario.dt;
            let decision = decide(&scenario.law, model, t_end, &x, &mut latch)?;
            let held = HeldInput { u: decision.u.clone(), w: generator.sample(h1, model, t_end, &x)? };
            let terminal = observe(h1, model, t_end, &x, &held, &decision, eps)?;
            monitor_step(&mut mon, &terminal, &decision, input_bound, eps, t_end);
            mon.outcome.terminal_h_dot = terminal.h_dot;
            mon.outcome.terminal_h_dot_disturbed = terminal.h_dot;
            mon.outcome.t_f = t_end;
            mon.outcome.terminal_state = x.clone();
            mon.outcome.steps = k;
            log.records.push(terminal);
            break;
        }
    }
    if mon.outcome.violations.iter().any(|e| matches!(e.kind, ViolationKind::Barrier(_))) {
        mon.outcome.classification = SimClass::SafetyViolation;
    }
    Ok((log, mon.outcome))
}

fn observe<T: Scalar>(
    h1: &BarrierSpec<T>,
    model: &dyn ControlAffine<T>,
    t: T,
    x: &[T],
    held: &HeldInput<T>,
    decision: &Decision<T>,
    eps: T,
) -> Result<StepRecord<T>> {
    let eval = h1.evaluate(model, t, x)?;
    let jet = eval.jet();
    let w = eval_w(&jet, model, t, x);
    let margin = margin_from_jet(&jet, h1.class_k(), model, t, x, &held.u);
    let membership = h1.classify_membership(eval.h, eval.value, eps)?;
    Ok(StepRecord {
        t,
        x: x.to_vec(),
        u: held.u.clone(),
        w_u: held.w.w_u.clone(),
        w_x: held.w.w_x.clone(),
        h: eval.h,
        h_dot: eval.h_dot,
        h_dot_w: eval.h_dot_w,
        h1: eval.value,
        h0_right: decision.h0_right,
        h0_left: decision.h0_left,
        h_v: decision.h_v,
        w,
        margin,
        membership,
    })
}

fn monitor_step<T: Scalar>(
    mon: &mut Monitor<T>,
    r: &StepRecord<T>,
    d: &Decision<T>,
    input_bound: T,
    eps: T,
    t: T,
) {
    let o = &mut mon.outcome;
    o.peak_h1 = o.peak_h1.max(r.h1);
    if let Some(v) = r.h0_right {
        peak(&mut o.peak_h0_right, v);
    }
    if let Some(v) = r.h0_left {
        peak(&mut o.peak_h0_left, v);
    }
    if let Some(v) = r.h_v {
        peak(&mut o.peak_velocity, v);
    }
    let u_inf = norm_inf(&r.u);
    o.peak_u_inf = o.peak_u_inf.max(u_inf);
    o.min_margin = o.min_margin.min(r.margin);
    if let Some(s) = d.row_slack {
        o.min_row_slack = Some(o.min_row_slack.map_or(s, |p| p.min(s)));
    }
    o.w_min = o.w_min.min(r.w);
    o.w_max = o.w_max.max(r.w);

    let entry = -eps * T::lit(1.05);
    if o.layer_entry_time.is_none() && r.h1 >= entry {
        o.layer_entry_time = Some(t);
    }
    if o.layer_entry_time.is_some() {
        o.min_h1_after_entry = Some(o.min_h1_after_entry.map_or(r.h1, |p| p.min(r.h1)));
    }
    match r.membership {
        Membership::BoundaryLayer(_) => mon.seen_layer = true,
        Membership::Interior if mon.seen_layer && r.h1 < -eps * T::lit(1.0 + LAYER_EXIT_TOL) => {
            o.membership_regressions += 1
        }
        _ => {}
    }

    if r.w < T::lit(1e-9) && !mon.warned_small_w {
        mon.warned_small_w = true;
        log::warn!("W = {:e} below 1e-9 at t = {}", r.w.to_f64_lossy(), t);
    }

    mon.barrier(t, RowSource::H1, r.h1);
    if let Some(v) = r.h0_right {
        mon.barrier(t, RowSource::H0Right, v);
    }
    if let Some(v) = r.h0_left {
        mon.barrier(t, RowSource::H0Left, v);
    }
    if let Some(v) = r.h_v {
        mon.barrier(t, RowSource::Velocity, v);
    }
    if r.margin < -T::lit(MARGIN_TOL) {
        mon.event(t, ViolationKind::NegativeMargin, r.margin);
    }
    if u_inf > input_bound {
        mon.event(t, ViolationKind::InputBound, u_inf);
    }
    for &s in &d.relaxed {
        mon.event(t, ViolationKind::Relaxed(s), T::zero());
    }
    if d.binding == Some(LineBinding::Infeasible) {
        mon.event(t, ViolationKind::LineInfeasible, r.margin);
    }
}
