//! Closed-loop control laws assembled from robust CBF rows.

use crate::barrier::{eval_w, BarrierSpec, SafetyFunction};
use crate::dynamics::{ControlAffine, VelocityLimit};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::qp::{solve_line_max, solve_min_norm, LineBinding, QpProblem};
use crate::scalar::Scalar;

/// Which barrier a CBF row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSource {
    H1,
    H0Right,
    H0Left,
    Velocity,
}

impl RowSource {
    pub fn name(self) -> &'static str {
        match self {
            RowSource::H1 => "H1",
            RowSource::H0Right => "H0r",
            RowSource::H0Left => "H0l",
            RowSource::Velocity => "Hv",
        }
    }
}

/// The robust CBF condition as a halfspace `a·u ≤ b` in input space.
#[derive(Debug, Clone, PartialEq)]
pub struct CbfRow<T> {
    /// `∇H·g`
    pub a: Vec<T>,
    /// `α(−H)·W − W − ∂_t H − ∇H·f`
    pub b: T,
    pub source: RowSource,
    /// `H` at the evaluation point.
    pub value: T,
    pub w: T,
}

impl<T: Scalar> CbfRow<T> {
    pub fn build(
        barrier: &dyn SafetyFunction<T>,
        source: RowSource,
        model: &dyn ControlAffine<T>,
        t: T,
        x: &[T],
    ) -> Result<Self> {
        let jet = barrier.jet(model, t, x)?;
        let w = eval_w(&jet, model, t, x);
        let a = model.input_matrix(t, x).left_mul(&jet.grad);
        let drift = dot(&jet.grad, &model.drift(t, x));
        let b = barrier.class_k().eval(-jet.value) * w - w - jet.dt - drift;
        Ok(Self { a, b, source, value: jet.value, w })
    }

    /// `b − a·u`, equal to the CBF margin of `u`.
    pub fn slack(&self, u: &[T]) -> T {
        self.b - dot(&self.a, u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandingStep<T> {
    pub u: Vec<T>,
    pub binding: LineBinding,
}

/// Pushes along `∇H·g` as far as the CBF row and the input box allow, so the
/// condition holds with equality unless the box saturates first.
pub fn landing_control<T: Scalar>(
    spec: &BarrierSpec<T>,
    model: &dyn ControlAffine<T>,
    t: T,
    x: &[T],
) -> Result<LandingStep<T>> {
    let row = CbfRow::build(spec, RowSource::H1, model, t, x)?;
    let line = solve_line_max(&row.a, model.input_bound(), row.b)?;
    Ok(LandingStep { u: line.u, binding: line.binding })
}

/// Gains and potentials of the docking law.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DockingControllerConfig<T> {
    /// Class-K gain on `H₁`.
    pub k1: T,
    /// Class-K gain on `H₀,r` and `H₀,l`.
    pub k0: T,
    /// Class-K gain on the velocity limit.
    pub kv: T,
    /// Proportional lateral gain in the nominal input.
    pub kp: T,
    /// Slope magnitude of the `H₁` potential.
    pub u1: T,
    /// Slope magnitude of the lateral potentials.
    pub u0: T,
}

impl<T: Scalar> DockingControllerConfig<T> {
    pub fn reference() -> Self {
        Self {
            k1: T::lit(25.0),
            k0: T::lit(200.0),
            kv: T::lit(20.0),
            kp: T::lit(0.1),
            u1: T::lit(0.057),
            u0: T::lit(0.021),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("k1", self.k1),
            ("k0", self.k0),
            ("kv", self.kv),
            ("kp", self.kp),
            ("u1", self.u1),
            ("u0", self.u0),
        ];
        for (name, v) in fields {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// The four barriers used by the docking law.
#[derive(Debug, Clone, PartialEq)]
pub struct DockingSpecs<T> {
    pub h1: BarrierSpec<T>,
    pub h0_right: BarrierSpec<T>,
    pub h0_left: BarrierSpec<T>,
    pub velocity: VelocityLimit<T>,
}

/// Minimum-norm input achieving the `H₁` condition with equality, plus
/// `−k_p·x₁` on the lateral axis.
///
/// A degenerate `∇H₁·g` signals [`Error::DegenerateDirection`].
pub fn nominal_docking_control<T: Scalar>(
    spec: &BarrierSpec<T>,
    model: &dyn ControlAffine<T>,
    t: T,
    x: &[T],
    kp: T,
) -> Result<Vec<T>> {
    let row = CbfRow::build(spec, RowSource::H1, model, t, x)?;
    let mut u = equality_term(&row)?;
    u[0] = u[0] - kp * x[0];
    Ok(u)
}

fn equality_term<T: Scalar>(row: &CbfRow<T>) -> Result<Vec<T>> {
    let nn = dot(&row.a, &row.a);
    if !(nn.sqrt() > T::lit(1e-9)) {
        return Err(Error::DegenerateDirection(nn.sqrt().to_f64_lossy()));
    }
    Ok(row.a.iter().map(|&ai| row.b * ai / nn).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DockingStep<T> {
    pub u: Vec<T>,
    pub u_nominal: Vec<T>,
    /// Rows enforced by the returned input.
    pub rows: Vec<CbfRow<T>>,
    /// Rows dropped to restore feasibility, in drop order.
    pub relaxed: Vec<RowSource>,
    /// Set when `∇H₁·g` vanished and the equality term was replaced by zero.
    pub degenerate_nominal: bool,
    /// Value of `H₀,l` whether or not its row is active.
    pub h0_left: T,
}

/// Projects the nominal docking input onto the CBF rows and the box.
///
/// `H₁`, `H₀,r` and `H_v` are always enforced; `H₀,l` joins once it has been
/// observed nonpositive, after which `latch` stays set. On infeasibility the
/// rows are dropped in the order `H_v`, `H₀,l`; `H₁` is never dropped.
pub fn docking_control<T: Scalar>(
    config: &DockingControllerConfig<T>,
    specs: &DockingSpecs<T>,
    model: &dyn ControlAffine<T>,
    t: T,
    x: &[T],
    latch: &mut bool,
) -> Result<DockingStep<T>> {
    let h1 = CbfRow::build(&specs.h1, RowSource::H1, model, t, x)?;
    let (mut u_nominal, degenerate_nominal) = match equality_term(&h1) {
        Ok(u) => (u, false),
        Err(Error::DegenerateDirection(v)) => {
            log::warn!("degenerate H1 direction ({v:e}) at t = {t}; nominal equality term set to zero");
            (vec![T::zero(); model.input_dim()], true)
        }
        Err(e) => return Err(e),
    };
    u_nominal[0] = u_nominal[0] - config.kp * x[0];

    let right = CbfRow::build(&specs.h0_right, RowSource::H0Right, model, t, x)?;
    let velocity = CbfRow::build(&specs.velocity, RowSource::Velocity, model, t, x)?;
    let left = CbfRow::build(&specs.h0_left, RowSource::H0Left, model, t, x)?;
    if left.value <= T::zero() {
        *latch = true;
    }
    let h0_left = left.value;

    let mut rows = vec![h1, right, velocity];
    if *latch {
        rows.push(left);
    }
    let mut relaxed = Vec::new();
    loop {
        let mut problem = QpProblem::new(u_nominal.clone(), model.input_bound());
        for r in &rows {
            problem = problem.with_halfspace(r.a.clone(), r.b);
        }
        match solve_min_norm(&problem) {
            Ok(sol) => {
                return Ok(DockingStep { u: sol.u, u_nominal, rows, relaxed, degenerate_nominal, h0_left });
            }
            Err(Error::QpInfeasible { violated, max_violation }) => {
                let drop = [RowSource::Velocity, RowSource::H0Left]
                    .into_iter()
                    .find(|s| rows.iter().any(|r| r.source == *s));
                match drop {
                    Some(source) => {
                        log::warn!("docking QP infeasible at t = {t} (rows {violated:?}); dropping {}", source.name());
                        rows.retain(|r| r.source != source);
                        relaxed.push(source);
                    }
                    None => return Err(Error::QpInfeasible { violated, max_violation }),
                }
            }
            Err(e) => return Err(e),
        }
    }
}
