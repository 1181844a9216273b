//! Robust control barrier function mathematics.
//!
//! A constraint output `h` of relative degree two is lifted through a
//! potential `Φ` into
//!
//! ```text
//! H(t,x) = Φ⁻¹( Φ(h) − ½·ḣ_w|ḣ_w| + δ )
//! ```
//!
//! where `ḣ_w` is `ḣ` under the worst unmatched disturbance. With `δ = 0`
//! this is the plain lift `H₀`; with `δ = ½γ₂²` it is `H₁`, whose zero
//! sublevel set contains contact states with approach speed up to `γ₂`.
//! A control `u` keeps `{H ≤ 0}` invariant under any admissible disturbance
//! when
//!
//! ```text
//! ∂_t H + ∇H·(f + g·u) ≤ α(−H)·W − W,   W = ‖∇H·g‖·w_u,max + ‖∇H·P‖·w_x,max
//! ```

mod class_k;
mod potential;
mod spec;

pub use class_k::ClassK;
pub use potential::Potential;
pub use spec::{BarrierSpec, ContactClass, ContactObjective, ContactTolerances, Lift, LiftEval, Membership};

use rand::Rng;

use crate::dynamics::{mask_unmatched, ControlAffine, OutputMap};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::scalar::Scalar;

/// Norm bounds on the matched (`w_u`) and unmatched (`w_x`) disturbances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceBounds<T> {
    pub w_u_max: T,
    pub w_x_max: T,
}

impl<T: Scalar> DisturbanceBounds<T> {
    pub fn new(w_u_max: T, w_x_max: T) -> Result<Self> {
        if !(w_u_max >= T::zero() && w_u_max.is_finite()) {
            return Err(Error::param("w_u_max", "must be nonnegative and finite"));
        }
        if !(w_x_max >= T::zero() && w_x_max.is_finite()) {
            return Err(Error::param("w_x_max", "must be nonnegative and finite"));
        }
        Ok(Self { w_u_max, w_x_max })
    }

    pub fn none() -> Self {
        Self { w_u_max: T::zero(), w_x_max: T::zero() }
    }
}

/// Value, state gradient and time partial of a barrier at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierJet<T> {
    pub value: T,
    pub grad: Vec<T>,
    pub dt: T,
}

/// Anything that can be used as a robust CBF row: a differentiable `H` and
/// the class-K function applied to `−H`.
pub trait SafetyFunction<T: Scalar>: Send + Sync {
    fn jet(&self, model: &dyn ControlAffine<T>, t: T, x: &[T]) -> Result<BarrierJet<T>>;

    fn class_k(&self) -> &ClassK<T>;
}

/// Largest contribution the disturbances can make to `Ḣ`:
/// `W = ‖∇H·g‖·w_u,max + ‖∇H·P‖·w_x,max`, where `P` keeps the state rows
/// `w_x` enters.
pub fn eval_w<T: Scalar>(jet: &BarrierJet<T>, model: &dyn ControlAffine<T>, t: T, x: &[T]) -> T {
    let bounds = model.bounds();
    let grad_g = model.input_matrix(t, x).left_mul(&jet.grad);
    let grad_x = mask_unmatched(model.unmatched_mask(), &jet.grad);
    norm(&grad_g) * bounds.w_u_max + norm(&grad_x) * bounds.w_x_max
}

/// `α(−H)·W − W − [∂_t H + ∇H·(f + g·u)]`; nonnegative iff `u` satisfies
/// the robust CBF condition.
pub fn margin_from_jet<T: Scalar>(
    jet: &BarrierJet<T>,
    alpha: &ClassK<T>,
    model: &dyn ControlAffine<T>,
    t: T,
    x: &[T],
    u: &[T],
) -> T {
    let w = eval_w(jet, model, t, x);
    let drift = model.drift(t, x);
    let gu = model.input_matrix(t, x).mul_vec(u);
    let xdot: Vec<T> = drift.iter().zip(&gu).map(|(&a, &b)| a + b).collect();
    alpha.eval(-jet.value) * w - w - (jet.dt + dot(&jet.grad, &xdot))
}

pub fn cbf_margin<T: Scalar>(
    barrier: &dyn SafetyFunction<T>,
    model: &dyn ControlAffine<T>,
    t: T,
    x: &[T],
    u: &[T],
) -> Result<T> {
    let jet = barrier.jet(model, t, x)?;
    Ok(margin_from_jet(&jet, barrier.class_k(), model, t, x, u))
}

/// Sampled estimate of the Lipschitz constant of `h` over a state box:
/// the largest `‖∇h‖` seen at `samples` uniform points.
pub fn estimate_lipschitz<T: Scalar, R: Rng>(
    output: &OutputMap<T>,
    t: T,
    lower: &[T],
    upper: &[T],
    samples: usize,
    rng: &mut R,
) -> Result<T> {
    let mut best = T::zero();
    for _ in 0..samples {
        let x: Vec<T> = lower
            .iter()
            .zip(upper)
            .map(|(&lo, &hi)| lo + (hi - lo) * T::lit(rng.random::<f64>()))
            .collect();
        if let Ok(jet) = output.jet(t, &x) {
            best = best.max(norm(&jet.grad));
        }
    }
    if best == T::zero() {
        return Err(Error::param("lipschitz", "no sample produced a nonzero gradient"));
    }
    Ok(best)
}
