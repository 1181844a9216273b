//! Control-affine models `ẋ = f(t,x) + g(t,x)(u + w_u) + w_x`, the scalar
//! constraint outputs built on top of them, and disturbance realizations.

mod axis;
mod ceres;
mod disturbance;
mod hcw;
mod output;

pub use axis::DoubleIntegrator;
pub use ceres::CeresModel;
pub use disturbance::{DisturbanceGenerator, DisturbancePolicy, DisturbanceSample};
pub use hcw::{hcw_h_family, velocity_constraint, HcwFamily, HcwModel, VelocityLimit};
pub use output::{OutputJet, OutputMap};

use crate::barrier::DisturbanceBounds;
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// A system of the form `ẋ = f(t,x) + g(t,x)(u + w_u) + w_x` with a box
/// input set `‖u‖∞ ≤ ū`.
///
/// `w_x` only enters the state components flagged in [`unmatched_mask`].
///
/// [`unmatched_mask`]: ControlAffine::unmatched_mask
pub trait ControlAffine<T: Scalar>: Send + Sync {
    fn state_dim(&self) -> usize;

    fn input_dim(&self) -> usize;

    /// Drift `f(t,x)`.
    fn drift(&self, t: T, x: &[T]) -> Vec<T>;

    /// Jacobian `∂f/∂x`, row-major `n×n`.
    fn drift_jacobian(&self, t: T, x: &[T]) -> Mat<T>;

    /// `∂f/∂t`; zero for autonomous models.
    fn drift_time_partial(&self, _t: T, _x: &[T]) -> Vec<T> {
        vec![T::zero(); self.state_dim()]
    }

    /// Input matrix `g(t,x)`, `n×m`.
    fn input_matrix(&self, t: T, x: &[T]) -> Mat<T>;

    /// `ū`, the ∞-norm bound on admissible inputs.
    fn input_bound(&self) -> T;

    fn bounds(&self) -> DisturbanceBounds<T>;

    /// Which state rows the unmatched disturbance `w_x` acts on.
    fn unmatched_mask(&self) -> &[bool];

    /// Full right-hand side with the input and disturbances applied.
    fn rate(&self, t: T, x: &[T], u: &[T], w_u: &[T], w_x: &[T]) -> Vec<T> {
        let mut dx = self.drift(t, x);
        let g = self.input_matrix(t, x);
        let total: Vec<T> = u.iter().zip(w_u).map(|(&a, &b)| a + b).collect();
        for (d, (gu, &wx)) in dx.iter_mut().zip(g.mul_vec(&total).into_iter().zip(w_x)) {
            *d = *d + gu + wx;
        }
        dx
    }
}

/// Zeroes the components of `v` that `w_x` does not act on.
pub fn mask_unmatched<T: Scalar>(mask: &[bool], v: &[T]) -> Vec<T> {
    v.iter().zip(mask).map(|(&x, &m)| if m { x } else { T::zero() }).collect()
}

/// Block input matrix `[0; I]` shared by the built-in second-order models.
pub(crate) fn stacked_identity<T: Scalar>(config_dim: usize) -> Mat<T> {
    let mut g = Mat::zeros(2 * config_dim, config_dim);
    for i in 0..config_dim {
        g.set(config_dim + i, i, T::one());
    }
    g
}
