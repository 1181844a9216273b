use super::{stacked_identity, ControlAffine, OutputMap};
use crate::barrier::DisturbanceBounds;
use crate::linalg::Mat;
use crate::scalar::Scalar;

const MASK: [bool; 2] = [true, false];

/// Motion along a single axis, state `(p, ṗ)`: the docking scenario
/// restricted to its approach axis, used for phase portraits.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleIntegrator<T> {
    pub input_bound: T,
    pub bounds: DisturbanceBounds<T>,
}

impl<T: Scalar> DoubleIntegrator<T> {
    pub fn new(input_bound: T, bounds: DisturbanceBounds<T>) -> Self {
        Self { input_bound, bounds }
    }

    /// `h = p`
    pub fn position_output(&self) -> OutputMap<T> {
        OutputMap::linear(vec![T::one(), T::zero()], T::zero())
    }
}

impl<T: Scalar> ControlAffine<T> for DoubleIntegrator<T> {
    fn state_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn drift(&self, _t: T, x: &[T]) -> Vec<T> {
        vec![x[1], T::zero()]
    }

    fn drift_jacobian(&self, _t: T, _x: &[T]) -> Mat<T> {
        Mat::from_rows(&[&[T::zero(), T::one()], &[T::zero(), T::zero()]])
    }

    fn input_matrix(&self, _t: T, _x: &[T]) -> Mat<T> {
        stacked_identity(1)
    }

    fn input_bound(&self) -> T {
        self.input_bound
    }

    fn bounds(&self) -> DisturbanceBounds<T> {
        self.bounds
    }

    fn unmatched_mask(&self) -> &[bool] {
        &MASK
    }
}
