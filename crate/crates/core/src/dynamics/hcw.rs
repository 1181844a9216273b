use super::{stacked_identity, ControlAffine, OutputMap};
use crate::barrier::{BarrierJet, ClassK, DisturbanceBounds, SafetyFunction};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

const MASK: [bool; 4] = [true, true, false, false];

/// Hill–Clohessy–Wiltshire relative motion in the orbital plane, state
/// `(x₁, x₂, ẋ₁, ẋ₂)` with `x₂` along the docking axis.
#[derive(Debug, Clone, PartialEq)]
pub struct HcwModel<T> {
    /// Mean motion of the target orbit, rad/s.
    pub mean_motion: T,
    pub input_bound: T,
    pub bounds: DisturbanceBounds<T>,
    /// Lateral docking tolerance Δ, m.
    pub lateral_tolerance: T,
    /// Speed limit on each velocity component, m/s.
    pub max_speed: T,
}

impl<T: Scalar> HcwModel<T> {
    pub fn new(
        mean_motion: T,
        input_bound: T,
        bounds: DisturbanceBounds<T>,
        lateral_tolerance: T,
        max_speed: T,
    ) -> Result<Self> {
        if !(mean_motion >= T::zero() && mean_motion.is_finite()) {
            return Err(Error::param("mean_motion", "must be nonnegative and finite"));
        }
        if !(input_bound > T::zero() && input_bound.is_finite()) {
            return Err(Error::param("input_bound", "must be positive and finite"));
        }
        if !(lateral_tolerance > T::zero()) {
            return Err(Error::param("lateral_tolerance", "must be positive"));
        }
        if !(max_speed > T::zero()) {
            return Err(Error::param("max_speed", "must be positive"));
        }
        Ok(Self { mean_motion, input_bound, bounds, lateral_tolerance, max_speed })
    }

    /// 400 km circular LEO target with the reference thrust and disturbance levels.
    pub fn reference() -> Self {
        Self {
            mean_motion: T::lit(0.00113),
            input_bound: T::lit(0.082),
            bounds: DisturbanceBounds::new(T::lit(0.002), T::lit(0.001)).expect("valid bounds"),
            lateral_tolerance: T::lit(0.03),
            max_speed: T::lit(10.0),
        }
    }

    fn system_matrix(&self) -> Mat<T> {
        let n = self.mean_motion;
        let (z, one) = (T::zero(), T::one());
        let two_n = T::lit(2.0) * n;
        Mat::from_rows(&[
            &[z, z, one, z],
            &[z, z, z, one],
            &[T::lit(3.0) * n * n, z, z, two_n],
            &[z, z, -two_n, z],
        ])
    }

    pub fn family(&self) -> HcwFamily<T> {
        hcw_h_family(self.lateral_tolerance)
    }
}

impl<T: Scalar> ControlAffine<T> for HcwModel<T> {
    fn state_dim(&self) -> usize {
        4
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn drift(&self, _t: T, x: &[T]) -> Vec<T> {
        self.system_matrix().mul_vec(x)
    }

    fn drift_jacobian(&self, _t: T, _x: &[T]) -> Mat<T> {
        self.system_matrix()
    }

    fn input_matrix(&self, _t: T, _x: &[T]) -> Mat<T> {
        stacked_identity(2)
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

/// The three docking outputs: distance along the axis and the two lateral
/// bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct HcwFamily<T> {
    /// `h = x₂`
    pub axial: OutputMap<T>,
    /// `h_r = x₁ − Δ`
    pub right: OutputMap<T>,
    /// `h_l = −x₂ − Δ`
    pub left: OutputMap<T>,
}

pub fn hcw_h_family<T: Scalar>(lateral_tolerance: T) -> HcwFamily<T> {
    let (z, one) = (T::zero(), T::one());
    HcwFamily {
        axial: OutputMap::linear(vec![z, one, z, z], z),
        right: OutputMap::linear(vec![one, z, z, z], -lateral_tolerance),
        left: OutputMap::linear(vec![z, -one, z, z], -lateral_tolerance),
    }
}

/// `‖(ẋ₁, ẋ₂)‖∞ − v_max` and a subgradient.
///
/// At ties the first maximizing component is selected, and a zero velocity
/// component counts as positive.
pub fn velocity_constraint<T: Scalar>(max_speed: T, x: &[T]) -> (T, Vec<T>) {
    let idx = if x[3].abs() > x[2].abs() { 3 } else { 2 };
    let mut grad = vec![T::zero(); 4];
    grad[idx] = if x[idx] < T::zero() { -T::one() } else { T::one() };
    (x[idx].abs() - max_speed, grad)
}

/// Velocity limit used directly as a relative-degree-one barrier.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityLimit<T> {
    pub max_speed: T,
    pub alpha: ClassK<T>,
}

impl<T: Scalar> SafetyFunction<T> for VelocityLimit<T> {
    fn jet(&self, _model: &dyn ControlAffine<T>, _t: T, x: &[T]) -> Result<BarrierJet<T>> {
        let (value, grad) = velocity_constraint(self.max_speed, x);
        Ok(BarrierJet { value, grad, dt: T::zero() })
    }

    fn class_k(&self) -> &ClassK<T> {
        &self.alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_examples() {
        let fam = hcw_h_family(0.03_f64);
        let x = [0.0, -10.0, 0.0, 0.0];
        assert_eq!(fam.axial.value(0.0, &x).unwrap(), -10.0);
        assert!((fam.right.value(0.0, &x).unwrap() + 0.03).abs() < 1e-15);
        assert!((fam.left.value(0.0, &x).unwrap() - 9.97).abs() < 1e-12);
        assert_eq!(fam.right.value(0.0, &[0.03, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(fam.axial.jet(0.0, &x).unwrap().grad, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(fam.right.jet(0.0, &x).unwrap().grad, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(fam.left.jet(0.0, &x).unwrap().grad, vec![0.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn velocity_constraint_examples() {
        assert_eq!(velocity_constraint(10.0, &[0.0, 0.0, 0.0, 0.0]).0, -10.0);
        assert_eq!(velocity_constraint(10.0, &[0.0, 0.0, 3.0, -10.0]).0, 0.0);
        assert_eq!(velocity_constraint(10.0, &[0.0, 0.0, 3.0, -10.0]).1, vec![0.0, 0.0, 0.0, -1.0]);
        assert_eq!(velocity_constraint(10.0, &[0.0, 0.0, 11.0, 0.0]).0, 1.0);
        // tie selects the first component
        assert_eq!(velocity_constraint(10.0, &[0.0, 0.0, -4.0, 4.0]).1, vec![0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn drift_matches_coupling_terms() {
        let m = HcwModel::<f64>::reference();
        let n = 0.00113;
        let f = m.drift(0.0, &[2.0, -5.0, 0.3, 0.7]);
        assert_eq!(f[0], 0.3);
        assert_eq!(f[1], 0.7);
        assert!((f[2] - (3.0 * n * n * 2.0 + 2.0 * n * 0.7)).abs() < 1e-15);
        assert!((f[3] - (-2.0 * n * 0.3)).abs() < 1e-15);
    }
}
