use super::{stacked_identity, ControlAffine, OutputMap};
use crate::barrier::DisturbanceBounds;
use crate::error::{Error, Result};
use crate::linalg::{norm, Mat};
use crate::scalar::Scalar;

const MASK: [bool; 6] = [true, true, true, false, false, false];

/// Point-mass gravity about a non-rotating sphere, state `(r, v) ∈ ℝ⁶`,
/// thrust acceleration `u ∈ ℝ³`.
#[derive(Debug, Clone, PartialEq)]
pub struct CeresModel<T> {
    /// Gravitational parameter, m³/s².
    pub mu: T,
    /// Sphere radius, m.
    pub radius: T,
    pub input_bound: T,
    pub bounds: DisturbanceBounds<T>,
}

impl<T: Scalar> CeresModel<T> {
    pub fn new(mu: T, radius: T, input_bound: T, bounds: DisturbanceBounds<T>) -> Result<Self> {
        if !(mu > T::zero() && mu.is_finite()) {
            return Err(Error::param("mu", "must be positive and finite"));
        }
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::param("radius", "must be positive and finite"));
        }
        if !(input_bound > T::zero() && input_bound.is_finite()) {
            return Err(Error::param("input_bound", "must be positive and finite"));
        }
        Ok(Self { mu, radius, input_bound, bounds })
    }

    /// Ceres as a sphere with the reference thrust and disturbance levels.
    pub fn reference() -> Self {
        Self {
            mu: T::lit(6.26325e10),
            radius: T::lit(476_000.0),
            input_bound: T::lit(0.5),
            bounds: DisturbanceBounds::new(T::lit(0.025), T::lit(0.01)).expect("valid bounds"),
        }
    }

    /// `h = ρ − ‖r‖`, the altitude above the surface (negative in flight).
    pub fn altitude_output(&self) -> OutputMap<T> {
        OutputMap::Altitude { radius: self.radius }
    }

    /// `½‖v‖² − μ/‖r‖`
    pub fn specific_energy(&self, x: &[T]) -> T {
        let half = T::lit(0.5);
        half * (x[3] * x[3] + x[4] * x[4] + x[5] * x[5]) - self.mu / norm(&x[..3])
    }
}

impl<T: Scalar> ControlAffine<T> for CeresModel<T> {
    fn state_dim(&self) -> usize {
        6
    }

    fn input_dim(&self) -> usize {
        3
    }

    fn drift(&self, _t: T, x: &[T]) -> Vec<T> {
        let r = norm(&x[..3]);
        let k = -self.mu / (r * r * r);
        vec![x[3], x[4], x[5], k * x[0], k * x[1], k * x[2]]
    }

    fn drift_jacobian(&self, _t: T, x: &[T]) -> Mat<T> {
        let r = norm(&x[..3]);
        let r3 = r * r * r;
        let r5 = r3 * r * r;
        let three = T::lit(3.0);
        let mut jac = Mat::zeros(6, 6);
        for i in 0..3 {
            jac.set(i, 3 + i, T::one());
            for j in 0..3 {
                let eye = if i == j { T::one() } else { T::zero() };
                jac.set(3 + i, j, -self.mu * (eye / r3 - three * x[i] * x[j] / r5));
            }
        }
        jac
    }

    fn input_matrix(&self, _t: T, _x: &[T]) -> Mat<T> {
        stacked_identity(3)
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

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> CeresModel<f64> {
        CeresModel::reference()
    }

    #[test]
    fn altitude_examples() {
        let m = model();
        let h = m.altitude_output();
        let at_surface = [476_000.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(h.value(0.0, &at_surface).unwrap(), 0.0);
        let km_up = [0.0, 477_000.0, 0.0, 1.0, 2.0, 3.0];
        assert_eq!(h.value(0.0, &km_up).unwrap(), -1000.0);
        assert!(h.value(0.0, &[0.0; 6]).is_err());
    }

    #[test]
    fn altitude_gradient_has_unit_norm() {
        let h = model().altitude_output();
        for x in [
            [5.0e5, 1.0e3, -2.0e4, 1.0, 0.0, 0.0],
            [-3.0, 4.0, 0.0, 0.0, 0.0, 0.0],
            [1.0e-3, -7.0e5, 3.0e5, 0.0, 9.0, 0.0],
        ] {
            let jet = h.jet(0.0, &x).unwrap();
            assert!((norm(&jet.grad) - 1.0).abs() < 1e-14);
            assert_eq!(&jet.grad[3..], &[0.0; 3]);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let m = model();
        let x = [4.9e5, 1.2e4, -3.0e3, 1.0, -20.0, 3.0];
        let jac = m.drift_jacobian(0.0, &x);
        for j in 0..6 {
            let step = 1e-6 * x[j].abs().max(1.0);
            let mut xp = x;
            let mut xm = x;
            xp[j] += step;
            xm[j] -= step;
            let fp = m.drift(0.0, &xp);
            let fm = m.drift(0.0, &xm);
            for i in 0..6 {
                let fd = (fp[i] - fm[i]) / (2.0 * step);
                let scale = jac.get(i, j).abs().max(1e-12);
                assert!((fd - jac.get(i, j)).abs() / scale < 1e-5, "({i},{j}) {fd} vs {}", jac.get(i, j));
            }
        }
    }

    #[test]
    fn altitude_is_relative_degree_two() {
        let m = model();
        let x = [4.9e5, 1.2e4, -3.0e3, 1.0, -20.0, 3.0];
        let jet = m.altitude_output().jet(0.0, &x).unwrap();
        let gh = m.input_matrix(0.0, &x).left_mul(&jet.grad);
        assert_eq!(gh, vec![0.0; 3]);
    }
}
