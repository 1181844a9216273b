//! Scalar abstraction shared by the numerical core.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the barrier, dynamics and solver code is generic over.
///
/// Implemented for `f32` and `f64`. Everything in the crate is written
/// against this trait; the `*64` aliases at the crate root fix it to `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `λ·|λ|`, the signed square used by the potential-field lift.
///
/// Continuously differentiable with derivative `2|λ|`.
pub fn abssq<T: Scalar>(lambda: T) -> T {
    lambda * lambda.abs()
}

/// Inverse of [`abssq`]: `sign(y)·sqrt(|y|)`.
pub fn abssq_inv<T: Scalar>(y: T) -> T {
    if y < T::zero() {
        -(-y).sqrt()
    } else {
        y.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abssq_branches() {
        assert_eq!(abssq(0.0_f64), 0.0);
        assert_eq!(abssq(3.0_f64), 9.0);
        assert_eq!(abssq(-2.0_f64), -4.0);
        assert_eq!(abssq(-2.0_f32), -4.0);
    }

    #[test]
    fn abssq_inverse_round_trip() {
        for v in [-7.5_f64, -1e-3, 0.0, 2e-4, 13.0] {
            assert!((abssq_inv(abssq(v)) - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn abssq_derivative_matches_difference_quotient() {
        for v in [-3.0_f64, -0.5, 0.25, 4.0] {
            let step = 1e-6;
            let fd = (abssq(v + step) - abssq(v - step)) / (2.0 * step);
            assert!((fd - 2.0 * v.abs()).abs() < 1e-6);
        }
    }
}
