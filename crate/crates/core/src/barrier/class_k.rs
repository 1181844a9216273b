use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Strictly increasing map with `α(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassK<T> {
    /// `α(λ) = gain·λ`
    Linear { gain: T },
}

impl<T: Scalar> ClassK<T> {
    pub fn linear(gain: T) -> Result<Self> {
        if !(gain > T::zero() && gain.is_finite()) {
            return Err(Error::param("gain", "class-K gain must be positive and finite"));
        }
        Ok(ClassK::Linear { gain })
    }

    pub fn eval(&self, lambda: T) -> T {
        match *self {
            ClassK::Linear { gain } => gain * lambda,
        }
    }

    pub fn inverse(&self, y: T) -> T {
        match *self {
            ClassK::Linear { gain } => y / gain,
        }
    }

    /// `α⁻¹(2)`, the width of the boundary layer trajectories settle into.
    pub fn layer_width(&self) -> T {
        self.inverse(T::lit(2.0))
    }
}
