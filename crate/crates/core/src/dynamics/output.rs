use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Mat};
use crate::scalar::Scalar;

/// Value and derivatives of a scalar constraint output `h(t,x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputJet<T> {
    pub value: T,
    pub grad: Vec<T>,
    pub hessian: Mat<T>,
    /// `∂_t h`
    pub dt: T,
    /// `∇(∂_t h)`
    pub grad_dt: Vec<T>,
    /// `∂²_t h`
    pub dtt: T,
}

/// Scalar distance-like outputs `h`, negative while separated and zero at
/// contact.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputMap<T> {
    /// `h = radius − ‖r‖` with `r` the first three state components.
    Altitude { radius: T },
    /// `h = c·x + offset`.
    Linear { coeffs: Vec<T>, offset: T },
}

impl<T: Scalar> OutputMap<T> {
    pub fn linear(coeffs: Vec<T>, offset: T) -> Self {
        OutputMap::Linear { coeffs, offset }
    }

    pub fn value(&self, t: T, x: &[T]) -> Result<T> {
        match self {
            OutputMap::Altitude { radius } => {
                let r = norm(&x[..3]);
                if r == T::zero() {
                    return Err(Error::OutputDomain("altitude undefined at r = 0"));
                }
                Ok(*radius - r)
            }
            OutputMap::Linear { .. } => Ok(self.jet(t, x)?.value),
        }
    }

    pub fn jet(&self, _t: T, x: &[T]) -> Result<OutputJet<T>> {
        let n = x.len();
        match self {
            OutputMap::Altitude { radius } => {
                let r = norm(&x[..3]);
                if r == T::zero() {
                    return Err(Error::OutputDomain("altitude undefined at r = 0"));
                }
                let mut grad = vec![T::zero(); n];
                let mut hessian = Mat::zeros(n, n);
                for i in 0..3 {
                    grad[i] = -x[i] / r;
                    for j in 0..3 {
                        let eye = if i == j { T::one() } else { T::zero() };
                        hessian.set(i, j, -(eye - x[i] * x[j] / (r * r)) / r);
                    }
                }
                Ok(OutputJet {
                    value: *radius - r,
                    grad,
                    hessian,
                    dt: T::zero(),
                    grad_dt: vec![T::zero(); n],
                    dtt: T::zero(),
                })
            }
            OutputMap::Linear { coeffs, offset } => {
                debug_assert_eq!(coeffs.len(), n);
                Ok(OutputJet {
                    value: dot(coeffs, x) + *offset,
                    grad: coeffs.clone(),
                    hessian: Mat::zeros(n, n),
                    dt: T::zero(),
                    grad_dt: vec![T::zero(); n],
                    dtt: T::zero(),
                })
            }
        }
    }
}
