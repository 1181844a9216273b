use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Monotone potential `Φ` shaping the lifted barrier, with its derivative
/// `φ = Φ′` and inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential<T> {
    /// `Φ(λ) = slope·λ`, `slope < 0`.
    Linear { slope: T },
    /// `Φ(λ) = μ/(ρ − λ) + a·λ`, `a < 0`; decreasing for
    /// `λ < ρ − sqrt(μ/−a)`.
    CeresGravity { mu: T, rho: T, accel: T },
}

impl<T: Scalar> Potential<T> {
    pub fn linear(slope: T) -> Result<Self> {
        if !(slope < T::zero() && slope.is_finite()) {
            return Err(Error::param("slope", "linear potential slope must be negative"));
        }
        Ok(Potential::Linear { slope })
    }

    pub fn ceres_gravity(mu: T, rho: T, accel: T) -> Result<Self> {
        if !(mu > T::zero() && rho > T::zero()) {
            return Err(Error::param("mu", "gravity potential needs mu > 0 and rho > 0"));
        }
        if !(accel < T::zero()) {
            return Err(Error::param("accel", "net braking term must be negative"));
        }
        Ok(Potential::CeresGravity { mu, rho, accel })
    }

    pub fn eval(&self, lambda: T) -> T {
        match *self {
            Potential::Linear { slope } => slope * lambda,
            Potential::CeresGravity { mu, rho, accel } => mu / (rho - lambda) + accel * lambda,
        }
    }

    pub fn deriv(&self, lambda: T) -> T {
        match *self {
            Potential::Linear { slope } => slope,
            Potential::CeresGravity { mu, rho, accel } => {
                let s = rho - lambda;
                mu / (s * s) + accel
            }
        }
    }

    /// Right end of the decreasing branch, where `φ` reaches zero.
    pub fn turning_point(&self) -> T {
        match *self {
            Potential::Linear { .. } => T::infinity(),
            Potential::CeresGravity { mu, rho, accel } => rho - (mu / -accel).sqrt(),
        }
    }

    /// Smallest value the decreasing branch attains.
    pub fn min_value(&self) -> T {
        match self {
            Potential::Linear { .. } => T::neg_infinity(),
            Potential::CeresGravity { .. } => self.eval(self.turning_point()),
        }
    }

    /// `Φ⁻¹(y)` on the decreasing branch.
    pub fn inverse(&self, y: T) -> Result<T> {
        if !y.is_finite() {
            return Err(Error::PotentialRange { value: y.to_f64_lossy(), lower: self.min_value().to_f64_lossy() });
        }
        match *self {
            Potential::Linear { slope } => Ok(y / slope),
            Potential::CeresGravity { accel, .. } => {
                let hi = self.turning_point();
                let y_min = self.eval(hi);
                if y < y_min {
                    return Err(Error::PotentialRange { value: y.to_f64_lossy(), lower: y_min.to_f64_lossy() });
                }
                if y == y_min {
                    return Ok(hi);
                }
                // Φ(λ) > aλ on the branch, so λ = y/a has Φ(λ) ≥ y.
                let lo = (y / accel).min(hi);
                let f = |l: T| self.eval(l);
                let lo = widen_lower(&f, y, lo, hi)?;
                invert_decreasing(&f, &|l| self.deriv(l), y, lo, hi)
            }
        }
    }

    /// `λ` with `Φ(λ) = Φ(base) + dy`, solved for the offset `λ − base`
    /// so large values of `Φ` do not cancel.
    pub fn inverse_offset(&self, base: T, dy: T) -> Result<T> {
        match *self {
            Potential::Linear { slope } => Ok(base + dy / slope),
            Potential::CeresGravity { mu, rho, accel } => {
                let s_hi = self.turning_point() - base;
                if !(s_hi >= T::zero()) || !dy.is_finite() {
                    return self.inverse(self.eval(base) + dy);
                }
                let gap = rho - base;
                let diff = |s: T| mu * s / (gap * (gap - s)) + accel * s;
                let d_min = diff(s_hi);
                if dy < d_min {
                    return Err(Error::PotentialRange {
                        value: (self.eval(base) + dy).to_f64_lossy(),
                        lower: self.min_value().to_f64_lossy(),
                    });
                }
                if dy == d_min {
                    return Ok(base + s_hi);
                }
                let lo = (dy / accel).min(s_hi);
                let lo = widen_lower(&diff, dy, lo, s_hi)?;
                let s = invert_decreasing(&diff, &|s| self.deriv(base + s), dy, lo, s_hi)?;
                Ok(base + s)
            }
        }
    }
}

fn widen_lower<T: Scalar>(f: &dyn Fn(T) -> T, y: T, mut lo: T, hi: T) -> Result<T> {
    let mut widen = 0;
    while f(lo) < y {
        lo = lo - (hi - lo).abs().max(T::one());
        widen += 1;
        if widen > 200 {
            return Err(Error::Bracket { value: y.to_f64_lossy() });
        }
    }
    Ok(lo)
}

/// Safeguarded Newton iteration for a decreasing `f` on a bracket
/// `[lo, hi]` with `f(lo) ≥ y ≥ f(hi)`. Falls back to bisection whenever
/// the Newton step leaves the bracket.
fn invert_decreasing<T: Scalar>(
    f: &dyn Fn(T) -> T,
    df: &dyn Fn(T) -> T,
    y: T,
    mut lo: T,
    mut hi: T,
) -> Result<T> {
    let eps = T::epsilon();
    let tol = T::lit(8.0) * eps * y.abs().max(T::one());
    let two = T::lit(2.0);
    let mut x = if hi.is_finite() { (lo + hi) / two } else { lo };
    let mut best = (T::infinity(), x);
    for _ in 0..300 {
        let r = f(x) - y;
        if r.abs() < best.0 {
            best = (r.abs(), x);
        }
        if r.abs() < tol {
            // one polishing step brings the result to within rounding of the root
            let d = df(x);
            if d < T::zero() {
                let polished = x - r / d;
                if (f(polished) - y).abs() <= r.abs() {
                    return Ok(polished);
                }
            }
            return Ok(x);
        }
        if r > T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= T::lit(4.0) * eps * x.abs().max(T::one()) {
            return Ok(best.1);
        }
        let d = df(x);
        let newton = if d < T::zero() { x - r / d } else { T::nan() };
        x = if newton > lo && newton < hi { newton } else { (lo + hi) / two };
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ceres() -> Potential<f64> {
        Potential::ceres_gravity(6.26325e10, 476_000.0, 0.025 - 0.5).unwrap()
    }

    #[test]
    fn linear_round_trip() {
        let p = Potential::linear(-0.057).unwrap();
        assert_eq!(p.inverse(p.eval(-3.0)).unwrap(), -3.0);
        assert!(Potential::linear(0.1).is_err());
    }

    #[test]
    fn ceres_derivative_is_negative_on_operating_range() {
        let p = ceres();
        for lam in [-5.0e5, -1.0e5, -2.0e4, -100.0, 0.0, 10.0] {
            assert!(p.deriv(lam) < 0.0);
        }
        assert!(p.turning_point() > 1.0e5);
    }

    #[test]
    fn ceres_rejects_values_below_branch_minimum() {
        let p = ceres();
        assert!(matches!(p.inverse(p.min_value() - 1.0), Err(Error::PotentialRange { .. })));
    }

    proptest! {
        #[test]
        fn ceres_inverse_round_trip(lam in -6.0e5_f64..50.0) {
            let p = ceres();
            let back = p.inverse(p.eval(lam)).unwrap();
            prop_assert!((back - lam).abs() <= 1e-9 * lam.abs().max(1.0), "{lam} -> {back}");
        }

        #[test]
        fn offset_inverse_matches_plain_inverse(base in -4.0e5_f64..0.0, dy in -2.0e3_f64..2.0e3) {
            let p = ceres();
            let a = p.inverse_offset(base, dy).unwrap();
            let b = p.inverse(p.eval(base) + dy).unwrap();
            prop_assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "{a} vs {b}");
        }

        #[test]
        fn ceres_monotone(a in -6.0e5_f64..50.0, b in -6.0e5_f64..50.0) {
            let p = ceres();
            prop_assume!(a < b);
            prop_assert!(p.eval(a) > p.eval(b));
        }
    }
}
