use crate::dynamics::{ControlAffine, DisturbanceSample, OutputMap};
use crate::error::Result;
use crate::scalar::Scalar;

/// Input and disturbance held constant over one step.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldInput<T> {
    pub u: Vec<T>,
    pub w: DisturbanceSample<T>,
}

/// One classical RK4 step of `ẋ = f + g(u + w_u) + w_x` under zero-order hold.
pub fn integrate_step<T: Scalar>(model: &dyn ControlAffine<T>, t: T, x: &[T], held: &HeldInput<T>, dt: T) -> Vec<T> {
    let half = T::lit(0.5);
    let rate = |tt: T, xx: &[T]| model.rate(tt, xx, &held.u, &held.w.w_u, &held.w.w_x);
    let shifted = |k: &[T], s: T| -> Vec<T> { x.iter().zip(k).map(|(&a, &b)| a + s * b).collect() };
    let k1 = rate(t, x);
    let k2 = rate(t + half * dt, &shifted(&k1, half * dt));
    let k3 = rate(t + half * dt, &shifted(&k2, half * dt));
    let k4 = rate(t + dt, &shifted(&k3, dt));
    let sixth = dt / T::lit(6.0);
    (0..x.len())
        .map(|i| x[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect()
}

/// Refines a crossing of `h = 0` inside the step `[t, t + dt]` by bisecting
/// on the sub-step length, re-integrating from `(t, x)` each time, until
/// `|h| ≤ tol`. Requires `h(t, x) < 0 ≤ h` at the end of the full step.
pub fn detect_contact<T: Scalar>(
    model: &dyn ControlAffine<T>,
    output: &OutputMap<T>,
    t: T,
    x: &[T],
    held: &HeldInput<T>,
    dt: T,
    tol: T,
) -> Result<(T, Vec<T>)> {
    let mut lo = T::zero();
    let mut hi = dt;
    let mut best = (t + dt, integrate_step(model, t, x, held, dt));
    if output.value(best.0, &best.1)?.abs() <= tol {
        return Ok(best);
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        let xm = integrate_step(model, t, x, held, mid);
        let hm = output.value(t + mid, &xm)?;
        if hm >= T::zero() {
            hi = mid;
            best = (t + mid, xm);
        } else {
            lo = mid;
        }
        if hm.abs() <= tol {
            return Ok((t + mid, integrate_step(model, t, x, held, mid)));
        }
        if hi - lo <= T::epsilon() * (T::one() + t.abs()) {
            break;
        }
    }
    Ok(best)
}
