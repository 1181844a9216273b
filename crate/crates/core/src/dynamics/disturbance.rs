use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{mask_unmatched, ControlAffine};
use crate::barrier::SafetyFunction;
use crate::error::{Error, Result};
use crate::linalg::{norm, scale};
use crate::scalar::Scalar;

/// How `(w_u, w_x)` realizations are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbancePolicy<T> {
    Zero,
    /// Uniform on the norm balls, redrawn every `hold_interval` seconds.
    SeededRandom { seed: u64, hold_interval: T },
    /// Worst case for the target barrier: maximizes `∇H·g·w_u + ∇H·w_x`.
    Adversarial,
    /// Best case for the target barrier: minimizes `∇H·g·w_u + ∇H·w_x`.
    Helpful,
}

impl<T: Scalar> DisturbancePolicy<T> {
    pub fn random(seed: u64) -> Self {
        DisturbancePolicy::SeededRandom { seed, hold_interval: T::one() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DisturbancePolicy::Zero => "zero",
            DisturbancePolicy::SeededRandom { .. } => "random",
            DisturbancePolicy::Adversarial => "adversarial",
            DisturbancePolicy::Helpful => "helpful",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceSample<T> {
    /// Matched disturbance, length `m`.
    pub w_u: Vec<T>,
    /// Unmatched disturbance, length `n`, zero outside the unmatched mask.
    pub w_x: Vec<T>,
}

impl<T: Scalar> DisturbanceSample<T> {
    pub fn zero(state_dim: usize, input_dim: usize) -> Self {
        Self { w_u: vec![T::zero(); input_dim], w_x: vec![T::zero(); state_dim] }
    }
}

/// Stateful disturbance source for one simulation. Owns its RNG; clone
/// with a different seed for parallel runs.
#[derive(Debug, Clone)]
pub struct DisturbanceGenerator<T> {
    policy: DisturbancePolicy<T>,
    rng: ChaCha8Rng,
    held: Option<(i64, DisturbanceSample<T>)>,
}

impl<T: Scalar> DisturbanceGenerator<T> {
    pub fn new(policy: DisturbancePolicy<T>) -> Result<Self> {
        let seed = match &policy {
            DisturbancePolicy::SeededRandom { seed, hold_interval } => {
                if !(*hold_interval > T::zero() && hold_interval.is_finite()) {
                    return Err(Error::param("hold_interval", "must be positive and finite"));
                }
                *seed
            }
            _ => 0,
        };
        Ok(Self { policy, rng: ChaCha8Rng::seed_from_u64(seed), held: None })
    }

    pub fn policy(&self) -> &DisturbancePolicy<T> {
        &self.policy
    }

    /// Disturbance to apply over the step starting at `(t, x)`.
    pub fn sample(
        &mut self,
        target: &dyn SafetyFunction<T>,
        model: &dyn ControlAffine<T>,
        t: T,
        x: &[T],
    ) -> Result<DisturbanceSample<T>> {
        let (n, m) = (model.state_dim(), model.input_dim());
        let bounds = model.bounds();
        let mask = model.unmatched_mask();
        match &self.policy {
            DisturbancePolicy::Zero => Ok(DisturbanceSample::zero(n, m)),
            DisturbancePolicy::SeededRandom { hold_interval, .. } => {
                let epoch = (t / *hold_interval + T::lit(1e-9)).floor().to_i64().unwrap_or(i64::MAX);
                if let Some((held_epoch, sample)) = &self.held {
                    if *held_epoch == epoch {
                        return Ok(sample.clone());
                    }
                }
                let w_u = uniform_ball(&mut self.rng, m, bounds.w_u_max);
                let active = mask.iter().filter(|&&b| b).count();
                let packed = uniform_ball(&mut self.rng, active, bounds.w_x_max);
                let mut w_x = vec![T::zero(); n];
                let mut it = packed.into_iter();
                for (slot, _) in w_x.iter_mut().zip(mask).filter(|(_, &b)| b) {
                    *slot = it.next().expect("one sample per masked component");
                }
                let sample = DisturbanceSample { w_u, w_x };
                self.held = Some((epoch, sample.clone()));
                Ok(sample)
            }
            DisturbancePolicy::Adversarial => aligned(target, model, t, x, T::one()),
            DisturbancePolicy::Helpful => aligned(target, model, t, x, -T::one()),
        }
    }
}

/// Full-magnitude disturbances along (`sign = 1`) or against (`sign = −1`)
/// the barrier gradient.
fn aligned<T: Scalar>(
    target: &dyn SafetyFunction<T>,
    model: &dyn ControlAffine<T>,
    t: T,
    x: &[T],
    sign: T,
) -> Result<DisturbanceSample<T>> {
    let jet = target.jet(model, t, x)?;
    let bounds = model.bounds();
    let grad_g = model.input_matrix(t, x).left_mul(&jet.grad);
    let grad_x = mask_unmatched(model.unmatched_mask(), &jet.grad);
    Ok(DisturbanceSample {
        w_u: unit_or_zero(&grad_g, sign * bounds.w_u_max),
        w_x: unit_or_zero(&grad_x, sign * bounds.w_x_max),
    })
}

fn unit_or_zero<T: Scalar>(v: &[T], magnitude: T) -> Vec<T> {
    let len = norm(v);
    if len > T::zero() {
        scale(magnitude / len, v)
    } else {
        vec![T::zero(); v.len()]
    }
}

/// Uniform sample from the ball of the given radius: isotropic direction,
/// radius `R·U^(1/dim)`.
fn uniform_ball<T: Scalar>(rng: &mut ChaCha8Rng, dim: usize, radius: T) -> Vec<T> {
    if dim == 0 || radius == T::zero() {
        // still consume draws so sequences do not depend on the bound values
        for _ in 0..=dim {
            let _: f64 = rng.random();
        }
        return vec![T::zero(); dim];
    }
    let mut dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let mut len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    while len == 0.0 {
        dir = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let u: f64 = rng.random();
    let r = u.powf(1.0 / dim as f64);
    let mut out: Vec<T> = dir.iter().map(|d| radius * T::lit(d / len * r)).collect();
    let n = norm(&out);
    if n > radius {
        out = scale(radius / n, &out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::DisturbanceBounds;
    use crate::dynamics::{CeresModel, HcwModel};
    use crate::tests_support::docking_h1;

    #[test]
    fn zero_policy_is_zero() {
        let model = HcwModel::<f64>::reference();
        let spec = docking_h1();
        let mut gen = DisturbanceGenerator::new(DisturbancePolicy::Zero).unwrap();
        let s = gen.sample(&spec, &model, 3.0, &[0.0, -10.0, 0.0, 1.0]).unwrap();
        assert_eq!(s, DisturbanceSample::zero(4, 2));
    }

    #[test]
    fn random_samples_are_bounded_and_held() {
        let model = CeresModel::<f64>::reference();
        let spec = crate::tests_support::ceres_h1();
        let x = [476_000.0 + 1000.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let mut gen = DisturbanceGenerator::new(DisturbancePolicy::random(9)).unwrap();
        let a = gen.sample(&spec, &model, 0.0, &x).unwrap();
        let b = gen.sample(&spec, &model, 0.5, &x).unwrap();
        let c = gen.sample(&spec, &model, 1.0, &x).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for s in [a, c] {
            assert!(norm(&s.w_u) <= 0.025 + 1e-12);
            assert!(norm(&s.w_x) <= 0.01 + 1e-12);
            assert_eq!(&s.w_x[3..], &[0.0; 3]);
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let model = HcwModel::<f64>::reference();
        let spec = docking_h1();
        let x = [0.0, -10.0, 0.0, 1.0];
        let run = |seed| {
            let mut gen = DisturbanceGenerator::new(DisturbancePolicy::random(seed)).unwrap();
            (0..50).map(|k| gen.sample(&spec, &model, k as f64 * 0.5, &x).unwrap()).collect::<Vec<_>>()
        };
        let (a, b) = (run(4), run(4));
        for (sa, sb) in a.iter().zip(&b) {
            for (p, q) in sa.w_u.iter().chain(&sa.w_x).zip(sb.w_u.iter().chain(&sb.w_x)) {
                assert_eq!(p.to_bits(), q.to_bits());
            }
        }
        assert_ne!(run(5), a);
    }

    #[test]
    fn zero_bounds_give_zero_samples() {
        let mut model = HcwModel::<f64>::reference();
        model.bounds = DisturbanceBounds::new(0.0, 0.0).unwrap();
        let spec = docking_h1();
        let mut gen = DisturbanceGenerator::new(DisturbancePolicy::random(1)).unwrap();
        let s = gen.sample(&spec, &model, 0.0, &[0.0, -1.0, 0.0, 0.1]).unwrap();
        assert_eq!(s, DisturbanceSample::zero(4, 2));
    }

    #[test]
    fn rejects_bad_hold_interval() {
        let policy = DisturbancePolicy::SeededRandom { seed: 0, hold_interval: 0.0_f64 };
        assert!(DisturbanceGenerator::new(policy).is_err());
    }
}
