use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{run_scenario, Scenario, SimOutcome};
use crate::barrier::ContactObjective;
use crate::dynamics::DisturbancePolicy;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun<T> {
    pub seed: u64,
    pub success: bool,
    pub outcome: Option<SimOutcome<T>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Some(Self { min, max, mean })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport<T> {
    pub scenario: String,
    pub total: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub t_f: Option<Stats>,
    pub terminal_h_dot: Option<Stats>,
    pub runs: Vec<SweepRun<T>>,
}

/// Runs `base` once per seed with a seeded random disturbance, in parallel;
/// results are ordered by seed.
pub fn run_sweep<T: Scalar + Serialize>(base: &Scenario<T>, seeds: Range<u64>, hold_interval: T) -> Result<SweepReport<T>> {
    if seeds.is_empty() {
        return Err(Error::config("seeds", "empty seed range"));
    }
    let objective = base.law.h1().tolerances().map(|t| t.objective).unwrap_or(ContactObjective::Landing);
    let runs: Vec<SweepRun<T>> = seeds
        .into_par_iter()
        .map(|seed| {
            let scenario = base.with_policy(DisturbancePolicy::SeededRandom { seed, hold_interval });
            match run_scenario(&scenario) {
                Ok((_, outcome)) => SweepRun { seed, success: outcome.is_success(objective), outcome: Some(outcome), error: None },
                Err(e) => SweepRun { seed, success: false, outcome: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let done: Vec<&SimOutcome<T>> = runs.iter().filter_map(|r| r.outcome.as_ref()).collect();
    let t_f: Vec<f64> = done.iter().map(|o| o.t_f.to_f64_lossy()).collect();
    let hd: Vec<f64> = done.iter().map(|o| o.terminal_h_dot.to_f64_lossy()).collect();
    let successes = runs.iter().filter(|r| r.success).count();
    Ok(SweepReport {
        scenario: base.id.clone(),
        total: runs.len(),
        successes,
        success_rate: successes as f64 / runs.len() as f64,
        t_f: Stats::of(&t_f),
        terminal_h_dot: Stats::of(&hd),
        runs,
    })
}
