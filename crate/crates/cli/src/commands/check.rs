use adiasearch::analytics::linear_cost_bound;
use adiasearch::{
    linear_schedule, local_schedule, parallel_schedule, propagate, propagate_full,
    PropagateOptions, Schedule, SearchInstance, Shape, Strategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const CHECK_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_CHECK_NS: [u64; 3] = [4, 20, 128];
const CHECK_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub n: u64,
    pub marked: u64,
    pub strategy: Strategy,
    pub reduced: f64,
    /// `None` when the full-space run lost unitarity.
    pub full: Option<f64>,
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub seed: u64,
    pub steps: usize,
    pub tolerance: f64,
    pub entries: Vec<CheckEntry>,
    pub max_delta: f64,
    /// Runs whose full-space propagation failed.
    pub errors: usize,
    pub pass: bool,
}

/// Local at ε = 0.2, linear at its adiabatic bound for the same ε, and
/// parallel at γ = 1 with r = 8.
fn check_schedule(strategy: Strategy, inst: &SearchInstance) -> Result<Schedule> {
    let n = inst.n();
    Ok(match strategy {
        Strategy::Local => local_schedule(1.0, CHECK_EPSILON, inst)?,
        Strategy::Linear => linear_schedule(1.0, linear_cost_bound(CHECK_EPSILON, n), inst)?,
        Strategy::Parallel => parallel_schedule(1.0, (n as f64).sqrt(), 8.0, Shape::Tanh, inst)?,
    })
}

/// Reduced against full-space propagation for every `n` and strategy, with
/// the marked index drawn from a seeded generator.
pub fn check(ns: &[u64], seed: u64, steps: usize, cap: usize) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::new();
    for &n in ns {
        let marked = if n >= 1 { rng.gen_range(0..n) } else { 0 };
        let inst = SearchInstance::new(n, marked)?;
        if n > cap as u64 {
            return Err(adiasearch::Error::OracleSizeExceeded { n, cap }.into());
        }
        jobs.extend(Strategy::ALL.map(|s| (inst, s)));
    }
    let entries = jobs
        .par_iter()
        .map(|&(inst, strategy)| -> Result<CheckEntry> {
            let schedule = check_schedule(strategy, &inst)?;
            let (_, reduced) = propagate(
                &schedule,
                &inst,
                PropagateOptions {
                    steps,
                    stride: steps,
                },
            )?;
            let (full, error) = match propagate_full(&schedule, &inst, steps, cap) {
                Ok(full) => (Some(full.p_m_final), None),
                Err(e @ adiasearch::Error::NonUnit { .. }) => (None, Some(e.to_string())),
                Err(e) => return Err(e.into()),
            };
            Ok(CheckEntry {
                n: inst.n(),
                marked: inst.marked(),
                strategy,
                reduced: reduced.p_m_final,
                full,
                delta: full.map(|f| (reduced.p_m_final - f).abs()),
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_delta = entries.iter().filter_map(|e| e.delta).fold(0.0, f64::max);
    let errors = entries.iter().filter(|e| e.error.is_some()).count();
    Ok(CheckReport {
        seed,
        steps,
        tolerance: CHECK_TOLERANCE,
        pass: errors == 0 && max_delta < CHECK_TOLERANCE,
        entries,
        max_delta,
        errors,
    })
}
