//! Throughput measurements for the single-chain sampler.

use serde::{Deserialize, Serialize};

use crate::chain::{rand_matching, ChainParams};
use crate::error::{Error, Result};
use crate::graph::{generate, Family, Graph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub rep: usize,
    pub n: usize,
    pub m: usize,
    pub steps: u64,
    pub wall_nanos: u128,
    pub ns_per_step: f64,
    pub adds: u64,
    pub removes: u64,
    pub rejects: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub rows: Vec<BenchRow>,
    pub median_steps_per_sec: f64,
}

/// `reps` identical runs (same seed) of `params.steps` steps each.
pub fn bench(g: &Graph, params: &ChainParams, reps: usize) -> Result<BenchRecord> {
    if reps == 0 {
        return Err(Error::Param("reps must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(reps);
    for rep in 0..reps {
        let r = rand_matching(g, params)?;
        rows.push(BenchRow {
            rep,
            n: g.n(),
            m: g.m(),
            steps: r.steps_taken,
            wall_nanos: r.wall_nanos,
            ns_per_step: r.wall_nanos as f64 / r.steps_taken.max(1) as f64,
            adds: r.counts.adds,
            removes: r.counts.removes,
            rejects: r.counts.rejects,
        });
    }
    let mut rates: Vec<f64> = rows.iter().map(|r| 1e9 / r.ns_per_step.max(f64::MIN_POSITIVE)).collect();
    rates.sort_by(f64::total_cmp);
    let median_steps_per_sec = median_sorted(&rates);
    Ok(BenchRecord { rows, median_steps_per_sec })
}

fn median_sorted(v: &[f64]) -> f64 {
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Fastest of `reps` runs, in nanoseconds.
pub fn best_wall_nanos(g: &Graph, params: &ChainParams, reps: usize) -> Result<u128> {
    Ok(bench(g, params, reps)?.rows.iter().map(|r| r.wall_nanos).min().unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub m: usize,
    pub ns_per_step: f64,
}

/// Per-step cost on sparse G(n, p) graphs with mean degree `mean_degree`,
/// one point per requested `n` (best of `reps` runs each).
pub fn step_cost_scaling(
    sizes: &[usize],
    mean_degree: f64,
    steps: u64,
    reps: usize,
    seed: u64,
) -> Result<Vec<ScalingPoint>> {
    sizes
        .iter()
        .map(|&n| {
            let p = (mean_degree / (n.max(2) - 1) as f64).min(1.0);
            let g = generate(Family::Gnp { p }, n, seed)?;
            let params = ChainParams { steps, ..ChainParams::paper_default(&g, seed) };
            let wall = best_wall_nanos(&g, &params, reps)?;
            Ok(ScalingPoint { n, m: g.m(), ns_per_step: wall as f64 / steps as f64 })
        })
        .collect()
}

/// Ratio of the largest to the smallest per-step cost.
pub fn spread(points: &[ScalingPoint]) -> f64 {
    let hi = points.iter().map(|p| p.ns_per_step).fold(f64::NEG_INFINITY, f64::max);
    let lo = points.iter().map(|p| p.ns_per_step).fold(f64::INFINITY, f64::min);
    hi / lo
}
