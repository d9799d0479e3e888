//! Glauber dynamics over partial matchings and the randomized maximum
//! matching procedure built on it.
//!
//! One step: draw an edge uniformly, then flip a coin that proposes adding it
//! (probability `λ/(1+λ)`) or removing it (`1/(1+λ)`). Invalid proposals leave
//! the state unchanged. The fugacity is carried as `log2 λ` because the
//! default `λ = 2^m` does not fit in an `f64` for `m > 1023`.

use std::time::Instant;

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::Matching;

pub type ChainRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub log2_lambda: f64,
    pub steps: u64,
    pub seed: u64,
    pub restarts: u32,
}

impl ChainParams {
    /// `λ = 2^m`, `T = ⌈10 m ln n⌉`, `R = ⌈10 ln n⌉` (at least one restart).
    pub fn paper_default(g: &Graph, seed: u64) -> Self {
        ChainParams {
            log2_lambda: g.m() as f64,
            steps: default_steps(g.n(), g.m()),
            seed,
            restarts: default_restarts(g.n()),
        }
    }

    /// Probability of the remove branch, `1/(1+λ)`.
    pub fn p_remove(&self) -> f64 {
        fugacity_split(self.log2_lambda).0
    }

    /// Probability of the add branch, `λ/(1+λ)`.
    pub fn p_add(&self) -> f64 {
        fugacity_split(self.log2_lambda).1
    }

    pub fn validate(&self) -> Result<()> {
        if !self.log2_lambda.is_finite() {
            return Err(Error::Param(format!("log2 lambda must be finite, got {}", self.log2_lambda)));
        }
        Ok(())
    }
}

pub fn default_steps(n: usize, m: usize) -> u64 {
    (10.0 * m as f64 * (n as f64).ln()).ceil().max(0.0) as u64
}

pub fn default_restarts(n: usize) -> u32 {
    ((10.0 * (n as f64).ln()).ceil() as u32).max(1)
}

/// `(1/(1+λ), λ/(1+λ))` for `λ = 2^x`, computed from `2^{-|x|}` so neither
/// branch overflows or cancels.
pub fn fugacity_split(log2_lambda: f64) -> (f64, f64) {
    let t = (-log2_lambda.abs()).exp2();
    let small = t / (1.0 + t);
    let large = 1.0 / (1.0 + t);
    if log2_lambda >= 0.0 {
        (small, large)
    } else {
        (large, small)
    }
}

/// Outcome classification of one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Added,
    Removed,
    /// Invalid add, add of a member, or remove of a non-member.
    Rejected,
}

/// A chain bound to one graph and fugacity. Holds the pre-built coin so the
/// inner loop does no floating-point set-up.
#[derive(Debug, Clone)]
pub struct Chain<'g> {
    graph: &'g Graph,
    remove_coin: Bernoulli,
}

impl<'g> Chain<'g> {
    pub fn new(graph: &'g Graph, log2_lambda: f64) -> Result<Self> {
        if graph.m() == 0 {
            return Err(Error::Param("the chain needs at least one edge".into()));
        }
        if !log2_lambda.is_finite() {
            return Err(Error::Param(format!("log2 lambda must be finite, got {log2_lambda}")));
        }
        let (p_remove, _) = fugacity_split(log2_lambda);
        let remove_coin = Bernoulli::new(p_remove).map_err(|e| Error::Param(e.to_string()))?;
        Ok(Chain { graph, remove_coin })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// One transition, in place. Two draws: the edge, then the coin.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&self, state: &mut Matching, rng: &mut R) -> Move {
        let e = rng.random_range(0..self.graph.m());
        let remove = self.remove_coin.sample(rng);
        let mv = if remove {
            if state.remove(self.graph, e) {
                Move::Removed
            } else {
                Move::Rejected
            }
        } else if state.try_insert(self.graph, e) {
            Move::Added
        } else {
            Move::Rejected
        };
        state.debug_check_edge(self.graph, e);
        mv
    }

    /// Runs `steps` transitions from `state`, tallying the outcomes. Same
    /// trajectory as repeated [`Chain::step`]: draws are taken in batches in
    /// the same order, and endpoint lookups for a batch are issued before any
    /// of its moves so their cache misses overlap.
    pub fn run<R: Rng + ?Sized>(&self, state: &mut Matching, steps: u64, rng: &mut R) -> MoveCounts {
        const BATCH: usize = 64;
        let mut edge = [0usize; BATCH];
        let mut remove = [false; BATCH];
        let mut ends = [(0usize, 0usize); BATCH];
        let mut counts = MoveCounts::default();
        let mut left = steps;
        while left > 0 {
            let len = left.min(BATCH as u64) as usize;
            for i in 0..len {
                edge[i] = rng.random_range(0..self.graph.m());
                remove[i] = self.remove_coin.sample(rng);
            }
            for i in 0..len {
                ends[i] = self.graph.endpoints(edge[i]);
            }
            for i in 0..len {
                let changed =
                    if remove[i] { state.remove_at(edge[i], ends[i]) } else { state.try_insert_at(edge[i], ends[i]) };
                match (changed, remove[i]) {
                    (false, _) => counts.rejects += 1,
                    (true, false) => counts.adds += 1,
                    (true, true) => counts.removes += 1,
                }
                state.debug_check_edge(self.graph, edge[i]);
            }
            left -= len as u64;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCounts {
    pub adds: u64,
    pub removes: u64,
    pub rejects: u64,
}

/// Single transition with a freshly built chain; convenient for tests and
/// one-off use. Hot loops should hold a [`Chain`].
pub fn step<R: Rng + ?Sized>(g: &Graph, state: &Matching, params: &ChainParams, rng: &mut R) -> Result<Matching> {
    let chain = Chain::new(g, params.log2_lambda)?;
    let mut next = state.clone();
    chain.step(&mut next, rng);
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub final_state: Matching,
    pub found_size: usize,
    pub steps_taken: u64,
    pub counts: MoveCounts,
    pub seed: u64,
    pub wall_nanos: u128,
}

/// Wire form of a run: `{"size","steps","adds","removes","rejects","seed","matching"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReportJson {
    pub size: usize,
    pub steps: u64,
    pub adds: u64,
    pub removes: u64,
    pub rejects: u64,
    pub seed: u64,
    pub matching: Vec<usize>,
}

impl RunReport {
    pub fn to_json(&self) -> RunReportJson {
        RunReportJson {
            size: self.found_size,
            steps: self.steps_taken,
            adds: self.counts.adds,
            removes: self.counts.removes,
            rejects: self.counts.rejects,
            seed: self.seed,
            matching: self.final_state.edges().collect(),
        }
    }

    /// Equal up to wall time.
    pub fn same_outcome(&self, other: &RunReport) -> bool {
        self.final_state == other.final_state
            && self.steps_taken == other.steps_taken
            && self.counts == other.counts
            && self.seed == other.seed
    }
}

/// Runs the chain for `params.steps` steps from the empty matching with an
/// RNG seeded from `params.seed`, returning the last state.
pub fn rand_matching(g: &Graph, params: &ChainParams) -> Result<RunReport> {
    params.validate()?;
    let mut state = Matching::empty(g);
    if g.m() == 0 {
        return Ok(RunReport {
            final_state: state,
            found_size: 0,
            steps_taken: params.steps,
            counts: MoveCounts { rejects: params.steps, ..Default::default() },
            seed: params.seed,
            wall_nanos: 0,
        });
    }
    let chain = Chain::new(g, params.log2_lambda)?;
    let mut rng = ChainRng::seed_from_u64(params.seed);
    let start = Instant::now();
    let counts = chain.run(&mut state, params.steps, &mut rng);
    let wall_nanos = start.elapsed().as_nanos();
    Ok(RunReport {
        found_size: state.size(),
        final_state: state,
        steps_taken: params.steps,
        counts,
        seed: params.seed,
        wall_nanos,
    })
}

/// Matching size after every `stride` steps of the same run
/// [`rand_matching`] performs: entry `i` is the size after `i * stride` steps,
/// the last entry the size after `params.steps`. No clock is read.
pub fn trace_sizes(g: &Graph, params: &ChainParams, stride: u64) -> Result<Vec<usize>> {
    params.validate()?;
    if stride == 0 {
        return Err(Error::Param("stride must be at least 1".into()));
    }
    let mut state = Matching::empty(g);
    let mut sizes = vec![0];
    if g.m() == 0 {
        sizes.resize(params.steps.div_ceil(stride) as usize + 1, 0);
        return Ok(sizes);
    }
    let chain = Chain::new(g, params.log2_lambda)?;
    let mut rng = ChainRng::seed_from_u64(params.seed);
    let mut done = 0;
    while done < params.steps {
        let len = stride.min(params.steps - done);
        chain.run(&mut state, len, &mut rng);
        done += len;
        sizes.push(state.size());
    }
    Ok(sizes)
}

/// SplitMix64 output function applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of restart `i`: `master ^ splitmix64(i)`.
pub fn restart_seed(master: u64, i: u32) -> u64 {
    master ^ splitmix64(i as u64)
}

#[derive(Debug, Clone)]
pub struct AmplifiedResult {
    pub best: Matching,
    pub best_index: usize,
    pub reports: Vec<RunReport>,
}

/// `params.restarts` independent runs with derived seeds; keeps the largest
/// matching, ties going to the lowest restart index. Runs are spread over the
/// current rayon pool, which does not change the result.
pub fn amplified_solve(g: &Graph, params: &ChainParams, master_seed: u64) -> Result<AmplifiedResult> {
    if params.restarts == 0 {
        return Err(Error::Param("restarts must be at least 1".into()));
    }
    let reports: Vec<RunReport> = (0..params.restarts)
        .into_par_iter()
        .map(|i| {
            let p = ChainParams { seed: restart_seed(master_seed, i), ..*params };
            rand_matching(g, &p)
        })
        .collect::<Result<_>>()?;
    let mut best_index = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.found_size > reports[best_index].found_size {
            best_index = i;
        }
    }
    Ok(AmplifiedResult { best: reports[best_index].final_state.clone(), best_index, reports })
}

/// Bound values the analysis asserts or reports for a graph with `n`
/// vertices, `m` edges and maximum matching size `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaimedBounds {
    /// `m ln(4 e n)`
    pub t_mix_upper: f64,
    /// `m / k`
    pub t_mix_lower: f64,
    pub success_lb: f64,
    pub beta: f64,
    pub diameter_d: f64,
}

pub const SUCCESS_LOWER_BOUND: f64 = 20.0 / 189.0;

pub fn claimed_bounds(n: usize, m: usize, k: usize) -> Result<ClaimedBounds> {
    if m == 0 || k == 0 {
        return Err(Error::Param("bounds need m >= 1 and k >= 1".into()));
    }
    let (n, m, k) = (n as f64, m as f64, k as f64);
    Ok(ClaimedBounds {
        t_mix_upper: m * (4.0 * std::f64::consts::E * n).ln(),
        t_mix_lower: m / k,
        success_lb: SUCCESS_LOWER_BOUND,
        beta: 1.0 - 1.0 / m,
        diameter_d: 2.0 * n,
    })
}
