//! Exact analysis of the chain on graphs small enough to enumerate every
//! matching: partition function, Gibbs vector, the sparse transition kernel,
//! stationarity and reversibility checks, total variation, mixing time and
//! conductance.
//!
//! All fugacity-dependent quantities take `log2 λ`; the partition function is
//! kept as `log2 Z` so `λ = 2^m` never overflows.

mod conductance;
mod mixing;
mod report;

pub use conductance::{
    conductance_exact, conductance_of_cut, max_matching_cut, Conductance, MaxMatchingCut, DEFAULT_CUT_CAP,
};
pub use mixing::{exact_mixing_time, tv_curve, MixingOptions, MixingReport, Start, DEFAULT_DENSE_CAP, DEFAULT_T_MAX};
pub use report::{analyze, AnalysisOptions, AnalysisReport};

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chain::fugacity_split;
use crate::enumerate::{enumerate_matchings, SizeCounts};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::Matching;

/// `1/(2e)`
pub const DEFAULT_EPS: f64 = 0.5 / std::f64::consts::E;

/// The enumerated state space: every matching of the graph in canonical
/// order, with a reverse index. State 0 is the empty matching.
#[derive(Debug, Clone)]
pub struct StateSpace {
    graph: Graph,
    states: Vec<Matching>,
    index: HashMap<Vec<u64>, usize>,
    size_counts: SizeCounts,
}

impl StateSpace {
    pub fn build(g: &Graph, cap: usize) -> Result<Self> {
        let states = enumerate_matchings(g, cap)?;
        let index = states.iter().enumerate().map(|(i, s)| (s.key(), i)).collect();
        let size_counts = SizeCounts::from_sizes(states.iter().map(Matching::size));
        Ok(StateSpace { graph: g.clone(), states, index, size_counts })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn states(&self) -> &[Matching] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Matching {
        &self.states[i]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn size_counts(&self) -> &SizeCounts {
        &self.size_counts
    }

    pub fn index_of(&self, m: &Matching) -> Option<usize> {
        self.index.get(&m.key()).copied()
    }

    /// Indices of the maximum matchings, ascending.
    pub fn maximum_states(&self) -> impl Iterator<Item = usize> + '_ {
        let k = self.size_counts.k;
        self.states.iter().enumerate().filter(move |(_, s)| s.size() == k).map(|(i, _)| i)
    }
}

/// A probability vector over the states of a [`StateSpace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistVector {
    pub probs: Vec<f64>,
}

impl DistVector {
    pub fn delta(len: usize, at: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[at] = 1.0;
        DistVector { probs }
    }

    pub fn uniform_over(len: usize, support: &[usize]) -> Self {
        let mut probs = vec![0.0; len];
        for &i in support {
            probs[i] = 1.0 / support.len() as f64;
        }
        DistVector { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::Invariant("negative or NaN probability".into()));
        }
        let s = self.total();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Invariant(format!("distribution sums to {s}")));
        }
        Ok(())
    }
}

/// Sparse row-stochastic matrix in compressed-row form; each row is sorted by
/// target and has at most `m + 1` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    row_start: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn len(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.row_start[i + 1] - self.row_start[i]
    }

    /// `P_ij`, zero when absent.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let r = self.row_start[i]..self.row_start[i + 1];
        match self.targets[r.clone()].binary_search(&j) {
            Ok(pos) => self.weights[r.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Row `i` as a dense vector.
    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (j, p) in self.row(i) {
            out[j] = p;
        }
        out
    }

    /// `out = v P`
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (j, p) in self.row(i) {
                out[j] += vi * p;
            }
        }
    }

    pub fn apply(&self, v: &DistVector) -> DistVector {
        let mut out = vec![0.0; self.len()];
        self.apply_into(&v.probs, &mut out);
        DistVector { probs: out }
    }

    pub fn max_row_error(&self) -> f64 {
        (0..self.len()).map(|i| (self.row(i).map(|(_, p)| p).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// `log2 Z = log2 Σ_i S_i λ^i`, by a max-shifted log-sum over size classes.
pub fn partition_function(space: &StateSpace, log2_lambda: f64) -> f64 {
    log2_weighted_sum(&space.size_counts.counts, log2_lambda)
}

pub(crate) fn log2_weighted_sum(counts: &[u64], log2_lambda: f64) -> f64 {
    let terms: Vec<f64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (c as f64).log2() + i as f64 * log2_lambda)
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp2()).sum::<f64>().log2()
}

/// Gibbs vector `λ^{|M|} / Z`, renormalized after exponentiation.
pub fn gibbs(space: &StateSpace, log2_lambda: f64) -> DistVector {
    let log2_z = partition_function(space, log2_lambda);
    let mut probs: Vec<f64> = space.states.iter().map(|s| (s.size() as f64 * log2_lambda - log2_z).exp2()).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    DistVector { probs }
}

/// Exact Gibbs mass on the maximum matchings.
pub fn gibbs_max_mass(space: &StateSpace, log2_lambda: f64) -> f64 {
    let pi = gibbs(space, log2_lambda);
    space.maximum_states().map(|i| pi.probs[i]).sum()
}

/// Transition kernel: for every state and edge, weight `p_add/m` goes to the
/// add proposal (the state itself if invalid) and `p_remove/m` to the remove
/// proposal.
pub fn build_kernel(space: &StateSpace, log2_lambda: f64) -> Result<Kernel> {
    let g = &space.graph;
    let m = g.m();
    if m == 0 {
        return Err(Error::Param("the chain needs at least one edge".into()));
    }
    if !log2_lambda.is_finite() {
        return Err(Error::Param(format!("log2 lambda must be finite, got {log2_lambda}")));
    }
    let (p_remove, p_add) = fugacity_split(log2_lambda);
    let w_add = p_add / m as f64;
    let w_remove = p_remove / m as f64;

    let mut row_start = Vec::with_capacity(space.len() + 1);
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    let mut scratch: Vec<(usize, f64)> = Vec::with_capacity(2 * m);
    row_start.push(0);
    for (i, state) in space.states.iter().enumerate() {
        scratch.clear();
        let key = state.key();
        for e in 0..m {
            let toggled = || {
                let mut k = key.clone();
                k[e / 64] ^= 1 << (e % 64);
                space.index[&k]
            };
            let add_target = if state.contains(e) || !state.can_insert(g, e) { i } else { toggled() };
            let remove_target = if state.contains(e) { toggled() } else { i };
            scratch.push((add_target, w_add));
            scratch.push((remove_target, w_remove));
        }
        scratch.sort_by_key(|&(j, _)| j);
        let mut iter = scratch.iter().copied().peekable();
        while let Some((j, mut w)) = iter.next() {
            while let Some(&(j2, w2)) = iter.peek() {
                if j2 != j {
                    break;
                }
                w += w2;
                iter.next();
            }
            targets.push(j);
            weights.push(w);
        }
        row_start.push(targets.len());
    }
    Ok(Kernel { row_start, targets, weights })
}

/// `max |π_i P_ij − π_j P_ji|` over ordered pairs with a nonzero entry.
pub fn check_detailed_balance(kernel: &Kernel, dist: &DistVector) -> f64 {
    let pi = &dist.probs;
    let mut worst: f64 = 0.0;
    for i in 0..kernel.len() {
        for (j, p) in kernel.row(i) {
            worst = worst.max((pi[i] * p - pi[j] * kernel.entry(j, i)).abs());
        }
    }
    worst
}

/// `‖πP − π‖_∞`
pub fn check_stationary(kernel: &Kernel, dist: &DistVector) -> f64 {
    let next = kernel.apply(dist);
    next.probs.iter().zip(&dist.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ergodicity {
    pub irreducible: bool,
    pub aperiodic: bool,
}

/// Irreducibility by forward and backward reachability from state 0 over the
/// positive entries; aperiodicity by the period of that class (the gcd of
/// `level(i) + 1 − level(j)` over its edges, with BFS levels).
pub fn check_ergodic(kernel: &Kernel) -> Ergodicity {
    let n = kernel.len();
    let mut level = vec![usize::MAX; n];
    let mut queue = VecDeque::from([0usize]);
    level[0] = 0;
    while let Some(i) = queue.pop_front() {
        for (j, p) in kernel.row(i) {
            if p > 0.0 && level[j] == usize::MAX {
                level[j] = level[i] + 1;
                queue.push_back(j);
            }
        }
    }
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, p) in kernel.row(i) {
            if p > 0.0 {
                reverse[j].push(i);
            }
        }
    }
    let mut back = vec![false; n];
    back[0] = true;
    queue.push_back(0);
    while let Some(j) = queue.pop_front() {
        for &i in &reverse[j] {
            if !back[i] {
                back[i] = true;
                queue.push_back(i);
            }
        }
    }
    let irreducible = level.iter().all(|&l| l != usize::MAX) && back.iter().all(|&b| b);

    let mut period = 0usize;
    for i in (0..n).filter(|&i| level[i] != usize::MAX && back[i]) {
        for (j, p) in kernel.row(i) {
            if p > 0.0 && level[j] != usize::MAX && back[j] {
                period = gcd(period, (level[i] + 1).abs_diff(level[j]));
            }
        }
    }
    Ergodicity { irreducible, aperiodic: period == 1 }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Half the l1 distance.
pub fn tv_distance(a: &DistVector, b: &DistVector) -> f64 {
    tv_slices(&a.probs, &b.probs)
}

pub(crate) fn tv_slices(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "distributions over different spaces");
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `start · P^t`
pub fn evolve(kernel: &Kernel, start: &DistVector, t: usize) -> DistVector {
    let mut cur = start.probs.clone();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..t {
        kernel.apply_into(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    DistVector { probs: cur }
}

/// Mass on the maximum matchings.
pub fn max_mass(space: &StateSpace, dist: &DistVector) -> f64 {
    space.maximum_states().map(|i| dist.probs[i]).sum()
}
