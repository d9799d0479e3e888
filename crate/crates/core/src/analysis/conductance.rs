use serde::{Deserialize, Serialize};

use super::{log2_weighted_sum, partition_function, DistVector, Kernel, StateSpace};
use crate::chain::fugacity_split;
use crate::error::{Error, Result};

/// Largest space scanned exhaustively (2^(N-1) cuts).
pub const DEFAULT_CUT_CAP: usize = 22;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conductance {
    pub phi: f64,
    /// States on one side of a minimizing cut, ascending.
    pub argmin_cut: Vec<usize>,
}

/// `Σ_{i∈S, j∉S} π_i P_ij / (π(S) π(S̄))`. Both masses are summed directly.
pub fn conductance_of_cut(kernel: &Kernel, stationary: &DistVector, cut: &[usize]) -> Result<f64> {
    let n = kernel.len();
    let mut inside = vec![false; n];
    for &i in cut {
        if i >= n {
            return Err(Error::Param(format!("cut state {i} out of range")));
        }
        inside[i] = true;
    }
    let count = inside.iter().filter(|&&b| b).count();
    if count == 0 || count == n {
        return Err(Error::Param("cut must be a nonempty proper subset".into()));
    }
    let pi = &stationary.probs;
    let mut flow = 0.0;
    let (mut mass_in, mut mass_out) = (0.0, 0.0);
    for i in 0..n {
        if inside[i] {
            mass_in += pi[i];
            flow += kernel.row(i).filter(|&(j, _)| !inside[j]).map(|(_, p)| pi[i] * p).sum::<f64>();
        } else {
            mass_out += pi[i];
        }
    }
    Ok(flow / (mass_in * mass_out))
}

/// Exhaustive minimum over cuts. The ratio is symmetric under complement
/// (stationary flow across a cut is the same in both directions), so the last
/// state is pinned outside `S` and the remaining subsets are walked in Gray
/// code order with O(N) updates per cut.
pub fn conductance_exact(kernel: &Kernel, stationary: &DistVector, cut_cap: usize) -> Result<Conductance> {
    let n = kernel.len();
    if n > cut_cap {
        return Err(Error::Capacity {
            what: "conductance cut scan (use conductance_of_cut)",
            cap: cut_cap,
            partial: n,
        });
    }
    if n < 2 {
        return Err(Error::Param("conductance needs at least two states".into()));
    }
    if n > 63 {
        return Err(Error::Param("exhaustive cut scan limited to 63 states".into()));
    }
    let pi = &stationary.probs;
    // q[i][j] = π_i P_ij off the diagonal
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        for (j, p) in kernel.row(i) {
            if j != i {
                row[j] = pi[i] * p;
            }
        }
    }
    let full: u64 = (1u64 << n) - 1;
    let sum_over = |v: usize, mask: u64, outgoing: bool| -> f64 {
        (0..n).filter(|&j| mask >> j & 1 == 1).map(|j| if outgoing { q[v][j] } else { q[j][v] }).sum()
    };
    let recompute = |s: u64| -> (f64, f64) {
        let mut flow = 0.0;
        let mut mass = 0.0;
        for i in (0..n).filter(|&i| s >> i & 1 == 1) {
            mass += pi[i];
            flow += sum_over(i, full ^ s, true);
        }
        (flow, mass)
    };

    let mut best = (f64::INFINITY, 0u64);
    let (mut s, mut flow, mut mass) = (0u64, 0.0, 0.0);
    let cuts: u64 = 1u64 << (n - 1);
    for g in 1..cuts {
        let v = g.trailing_zeros() as usize;
        let bit = 1u64 << v;
        if s & bit == 0 {
            flow += sum_over(v, full ^ s ^ bit, true) - sum_over(v, s, false);
            mass += pi[v];
        } else {
            flow -= sum_over(v, full ^ s, true) - sum_over(v, s ^ bit, false);
            mass -= pi[v];
        }
        s ^= bit;
        if g % 1024 == 0 {
            (flow, mass) = recompute(s);
        }
        let denom = mass * (1.0 - mass);
        if denom > 0.0 {
            let ratio = flow / denom;
            if ratio < best.0 || (ratio == best.0 && s < best.1) {
                best = (ratio, s);
            }
        }
    }
    if best.1 == 0 {
        return Err(Error::Invariant("no cut with positive stationary mass on both sides".into()));
    }
    let argmin_cut: Vec<usize> = (0..n).filter(|&i| best.1 >> i & 1 == 1).collect();
    let phi = conductance_of_cut(kernel, stationary, &argmin_cut)?;
    Ok(Conductance { phi, argmin_cut })
}

/// The single-state cut at the lowest-index maximum matching, evaluated two
/// ways: directly from the kernel, and by the closed form
/// `k/((1+λ) m) · 1/(1 − λ^k/Z)` with `1 − λ^k/Z` computed from the size
/// counts with one maximum matching removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxMatchingCut {
    pub state: usize,
    pub phi_direct: f64,
    pub phi_closed_form: f64,
}

pub fn max_matching_cut(
    space: &StateSpace,
    kernel: &Kernel,
    stationary: &DistVector,
    log2_lambda: f64,
) -> Result<MaxMatchingCut> {
    if space.len() < 2 {
        return Err(Error::Param("cut needs at least two states".into()));
    }
    let state = space.maximum_states().next().expect("a maximum matching exists");
    let phi_direct = conductance_of_cut(kernel, stationary, &[state])?;

    let sc = space.size_counts();
    let (k, m) = (sc.k as f64, space.graph().m() as f64);
    let mut rest = sc.counts.clone();
    rest[sc.k] -= 1;
    let log2_z = partition_function(space, log2_lambda);
    let outside = (log2_weighted_sum(&rest, log2_lambda) - log2_z).exp2();
    let (p_remove, _) = fugacity_split(log2_lambda);
    let phi_closed_form = k * p_remove / m / outside;
    Ok(MaxMatchingCut { state, phi_direct, phi_closed_form })
}
