//! Exhaustive enumeration of the matching state space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matching::Matching;

pub const DEFAULT_STATE_CAP: usize = 200_000;

/// Matching counts by size: `counts[i]` is the number of matchings with `i`
/// edges, up to the maximum matching size `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCounts {
    pub counts: Vec<u64>,
    pub k: usize,
}

impl SizeCounts {
    pub fn from_sizes(sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = vec![0u64];
        for s in sizes {
            if s >= counts.len() {
                counts.resize(s + 1, 0);
            }
            counts[s] += 1;
        }
        let k = counts.len() - 1;
        SizeCounts { counts, k }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Largest class size, `max_i S_i`.
    pub fn largest(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

/// All matchings of `g` (the empty one included), each once, ordered
/// lexicographically by their ascending edge-id tuples.
pub fn enumerate_matchings(g: &Graph, cap: usize) -> Result<Vec<Matching>> {
    if cap == 0 {
        return Err(Error::Param("state cap must be positive".into()));
    }
    let mut out = Vec::new();
    let mut current = Matching::empty(g);
    extend(g, &mut current, 0, cap, &mut out)?;
    Ok(out)
}

// Pre-order DFS where each branch only adds edges with larger ids yields the
// lexicographic order directly.
fn extend(g: &Graph, current: &mut Matching, from: usize, cap: usize, out: &mut Vec<Matching>) -> Result<()> {
    if out.len() == cap {
        return Err(Error::Capacity { what: "matching state space", cap, partial: out.len() });
    }
    out.push(current.clone());
    for e in from..g.m() {
        if current.try_insert(g, e) {
            extend(g, current, e + 1, cap, out)?;
            current.remove(g, e);
        }
    }
    Ok(())
}

pub fn size_counts(g: &Graph, cap: usize) -> Result<SizeCounts> {
    Ok(SizeCounts::from_sizes(enumerate_matchings(g, cap)?.iter().map(Matching::size)))
}
