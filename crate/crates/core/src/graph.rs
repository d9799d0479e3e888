//! Simple undirected graphs in canonical form, deterministic generators for
//! the test families, and the plain-text edge-list format.
//!
//! Canonical form: every edge is stored as `(u, v)` with `u < v`, and the edge
//! sequence is sorted lexicographically. Edge ids are positions in that
//! sequence, so two graphs with the same edge set always agree on ids.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Retries per permutation round in the bipartite regular generator.
pub const BIPARTITE_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    incidence: Vec<Vec<EdgeId>>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list. Endpoints are reordered to
    /// `u < v` and the list is sorted; self-loops, duplicates and out-of-range
    /// endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("graph needs at least one vertex".into()));
        }
        let mut list: Vec<(VertexId, VertexId)> = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Param(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::Param(format!("self-loop at vertex {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Param(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_canonical(n, list))
    }

    fn from_canonical(n: usize, edges: Vec<(VertexId, VertexId)>) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            incidence[u].push(id);
            incidence[v].push(id);
        }
        Graph { n, edges, incidence }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v].len()
    }

    /// Id of the edge joining `a` and `b`, if present.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    /// Checks every structural invariant. Used by tests and by the CLI before
    /// reporting an internal failure.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invariant("empty vertex set".into()));
        }
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            if u >= v || v >= self.n {
                return Err(Error::Invariant(format!("edge {id} = ({u}, {v}) not canonical")));
            }
            if id > 0 && self.edges[id - 1] >= (u, v) {
                return Err(Error::Invariant(format!("edge {id} out of order or duplicated")));
            }
        }
        if self.incidence.len() != self.n {
            return Err(Error::Invariant("incidence length differs from n".into()));
        }
        let mut seen = 0usize;
        for (v, list) in self.incidence.iter().enumerate() {
            for &e in list {
                let (a, b) =
                    *self.edges.get(e).ok_or_else(|| Error::Invariant(format!("vertex {v} lists unknown edge {e}")))?;
                if a != v && b != v {
                    return Err(Error::Invariant(format!("vertex {v} lists non-incident edge {e}")));
                }
            }
            seen += list.len();
        }
        if seen != 2 * self.edges.len() {
            return Err(Error::Invariant("incidence lists do not cover each edge twice".into()));
        }
        Ok(())
    }

    /// Two-colouring of the vertices if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        let mut stack = Vec::new();
        for root in 0..self.n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(false);
            stack.push(root);
            while let Some(v) = stack.pop() {
                let c = color[v].unwrap();
                for &e in &self.incidence[v] {
                    let (a, b) = self.edges[e];
                    let w = if a == v { b } else { a };
                    match color[w] {
                        None => {
                            color[w] = Some(!c);
                            stack.push(w);
                        }
                        Some(cw) if cw == c => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap_or(false)).collect())
    }
}

/// Generator families. `n` is the vertex count, except for
/// `BipartiteRegular` where it is the size of each side (2n vertices total).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    Path,
    Cycle,
    Star,
    Complete,
    Gnp { p: f64 },
    BipartiteRegular { d: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Star => "star",
            Family::Complete => "complete",
            Family::Gnp { .. } => "gnp",
            Family::BipartiteRegular { .. } => "bipartite_regular",
        }
    }
}

/// Deterministic generator: the output depends only on the arguments.
/// `seed` is ignored by the non-random families.
pub fn generate(family: Family, n: usize, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Param("n must be at least 1".into()));
    }
    let edges: Vec<(VertexId, VertexId)> = match family {
        Family::Path => (1..n).map(|v| (v - 1, v)).collect(),
        Family::Cycle => {
            if n < 3 {
                return Err(Error::Param("cycle needs n >= 3".into()));
            }
            let mut e: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            e.push((0, n - 1));
            e
        }
        Family::Star => (1..n).map(|v| (0, v)).collect(),
        Family::Complete => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        Family::Gnp { p } => gnp_edges(n, p, seed)?,
        Family::BipartiteRegular { d } => return bipartite_regular(n, d, seed),
    };
    Graph::new(n, edges)
}

/// G(n, p) by geometric skipping over the lexicographic pair sequence, so the
/// cost is proportional to the number of edges produced rather than n^2.
fn gnp_edges(n: usize, p: f64, seed: u64) -> Result<Vec<(VertexId, VertexId)>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Param(format!("gnp needs p in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(Vec::new());
    }
    if p == 1.0 {
        return Ok((0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    // (w, v) walks pairs w < v in order v = 1, 2, ...; w = 0..v.
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w += 1 + if skip.is_finite() { skip.min(1e15) as i64 } else { i64::MAX / 4 };
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Ok(edges)
}

fn bipartite_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d > n {
        return Err(Error::Param(format!("{d}-regular bipartite graph needs d <= n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(n * d);
    let mut edges = Vec::with_capacity(n * d);
    let mut perm: Vec<usize> = (0..n).collect();
    for round in 0..d {
        let mut placed = false;
        for _ in 0..BIPARTITE_RETRIES {
            perm.shuffle(&mut rng);
            if perm.iter().enumerate().all(|(l, &r)| !present.contains(&(l, r))) {
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Param(format!(
                "bipartite_regular(n = {n}, d = {d}): round {round} rejected {BIPARTITE_RETRIES} permutations"
            )));
        }
        for (l, &r) in perm.iter().enumerate() {
            present.insert((l, r));
            edges.push((l, n + r));
        }
    }
    Graph::new(2 * n, edges)
}

/// Parses the edge-list text format: optional `#` comment lines, a header
/// `n m`, then exactly `m` lines `u v`. Blank lines are ignored.
pub fn read_graph(text: &str) -> Result<Graph> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "missing header line \"n m\"".into() })?;
    let (n, m) = parse_pair(hline, header)?;
    if n == 0 {
        return Err(Error::Parse { line: hline, msg: "n must be at least 1".into() });
    }

    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, body) = lines.next().ok_or(Error::Parse {
            line: hline,
            msg: format!("header declares {m} edges but only {} found", edges.len()),
        })?;
        let (u, v) = parse_pair(line, body)?;
        if u >= n || v >= n {
            return Err(Error::Parse { line, msg: format!("endpoint out of range for n = {n}") });
        }
        if u == v {
            return Err(Error::Parse { line, msg: format!("self-loop at vertex {u}") });
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(Error::Parse { line, msg: format!("duplicate edge ({}, {})", key.0, key.1) });
        }
        edges.push(key);
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse { line, msg: format!("more than the declared {m} edges") });
    }
    Graph::new(n, edges)
}

fn parse_pair(line: usize, body: &str) -> Result<(usize, usize)> {
    let mut it = body.split_whitespace();
    let mut next = |name: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse { line, msg: format!("missing {name}") })?;
        tok.parse::<usize>()
            .map_err(|_| Error::Parse { line, msg: format!("{name} is not a non-negative integer: {tok:?}") })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(Error::Parse { line, msg: "expected exactly two fields".into() });
    }
    Ok((a, b))
}

/// Canonical text: header, then edges sorted with `u < v`, no comments.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.m());
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
