//! Exact maximum-cardinality matching, used as the reference answer for the
//! randomized solver. General graphs go through branch-and-bound (exponential
//! in the worst case, fine up to a few dozen vertices); bipartite graphs take
//! an augmenting-path route.

use std::collections::VecDeque;

use crate::graph::{EdgeId, Graph, VertexId};
use crate::matching::Matching;

/// Size of a maximum matching together with one witness.
pub fn exact_max_matching(g: &Graph) -> (usize, Matching) {
    match g.bipartition() {
        Some(side) => max_matching_bipartite(g, &side),
        None => max_matching_branch_bound(g),
    }
}

/// Augmenting-path search from every free left vertex (BFS over alternating
/// paths). `side[v] == false` marks the left side.
pub fn max_matching_bipartite(g: &Graph, side: &[bool]) -> (usize, Matching) {
    let n = g.n();
    let mut m = Matching::empty(g);
    let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut visited = vec![usize::MAX; n];
    let mut queue = VecDeque::new();

    for root in (0..n).filter(|&v| !side[v]) {
        if m.mate_edge(root).is_some() {
            continue;
        }
        queue.clear();
        queue.push_back(root);
        visited[root] = root;
        let mut end = None;
        'bfs: while let Some(left) = queue.pop_front() {
            for &e in g.incident(left) {
                let (a, b) = g.endpoints(e);
                let right = if a == left { b } else { a };
                if visited[right] == root {
                    continue;
                }
                visited[right] = root;
                parent[right] = Some((left, e));
                match m.mate_edge(right) {
                    None => {
                        end = Some(right);
                        break 'bfs;
                    }
                    Some(me) => {
                        let (x, y) = g.endpoints(me);
                        let next = if x == right { y } else { x };
                        if visited[next] != root {
                            visited[next] = root;
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        // Flip the alternating path ending at a free right vertex.
        let mut cursor = end;
        while let Some(right) = cursor {
            let (left, e) = parent[right].unwrap();
            let displaced = m.mate_edge(left);
            if let Some(old) = displaced {
                m.remove(g, old);
            }
            m.insert(g, e);
            cursor = displaced.map(|old| {
                let (x, y) = g.endpoints(old);
                if x == left {
                    y
                } else {
                    x
                }
            });
        }
    }
    (m.size(), m)
}

/// Branch-and-bound over the edges at the lowest undecided vertex: match it
/// to each free neighbour in turn, or leave it unmatched. Bounded below by a
/// greedy maximal matching and above by half the free vertices that still
/// have a free neighbour.
pub fn max_matching_branch_bound(g: &Graph) -> (usize, Matching) {
    let mut greedy = Matching::empty(g);
    for e in 0..g.m() {
        greedy.try_insert(g, e);
    }
    let mut search = Search { g, blocked: vec![false; g.n()], chosen: Vec::new(), best: greedy.edges().collect() };
    search.run(0);
    let witness = Matching::from_edges(g, &search.best).expect("search keeps a valid matching");
    (witness.size(), witness)
}

struct Search<'a> {
    g: &'a Graph,
    // matched or deliberately left unmatched
    blocked: Vec<bool>,
    chosen: Vec<EdgeId>,
    best: Vec<EdgeId>,
}

impl Search<'_> {
    fn other(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.g.endpoints(e);
        if a == v {
            b
        } else {
            a
        }
    }

    fn has_free_neighbour(&self, v: VertexId) -> bool {
        self.g.incident(v).iter().any(|&e| !self.blocked[self.other(e, v)])
    }

    fn run(&mut self, from: VertexId) {
        let n = self.g.n();
        let pivot = (from..n).find(|&v| !self.blocked[v] && self.has_free_neighbour(v));
        let Some(v) = pivot else {
            if self.chosen.len() > self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        };
        let live = (v..n).filter(|&u| !self.blocked[u] && self.has_free_neighbour(u)).count();
        if self.chosen.len() + live / 2 <= self.best.len() {
            return;
        }

        self.blocked[v] = true;
        for i in 0..self.g.incident(v).len() {
            let e = self.g.incident(v)[i];
            let u = self.other(e, v);
            if self.blocked[u] {
                continue;
            }
            self.blocked[u] = true;
            self.chosen.push(e);
            self.run(v + 1);
            self.chosen.pop();
            self.blocked[u] = false;
        }
        // v stays unmatched
        self.run(v + 1);
        self.blocked[v] = false;
    }
}
