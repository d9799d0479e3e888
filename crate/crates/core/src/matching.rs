//! Partial matchings: per-edge membership plus a per-vertex occupancy index,
//! so membership tests, insertion and removal are all constant time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};

const UNMATCHED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    in_set: Vec<bool>,
    occupancy: Vec<usize>,
    size: usize,
}

/// Wire form: `{"edges":[ids...], "size":k}` with ids ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingJson {
    pub edges: Vec<EdgeId>,
    pub size: usize,
}

impl Matching {
    pub fn empty(g: &Graph) -> Self {
        Matching { in_set: vec![false; g.m()], occupancy: vec![UNMATCHED; g.n()], size: 0 }
    }

    pub fn from_edges(g: &Graph, edges: &[EdgeId]) -> Result<Self> {
        let mut m = Self::empty(g);
        for &e in edges {
            if e >= g.m() {
                return Err(Error::Param(format!("edge id {e} out of range (m = {})", g.m())));
            }
            if !m.try_insert(g, e) && !m.contains(e) {
                return Err(Error::Param(format!("edge {e} conflicts with the matching")));
            }
        }
        Ok(m)
    }

    pub fn from_json(g: &Graph, json: &MatchingJson) -> Result<Self> {
        let m = Self::from_edges(g, &json.edges)?;
        if m.size != json.size {
            return Err(Error::Param(format!("declared size {} but {} distinct edges given", json.size, m.size)));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> MatchingJson {
        MatchingJson { edges: self.edges().collect(), size: self.size }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        self.in_set[e]
    }

    /// Member edge ids in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.in_set.iter().enumerate().filter_map(|(e, &b)| b.then_some(e))
    }

    /// The matching edge covering `v`, if any.
    pub fn mate_edge(&self, v: VertexId) -> Option<EdgeId> {
        let e = self.occupancy[v];
        (e != UNMATCHED).then_some(e)
    }

    /// True if `e` is already a member or both its endpoints are free.
    #[inline]
    pub fn can_insert(&self, g: &Graph, e: EdgeId) -> bool {
        if self.in_set[e] {
            return true;
        }
        let (u, v) = g.endpoints(e);
        self.occupancy[u] == UNMATCHED && self.occupancy[v] == UNMATCHED
    }

    /// Adds `e` if its endpoints are free. Returns whether the matching changed.
    #[inline]
    pub fn try_insert(&mut self, g: &Graph, e: EdgeId) -> bool {
        self.try_insert_at(e, g.endpoints(e))
    }

    /// [`Matching::try_insert`] with the endpoints of `e` already looked up.
    #[inline]
    pub(crate) fn try_insert_at(&mut self, e: EdgeId, (u, v): (VertexId, VertexId)) -> bool {
        if self.in_set[e] {
            return false;
        }
        if self.occupancy[u] != UNMATCHED || self.occupancy[v] != UNMATCHED {
            return false;
        }
        self.in_set[e] = true;
        self.occupancy[u] = e;
        self.occupancy[v] = e;
        self.size += 1;
        true
    }

    /// Set insertion. Re-inserting a member is a no-op.
    ///
    /// Panics if `e` shares an endpoint with a member edge; gate on
    /// [`Matching::can_insert`].
    pub fn insert(&mut self, g: &Graph, e: EdgeId) {
        assert!(self.can_insert(g, e), "insert of edge {e} conflicts with the matching");
        self.try_insert(g, e);
    }

    /// Set removal; removing an absent edge is a no-op. Returns whether the
    /// matching changed.
    #[inline]
    pub fn remove(&mut self, g: &Graph, e: EdgeId) -> bool {
        self.remove_at(e, g.endpoints(e))
    }

    #[inline]
    pub(crate) fn remove_at(&mut self, e: EdgeId, (u, v): (VertexId, VertexId)) -> bool {
        if !self.in_set[e] {
            return false;
        }
        self.in_set[e] = false;
        self.occupancy[u] = UNMATCHED;
        self.occupancy[v] = UNMATCHED;
        self.size -= 1;
        true
    }

    /// No edge of `g` can be added.
    pub fn is_maximal(&self, g: &Graph) -> bool {
        (0..g.m()).all(|e| self.in_set[e] || !self.can_insert(g, e))
    }

    /// Packed membership bits; equal keys iff equal matchings on one graph.
    pub fn key(&self) -> Vec<u64> {
        let mut key = vec![0u64; self.in_set.len().div_ceil(64)];
        for e in self.edges() {
            key[e / 64] |= 1 << (e % 64);
        }
        key
    }

    /// Checks that occupancy is exactly the inverse of the membership flags
    /// and that no two members share a vertex.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.in_set.len() != g.m() || self.occupancy.len() != g.n() {
            return Err(Error::Invariant("matching dimensions differ from graph".into()));
        }
        let mut expect = vec![UNMATCHED; g.n()];
        let mut count = 0;
        for e in self.edges() {
            let (u, v) = g.endpoints(e);
            if expect[u] != UNMATCHED || expect[v] != UNMATCHED {
                return Err(Error::Invariant(format!("edge {e} shares a vertex with another member")));
            }
            expect[u] = e;
            expect[v] = e;
            count += 1;
        }
        if expect != self.occupancy {
            return Err(Error::Invariant("occupancy is not the inverse of membership".into()));
        }
        if count != self.size {
            return Err(Error::Invariant(format!("cached size {} but {count} members", self.size)));
        }
        Ok(())
    }

    /// Debug-only O(1) consistency check around one edge.
    #[inline]
    pub(crate) fn debug_check_edge(&self, g: &Graph, e: EdgeId) {
        if cfg!(debug_assertions) {
            let (u, v) = g.endpoints(e);
            if self.in_set[e] {
                debug_assert!(self.occupancy[u] == e && self.occupancy[v] == e);
            } else {
                debug_assert!(self.occupancy[u] != e && self.occupancy[v] != e);
            }
        }
    }
}

/// Size of the symmetric difference: edges present in exactly one matching.
///
/// Panics if the two matchings belong to graphs with different edge counts.
pub fn phi(a: &Matching, b: &Matching) -> usize {
    assert_eq!(a.in_set.len(), b.in_set.len(), "matchings from different graphs");
    a.in_set.iter().zip(&b.in_set).filter(|(x, y)| x != y).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    fn path(n: usize) -> Graph {
        generate(Family::Path, n, 0).unwrap()
    }

    // Edge names below follow the 1-based convention e1 = id 0, e2 = id 1, ...

    #[test]
    fn can_insert_cases() {
        let p3 = path(3);
        let m = Matching::from_edges(&p3, &[0]).unwrap();
        assert!(m.can_insert(&p3, 0));
        assert!(!m.can_insert(&p3, 1));

        let p4 = path(4);
        let m = Matching::from_edges(&p4, &[0]).unwrap();
        assert!(m.can_insert(&p4, 2));
    }

    #[test]
    fn insert_remove_semantics() {
        let p3 = path(3);
        let mut m = Matching::empty(&p3);
        m.insert(&p3, 0);
        assert_eq!(m.edges().collect::<Vec<_>>(), vec![0]);
        m.insert(&p3, 0);
        assert_eq!(m.size(), 1);
        assert!(!m.remove(&p3, 1));
        assert_eq!(m.size(), 1);
        assert!(m.remove(&p3, 0));
        assert_eq!(m, Matching::empty(&p3));
        m.validate(&p3).unwrap();
    }

    #[test]
    #[should_panic(expected = "conflicts")]
    fn conflicting_insert_panics() {
        let p3 = path(3);
        let mut m = Matching::from_edges(&p3, &[0]).unwrap();
        m.insert(&p3, 1);
    }

    #[test]
    fn phi_examples() {
        let p3 = path(3);
        let a = Matching::from_edges(&p3, &[0]).unwrap();
        let b = Matching::from_edges(&p3, &[1]).unwrap();
        assert_eq!(phi(&a, &b), 2);
        assert_eq!(phi(&a, &a), 0);

        let p4 = path(4);
        let a = Matching::from_edges(&p4, &[0, 2]).unwrap();
        let b = Matching::from_edges(&p4, &[1]).unwrap();
        assert_eq!(phi(&a, &b), 3);
    }

    #[test]
    fn json_shape() {
        let p4 = path(4);
        let m = Matching::from_edges(&p4, &[2, 0]).unwrap();
        let text = serde_json::to_string(&m.to_json()).unwrap();
        assert_eq!(text, r#"{"edges":[0,2],"size":2}"#);
        let back: MatchingJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Matching::from_json(&p4, &back).unwrap(), m);
        let bad = MatchingJson { edges: vec![0, 1], size: 2 };
        assert!(Matching::from_json(&p4, &bad).is_err());
    }

    #[test]
    fn maximality() {
        let p4 = path(4);
        assert!(Matching::from_edges(&p4, &[1]).unwrap().is_maximal(&p4));
        assert!(!Matching::from_edges(&p4, &[0]).unwrap().is_maximal(&p4));
    }
}
