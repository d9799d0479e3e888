//! Coupled pairs of chains.
//!
//! Two couplings are provided:
//!
//! * [`CouplingVariant::PaperFaithful`]: draw an edge `e`. If `e` can be
//!   inserted in both matchings (membership counts as insertable), one shared
//!   coin adds it to both or removes it from both. If it can be inserted in
//!   exactly one and belongs to exactly one, it is removed from that one with
//!   probability 1. Otherwise nothing moves. Distance contracts by exactly
//!   `1 − 1/m` in expectation, but the coordinates do not follow the chain.
//! * [`CouplingVariant::Synchronous`]: both sides apply the ordinary update
//!   with the same edge and the same coin. Each side is exactly the chain, but
//!   the contraction fails in general.
//!
//! Everything asserted about the couplings is computed from the exact one-step
//! joint law ([`exact_joint`]), which has at most `2m` atoms.

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{Kernel, StateSpace};
use crate::chain::fugacity_split;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::matching::{phi, Matching};

pub const DEFAULT_PAIR_CAP: usize = 1_000_000;

/// Tolerance used to flag contraction violations.
pub const CONTRACTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingVariant {
    PaperFaithful,
    Synchronous,
}

impl std::str::FromStr for CouplingVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "paper_faithful" => Ok(CouplingVariant::PaperFaithful),
            "b" | "synchronous" => Ok(CouplingVariant::Synchronous),
            _ => Err(Error::Param(format!("unknown coupling variant {s:?} (expected a or b)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoupledPair {
    pub first: Matching,
    pub second: Matching,
    pub phi: usize,
}

impl CoupledPair {
    pub fn new(first: Matching, second: Matching) -> Self {
        let phi = phi(&first, &second);
        CoupledPair { first, second, phi }
    }

    pub fn is_coalesced(&self) -> bool {
        self.phi == 0
    }
}

/// Deterministic part of one coupled transition: edge `e` and coin outcome
/// already chosen.
fn apply(g: &Graph, variant: CouplingVariant, a: &mut Matching, b: &mut Matching, e: EdgeId, remove: bool) {
    match variant {
        CouplingVariant::PaperFaithful => {
            let (ins_a, ins_b) = (a.can_insert(g, e), b.can_insert(g, e));
            if ins_a && ins_b {
                if remove {
                    a.remove(g, e);
                    b.remove(g, e);
                } else {
                    a.try_insert(g, e);
                    b.try_insert(g, e);
                }
            } else if ins_a != ins_b {
                match (a.contains(e), b.contains(e)) {
                    (true, false) => {
                        a.remove(g, e);
                    }
                    (false, true) => {
                        b.remove(g, e);
                    }
                    _ => {}
                }
            }
        }
        CouplingVariant::Synchronous => {
            for side in [a, b] {
                if remove {
                    side.remove(g, e);
                } else {
                    side.try_insert(g, e);
                }
            }
        }
    }
}

/// A coupling bound to one graph and fugacity.
#[derive(Debug, Clone)]
pub struct Coupling<'g> {
    graph: &'g Graph,
    variant: CouplingVariant,
    p_remove: f64,
    p_add: f64,
    remove_coin: Bernoulli,
}

impl<'g> Coupling<'g> {
    pub fn new(graph: &'g Graph, variant: CouplingVariant, log2_lambda: f64) -> Result<Self> {
        if graph.m() == 0 {
            return Err(Error::Param("coupling needs at least one edge".into()));
        }
        if !log2_lambda.is_finite() {
            return Err(Error::Param(format!("log2 lambda must be finite, got {log2_lambda}")));
        }
        let (p_remove, p_add) = fugacity_split(log2_lambda);
        let remove_coin = Bernoulli::new(p_remove).map_err(|e| Error::Param(e.to_string()))?;
        Ok(Coupling { graph, variant, p_remove, p_add, remove_coin })
    }

    pub fn variant(&self) -> CouplingVariant {
        self.variant
    }

    /// One coupled transition. Draws the edge and then the coin, like the
    /// single chain, whether or not the coin ends up mattering.
    pub fn step<R: Rng + ?Sized>(&self, pair: &CoupledPair, rng: &mut R) -> CoupledPair {
        let e = rng.random_range(0..self.graph.m());
        let remove = self.remove_coin.sample(rng);
        let (mut a, mut b) = (pair.first.clone(), pair.second.clone());
        apply(self.graph, self.variant, &mut a, &mut b, e, remove);
        CoupledPair::new(a, b)
    }

    /// Exact law of the successor pair, merged by outcome.
    pub fn exact_joint(&self, pair: &CoupledPair) -> Vec<(CoupledPair, f64)> {
        let m = self.graph.m() as f64;
        let mut atoms: Vec<(CoupledPair, f64)> = Vec::with_capacity(2 * self.graph.m());
        for e in 0..self.graph.m() {
            for (remove, w) in [(false, self.p_add), (true, self.p_remove)] {
                if w == 0.0 {
                    continue;
                }
                let (mut a, mut b) = (pair.first.clone(), pair.second.clone());
                apply(self.graph, self.variant, &mut a, &mut b, e, remove);
                let next = CoupledPair::new(a, b);
                match atoms.iter_mut().find(|(p, _)| *p == next) {
                    Some((_, acc)) => *acc += w / m,
                    None => atoms.push((next, w / m)),
                }
            }
        }
        atoms
    }

    pub fn expected_phi(&self, pair: &CoupledPair) -> f64 {
        self.exact_joint(pair).iter().map(|(p, w)| w * p.phi as f64).sum()
    }

    /// Runs until the pair coalesces or `cap` steps have elapsed.
    pub fn simulate<R: Rng + ?Sized>(&self, pair: &CoupledPair, cap: u64, rng: &mut R) -> Coalescence {
        let mut cur = pair.clone();
        let mut steps = 0;
        while !cur.is_coalesced() {
            if steps == cap {
                return Coalescence { steps, censored: true };
            }
            cur = self.step(&cur, rng);
            steps += 1;
        }
        Coalescence { steps, censored: false }
    }
}

pub fn coupled_step<R: Rng + ?Sized>(
    g: &Graph,
    pair: &CoupledPair,
    variant: CouplingVariant,
    log2_lambda: f64,
    rng: &mut R,
) -> Result<CoupledPair> {
    Ok(Coupling::new(g, variant, log2_lambda)?.step(pair, rng))
}

pub fn exact_joint(
    g: &Graph,
    pair: &CoupledPair,
    variant: CouplingVariant,
    log2_lambda: f64,
) -> Result<Vec<(CoupledPair, f64)>> {
    Ok(Coupling::new(g, variant, log2_lambda)?.exact_joint(pair))
}

pub fn expected_phi(g: &Graph, pair: &CoupledPair, variant: CouplingVariant, log2_lambda: f64) -> Result<f64> {
    Ok(Coupling::new(g, variant, log2_lambda)?.expected_phi(pair))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coalescence {
    pub steps: u64,
    /// The cap was reached before the pair met.
    pub censored: bool,
}

pub fn coupled_simulation<R: Rng + ?Sized>(
    g: &Graph,
    pair: &CoupledPair,
    variant: CouplingVariant,
    log2_lambda: f64,
    cap: u64,
    rng: &mut R,
) -> Result<Coalescence> {
    Ok(Coupling::new(g, variant, log2_lambda)?.simulate(pair, cap, rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionRecord {
    pub first: usize,
    pub second: usize,
    pub phi_before: usize,
    pub expected_phi_after: f64,
    /// `(1 − 1/m) · phi_before`
    pub bound: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub variant: CouplingVariant,
    pub beta: f64,
    pub records: Vec<ContractionRecord>,
    pub violations: usize,
    /// Largest `expected_phi_after − bound` over all pairs.
    pub max_excess: f64,
    /// Largest `|expected_phi_after − bound|`; zero when the contraction
    /// holds with equality everywhere.
    pub max_identity_gap: f64,
}

fn check_pair_cap(space: &StateSpace, pair_cap: usize) -> Result<()> {
    let pairs = space.len().saturating_mul(space.len());
    if pairs > pair_cap {
        return Err(Error::Capacity { what: "state pairs", cap: pair_cap, partial: pairs });
    }
    Ok(())
}

fn pair_of(space: &StateSpace, i: usize, j: usize) -> CoupledPair {
    CoupledPair::new(space.state(i).clone(), space.state(j).clone())
}

/// Exact expected distance after one coupled step, for every ordered pair.
pub fn contraction_sweep(
    space: &StateSpace,
    variant: CouplingVariant,
    log2_lambda: f64,
    pair_cap: usize,
) -> Result<ContractionReport> {
    check_pair_cap(space, pair_cap)?;
    let coupling = Coupling::new(space.graph(), variant, log2_lambda)?;
    let beta = 1.0 - 1.0 / space.graph().m() as f64;
    let n = space.len();
    let records: Vec<ContractionRecord> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let coupling = &coupling;
            (0..n).map(move |j| {
                let pair = pair_of(space, i, j);
                let after = coupling.expected_phi(&pair);
                let bound = beta * pair.phi as f64;
                ContractionRecord {
                    first: i,
                    second: j,
                    phi_before: pair.phi,
                    expected_phi_after: after,
                    bound,
                    violation: after > bound + CONTRACTION_TOL,
                }
            })
        })
        .collect();
    let violations = records.iter().filter(|r| r.violation).count();
    let max_excess = records.iter().map(|r| r.expected_phi_after - r.bound).fold(f64::NEG_INFINITY, f64::max);
    let max_identity_gap = records.iter().map(|r| (r.expected_phi_after - r.bound).abs()).fold(0.0, f64::max);
    Ok(ContractionReport { variant, beta, records, violations, max_excess, max_identity_gap })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn name(&self) -> &'static str {
        match self {
            Side::First => "first",
            Side::Second => "second",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalRecord {
    pub first: usize,
    pub second: usize,
    pub tv_first: f64,
    pub tv_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    pub variant: CouplingVariant,
    pub records: Vec<MarginalRecord>,
    pub max_tv: f64,
    /// `(first, second, side)` of the largest deviation; ties go to the
    /// lexicographically smallest pair, then the first side.
    pub witness: (usize, usize, Side),
}

impl MarginalReport {
    pub fn record(&self, first: usize, second: usize) -> Option<&MarginalRecord> {
        self.records.iter().find(|r| r.first == first && r.second == second)
    }
}

/// Total variation between each coordinate's one-step law under the coupling
/// and the kernel row of that coordinate's state.
pub fn marginal_deviation(
    space: &StateSpace,
    kernel: &Kernel,
    variant: CouplingVariant,
    log2_lambda: f64,
    pair_cap: usize,
) -> Result<MarginalReport> {
    check_pair_cap(space, pair_cap)?;
    if kernel.len() != space.len() {
        return Err(Error::Param("kernel does not match the state space".into()));
    }
    let coupling = Coupling::new(space.graph(), variant, log2_lambda)?;
    let n = space.len();
    let records: Vec<MarginalRecord> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let coupling = &coupling;
            (0..n).map(move |j| {
                let joint = coupling.exact_joint(&pair_of(space, i, j));
                let side_tv = |state: usize, pick: fn(&CoupledPair) -> &Matching| {
                    // sparse difference: marginal minus kernel row
                    let mut diff: Vec<(usize, f64)> = kernel.row(state).map(|(t, p)| (t, -p)).collect();
                    for (p, w) in &joint {
                        let t = space.index_of(pick(p)).expect("successor is a matching of the graph");
                        match diff.iter_mut().find(|(s, _)| *s == t) {
                            Some((_, d)) => *d += w,
                            None => diff.push((t, *w)),
                        }
                    }
                    0.5 * diff.iter().map(|(_, d)| d.abs()).sum::<f64>()
                };
                MarginalRecord {
                    first: i,
                    second: j,
                    tv_first: side_tv(i, |p| &p.first),
                    tv_second: side_tv(j, |p| &p.second),
                }
            })
        })
        .collect();

    let mut max_tv = f64::NEG_INFINITY;
    let mut witness = (0, 0, Side::First);
    for r in &records {
        for (tv, side) in [(r.tv_first, Side::First), (r.tv_second, Side::Second)] {
            if tv > max_tv {
                max_tv = tv;
                witness = (r.first, r.second, side);
            }
        }
    }
    Ok(MarginalReport { variant, records, max_tv, witness })
}

/// Wire form: `{"variant","pairs","max_marginal_tv","witness":[i,j,side],"contraction_violations","beta"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub variant: CouplingVariant,
    pub pairs: usize,
    pub max_marginal_tv: f64,
    pub witness: (usize, usize, Side),
    pub contraction_violations: usize,
    pub beta: f64,
    pub max_contraction_excess: f64,
}

pub fn coupling_report(
    space: &StateSpace,
    kernel: &Kernel,
    variant: CouplingVariant,
    log2_lambda: f64,
    pair_cap: usize,
) -> Result<CouplingReport> {
    let contraction = contraction_sweep(space, variant, log2_lambda, pair_cap)?;
    let marginal = marginal_deviation(space, kernel, variant, log2_lambda, pair_cap)?;
    Ok(CouplingReport {
        variant,
        pairs: contraction.records.len(),
        max_marginal_tv: marginal.max_tv,
        witness: marginal.witness,
        contraction_violations: contraction.violations,
        beta: contraction.beta,
        max_contraction_excess: contraction.max_excess,
    })
}

/// Unit-step path from `sigma` to `eta`: drop the `sigma`-only edges in
/// ascending id order, then add the `eta`-only edges in ascending id order.
/// Returns `phi(sigma, eta) + 1` matchings, endpoints included.
pub fn phi_path(g: &Graph, sigma: &Matching, eta: &Matching) -> Vec<Matching> {
    let mut path = vec![sigma.clone()];
    let mut cur = sigma.clone();
    for e in sigma.edges().filter(|&e| !eta.contains(e)).collect::<Vec<_>>() {
        cur.remove(g, e);
        path.push(cur.clone());
    }
    for e in eta.edges().filter(|&e| !sigma.contains(e)) {
        // every remaining edge of cur is shared with eta, so e is free
        cur.insert(g, e);
        path.push(cur.clone());
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::build_kernel;
    use crate::graph::{generate, Family};
    use rand::SeedableRng;

    fn graph(f: Family, n: usize) -> Graph {
        generate(f, n, 0).unwrap()
    }

    fn pair(g: &Graph, a: &[usize], b: &[usize]) -> CoupledPair {
        CoupledPair::new(Matching::from_edges(g, a).unwrap(), Matching::from_edges(g, b).unwrap())
    }

    fn edges(m: &Matching) -> Vec<usize> {
        m.edges().collect()
    }

    #[test]
    fn case_two_removes_the_member() {
        // P3 with e1 = 0, e2 = 1
        let g = graph(Family::Path, 3);
        let joint = exact_joint(&g, &pair(&g, &[0], &[1]), CouplingVariant::PaperFaithful, 0.0).unwrap();
        assert_eq!(joint.len(), 2);
        for (p, w) in &joint {
            assert!((w - 0.5).abs() < 1e-15);
            assert_eq!(p.phi, 1);
        }
        assert!(joint.iter().any(|(p, _)| edges(&p.first).is_empty() && edges(&p.second) == [1]));
        assert!(joint.iter().any(|(p, _)| edges(&p.first) == [0] && edges(&p.second).is_empty()));
    }

    #[test]
    fn case_one_moves_both() {
        let g = graph(Family::Path, 3);
        let joint = exact_joint(&g, &pair(&g, &[0], &[]), CouplingVariant::PaperFaithful, 0.0).unwrap();
        let both = joint.iter().find(|(p, _)| edges(&p.first) == [0] && edges(&p.second) == [0]).unwrap();
        let none = joint.iter().find(|(p, _)| p.first.is_empty() && p.second.is_empty()).unwrap();
        assert!((both.1 - 0.25).abs() < 1e-15 && (none.1 - 0.25).abs() < 1e-15);
        let e = expected_phi(&g, &pair(&g, &[0], &[]), CouplingVariant::PaperFaithful, 0.0).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn k2_joint() {
        let g = graph(Family::Path, 2);
        for v in [CouplingVariant::PaperFaithful, CouplingVariant::Synchronous] {
            let joint = exact_joint(&g, &pair(&g, &[], &[]), v, 2.0).unwrap();
            let (p_remove, p_add) = fugacity_split(2.0);
            assert_eq!(joint.len(), 2);
            let stay = joint.iter().find(|(p, _)| p.first.is_empty()).unwrap();
            let up = joint.iter().find(|(p, _)| p.first.size() == 1).unwrap();
            assert!((stay.1 - p_remove).abs() < 1e-15 && (up.1 - p_add).abs() < 1e-15);
            assert_eq!(up.0.phi, 0);
        }
    }

    #[test]
    fn synchronous_fails_on_p4() {
        // ({e2}, {e1}) = ({1}, {0})
        let g = graph(Family::Path, 4);
        let e = expected_phi(&g, &pair(&g, &[1], &[0]), CouplingVariant::Synchronous, 0.0).unwrap();
        assert!((e - 11.0 / 6.0).abs() < 1e-12);
        assert!(e > (1.0 - 1.0 / 3.0) * 2.0);
    }

    #[test]
    fn atoms_sum_to_one() {
        let g = generate(Family::Gnp { p: 0.6 }, 7, 3).unwrap();
        let space = StateSpace::build(&g, 10_000).unwrap();
        let c = Coupling::new(&g, CouplingVariant::PaperFaithful, 1.5).unwrap();
        for i in (0..space.len()).step_by(7) {
            for j in (0..space.len()).step_by(5) {
                let joint = c.exact_joint(&pair_of(&space, i, j));
                assert!(joint.len() <= 2 * g.m());
                assert!((joint.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sweeps_on_p4() {
        let g = graph(Family::Path, 4);
        let space = StateSpace::build(&g, 100).unwrap();
        let faithful = contraction_sweep(&space, CouplingVariant::PaperFaithful, 0.0, DEFAULT_PAIR_CAP).unwrap();
        assert_eq!(faithful.violations, 0);
        assert!(faithful.max_identity_gap <= 1e-12);
        let sync = contraction_sweep(&space, CouplingVariant::Synchronous, 0.0, DEFAULT_PAIR_CAP).unwrap();
        assert!(sync.violations >= 1);
        for r in faithful.records.iter().filter(|r| r.first == r.second) {
            assert_eq!(r.expected_phi_after, 0.0);
        }
    }

    #[test]
    fn marginals_on_p3() {
        let g = graph(Family::Path, 3);
        let space = StateSpace::build(&g, 100).unwrap();
        let kernel = build_kernel(&space, 0.0).unwrap();
        let faithful =
            marginal_deviation(&space, &kernel, CouplingVariant::PaperFaithful, 0.0, DEFAULT_PAIR_CAP).unwrap();
        assert!((faithful.record(1, 2).unwrap().tv_first - 0.25).abs() <= 1e-12);
        assert!((faithful.max_tv - 0.25).abs() <= 1e-12);
        for i in 0..space.len() {
            let r = faithful.record(i, i).unwrap();
            assert!(r.tv_first <= 1e-15 && r.tv_second <= 1e-15);
        }
        let sync = marginal_deviation(&space, &kernel, CouplingVariant::Synchronous, 0.0, DEFAULT_PAIR_CAP).unwrap();
        assert!(sync.max_tv <= 1e-12);
    }

    #[test]
    fn pair_cap() {
        let g = graph(Family::Path, 4);
        let space = StateSpace::build(&g, 100).unwrap();
        assert!(matches!(
            contraction_sweep(&space, CouplingVariant::PaperFaithful, 0.0, 24),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn paths_between_matchings() {
        let p3 = graph(Family::Path, 3);
        let a = Matching::from_edges(&p3, &[0]).unwrap();
        let b = Matching::from_edges(&p3, &[1]).unwrap();
        let path = phi_path(&p3, &a, &b);
        assert_eq!(path.iter().map(edges).collect::<Vec<_>>(), vec![vec![0], vec![], vec![1]]);
        assert_eq!(phi_path(&p3, &a, &a), vec![a.clone()]);

        let p4 = graph(Family::Path, 4);
        let a = Matching::from_edges(&p4, &[0, 2]).unwrap();
        let b = Matching::from_edges(&p4, &[1]).unwrap();
        let path = phi_path(&p4, &a, &b);
        assert_eq!(path.len(), 4);
        assert!(path.windows(2).all(|w| phi(&w[0], &w[1]) == 1));
        assert_eq!(path.last().unwrap(), &b);
    }

    #[test]
    fn simulation_edge_cases() {
        let g = graph(Family::Path, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let same = pair(&g, &[0], &[0]);
        let c = coupled_simulation(&g, &same, CouplingVariant::PaperFaithful, 0.0, 10, &mut rng).unwrap();
        assert_eq!(c, Coalescence { steps: 0, censored: false });
        // The synchronous coupling never joins ({e1}, {e2}) when removals are
        // effectively impossible.
        let apart = pair(&g, &[0], &[1]);
        let c = coupled_simulation(&g, &apart, CouplingVariant::Synchronous, 200.0, 50, &mut rng).unwrap();
        assert_eq!(c, Coalescence { steps: 50, censored: true });
    }

    #[test]
    fn variant_names() {
        assert_eq!("a".parse::<CouplingVariant>().unwrap(), CouplingVariant::PaperFaithful);
        assert_eq!("synchronous".parse::<CouplingVariant>().unwrap(), CouplingVariant::Synchronous);
        assert!("c".parse::<CouplingVariant>().is_err());
    }
}
