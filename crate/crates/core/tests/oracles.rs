use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use randmatch::analysis::{build_kernel, evolve, gibbs, DistVector, Kernel, StateSpace};
use randmatch::chain::Chain;
use randmatch::coupling::{CoupledPair, Coupling, CouplingVariant};
use randmatch::enumerate::DEFAULT_STATE_CAP;
use randmatch::{generate, Family, Graph, Matching};

fn space(f: Family, n: usize) -> StateSpace {
    StateSpace::build(&generate(f, n, 0).unwrap(), DEFAULT_STATE_CAP).unwrap()
}

fn dense(k: &Kernel) -> DMatrix<f64> {
    DMatrix::from_fn(k.len(), k.len(), |i, j| k.entry(i, j))
}

/// Stationary vector from the linear system `π (P − I) = 0`, `Σ π = 1`.
fn stationary_by_solve(p: &DMatrix<f64>) -> DVector<f64> {
    let n = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b).unwrap()
}

#[test]
fn gibbs_matches_linear_solve() {
    for (f, n) in [(Family::Path, 5), (Family::Cycle, 5), (Family::Complete, 4), (Family::Star, 6)] {
        let s = space(f, n);
        for x in [-1.0, 0.0, 2.0, 5.0] {
            let k = build_kernel(&s, x).unwrap();
            let want = stationary_by_solve(&dense(&k));
            let got = gibbs(&s, x);
            for (a, b) in got.probs.iter().zip(want.iter()) {
                assert!((a - b).abs() < 1e-12, "{} {n} x={x}: {a} vs {b}", f.name());
            }
        }
    }
}

#[test]
fn evolve_matches_matrix_power() {
    let s = space(Family::Cycle, 5);
    let k = build_kernel(&s, 1.5).unwrap();
    let p = dense(&k);
    let start = 3;
    let mut row = DMatrix::<f64>::zeros(1, s.len());
    row[(0, start)] = 1.0;
    let pt = p.pow(25);
    let want = row * pt;
    let got = evolve(&k, &DistVector::delta(s.len(), start), 25);
    for j in 0..s.len() {
        assert!((got.probs[j] - want[(0, j)]).abs() < 1e-12);
    }
}

/// Upper quantile of chi-square with `df` degrees of freedom at one-sided
/// normal deviate `z` (Wilson–Hilferty approximation).
fn chi2_crit(df: usize, z: f64) -> f64 {
    let d = df as f64;
    d * (1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt()).powi(3)
}

#[test]
fn sampled_steps_follow_kernel_rows() {
    // 25 rows in total; z = 3.94 is the 1 - 0.001/25 deviate, so the whole
    // family has a false-alarm rate of 0.001
    for (f, n, x) in [(Family::Path, 5, 1.0), (Family::Cycle, 4, -1.0), (Family::Complete, 4, 2.5)] {
        sampled_rows_agree(&space(f, n), x, 3.94);
    }
}

fn sampled_rows_agree(s: &StateSpace, x: f64, z: f64) {
    let g = s.graph();
    let k = build_kernel(s, x).unwrap();
    let chain = Chain::new(g, x).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 1_000_000;
    for from in 0..s.len() {
        let mut counts = vec![0u64; s.len()];
        for _ in 0..draws {
            let mut m = s.state(from).clone();
            chain.step(&mut m, &mut rng);
            counts[s.index_of(&m).unwrap()] += 1;
        }
        let mut stat = 0.0;
        let mut cells = 0;
        for (j, &c) in counts.iter().enumerate() {
            let p = k.entry(from, j);
            if p == 0.0 {
                assert_eq!(c, 0, "transition {from}->{j} has zero probability");
                continue;
            }
            let e = p * draws as f64;
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        }
        assert!(stat < chi2_crit(cells - 1, z), "state {from}: chi2 {stat} over {cells} cells, counts {counts:?}");
    }
}

/// Mean absorption time into the diagonal from `start`, by solving
/// `(I − Q) t = 1` over the reachable off-diagonal pairs.
fn expected_coalescence(c: &Coupling, start: &CoupledPair) -> f64 {
    let mut index: HashMap<CoupledPair, usize> = HashMap::new();
    let mut order = vec![start.clone()];
    index.insert(start.clone(), 0);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut row = Vec::new();
        for (next, w) in c.exact_joint(&order[i]) {
            if next.is_coalesced() {
                continue;
            }
            let id = *index.entry(next.clone()).or_insert_with(|| {
                order.push(next.clone());
                order.len() - 1
            });
            row.push((id, w));
        }
        rows.push(row);
        i += 1;
    }
    let n = order.len();
    let mut a = DMatrix::<f64>::identity(n, n);
    for (r, row) in rows.iter().enumerate() {
        for &(c, w) in row {
            a[(r, c)] -= w;
        }
    }
    a.lu().solve(&DVector::from_element(n, 1.0)).unwrap()[0]
}

fn check_simulation(g: &Graph, variant: CouplingVariant, x: f64, a: &[usize], b: &[usize], seed: u64) -> f64 {
    let c = Coupling::new(g, variant, x).unwrap();
    let pair = CoupledPair::new(Matching::from_edges(g, a).unwrap(), Matching::from_edges(g, b).unwrap());
    let exact = expected_coalescence(&c, &pair);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let runs = 100_000;
    let samples: Vec<f64> = (0..runs)
        .map(|_| {
            let r = c.simulate(&pair, 1_000_000, &mut rng);
            assert!(!r.censored);
            r.steps as f64
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / runs as f64;
    let var = samples.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
    let se = (var / runs as f64).sqrt();
    assert!((mean - exact).abs() <= 3.0 * se, "mean {mean} vs exact {exact} (se {se})");
    exact
}

#[test]
fn p3_coalescence_matches_absorbing_chain() {
    let g = generate(Family::Path, 3, 0).unwrap();
    let exact = check_simulation(&g, CouplingVariant::PaperFaithful, 0.0, &[0], &[1], 5);
    // from ({e1},{e2}) each step coalesces with probability 1/3
    assert!((exact - 3.0).abs() < 1e-12);
}

#[test]
fn p4_coalescence_matches_absorbing_chain() {
    let g = generate(Family::Path, 4, 0).unwrap();
    check_simulation(&g, CouplingVariant::PaperFaithful, 1.0, &[0, 2], &[1], 6);
    check_simulation(&g, CouplingVariant::Synchronous, 1.0, &[0, 2], &[1], 7);
}

#[test]
fn diagonal_pairs_stay_diagonal() {
    for (f, n) in [(Family::Path, 4), (Family::Cycle, 4), (Family::Complete, 4)] {
        let s = space(f, n);
        for variant in [CouplingVariant::PaperFaithful, CouplingVariant::Synchronous] {
            let c = Coupling::new(s.graph(), variant, 1.0).unwrap();
            for m in s.states() {
                let pair = CoupledPair::new(m.clone(), m.clone());
                for (next, w) in c.exact_joint(&pair) {
                    assert!(w > 0.0);
                    assert!(next.is_coalesced());
                }
                assert_eq!(c.expected_phi(&pair), 0.0);
            }
        }
    }
}
