use proptest::prelude::*;
use randmatch::enumerate::{enumerate_matchings, size_counts, DEFAULT_STATE_CAP};
use randmatch::maxmatch::{max_matching_bipartite, max_matching_branch_bound};
use randmatch::{exact_max_matching, generate, Error, Family, Graph};

/// Matchings counted by size via include/exclude on the highest edge id,
/// with no shared code path.
fn counts_by_recursion(g: &Graph) -> Vec<u64> {
    fn go(edges: &[(usize, usize)], used: &mut Vec<bool>, size: usize, out: &mut Vec<u64>) {
        let Some((&(u, v), rest)) = edges.split_last() else {
            if out.len() <= size {
                out.resize(size + 1, 0);
            }
            out[size] += 1;
            return;
        };
        go(rest, used, size, out);
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            go(rest, used, size + 1, out);
            used[u] = false;
            used[v] = false;
        }
    }
    let mut out = Vec::new();
    go(g.edges(), &mut vec![false; g.n()], 0, &mut out);
    out
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let len = pairs.len();
        proptest::collection::vec(any::<bool>(), len)
            .prop_map(move |keep| Graph::new(n, pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&p, _)| p)).unwrap())
    })
}

#[test]
fn named_families_match_known_counts() {
    // matching polynomials: path P_n follows a Fibonacci-style recurrence, K4 has 1+6+3
    let cases = [
        (Family::Path, 4, vec![1, 3, 1]),
        (Family::Path, 5, vec![1, 4, 3]),
        (Family::Cycle, 4, vec![1, 4, 2]),
        (Family::Star, 9, vec![1, 8]),
        (Family::Complete, 4, vec![1, 6, 3]),
        (Family::Complete, 6, vec![1, 15, 45, 15]),
    ];
    for (f, n, want) in cases {
        let g = generate(f, n, 0).unwrap();
        assert_eq!(size_counts(&g, DEFAULT_STATE_CAP).unwrap().counts, want, "{} {n}", f.name());
        assert_eq!(counts_by_recursion(&g), want);
    }
}

#[test]
fn capacity_error_reports_partial_count() {
    let g = generate(Family::Complete, 8, 0).unwrap();
    match enumerate_matchings(&g, 100) {
        Err(Error::Capacity { cap: 100, partial, .. }) => assert_eq!(partial, 100),
        other => panic!("expected capacity error, got {other:?}"),
    }
}

#[test]
fn bipartite_regular_has_perfect_matching() {
    for (n, d, seed) in [(5, 2, 1), (6, 3, 2), (8, 1, 3)] {
        let g = generate(Family::BipartiteRegular { d }, n, seed).unwrap();
        assert_eq!(exact_max_matching(&g).0, n);
        assert!(g.bipartition().is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn enumeration_matches_recursion(g in arb_graph(8)) {
        let all = enumerate_matchings(&g, DEFAULT_STATE_CAP).unwrap();
        let want = counts_by_recursion(&g);
        prop_assert_eq!(all.len() as u64, want.iter().sum::<u64>());
        prop_assert_eq!(size_counts(&g, DEFAULT_STATE_CAP).unwrap().counts, want);
        let mut keys: Vec<_> = all.iter().map(|m| m.key()).collect();
        keys.sort();
        keys.dedup();
        prop_assert_eq!(keys.len(), all.len());
        for m in &all {
            prop_assert!(m.validate(&g).is_ok());
        }
    }

    #[test]
    fn maximum_size_agrees_with_enumeration(g in arb_graph(9)) {
        let k = size_counts(&g, DEFAULT_STATE_CAP).unwrap().k;
        let (bb, m) = max_matching_branch_bound(&g);
        prop_assert_eq!(bb, k);
        prop_assert_eq!(m.size(), k);
        prop_assert!(m.validate(&g).is_ok());
        prop_assert_eq!(exact_max_matching(&g).0, k);
        if let Some(side) = g.bipartition() {
            let (b, mb) = max_matching_bipartite(&g, &side);
            prop_assert_eq!(b, k);
            prop_assert!(mb.validate(&g).is_ok());
        }
    }
}
