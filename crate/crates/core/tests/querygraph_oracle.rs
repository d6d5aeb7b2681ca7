use minesweeper::querygraph::{for_each_permutation, Gao, Hypergraph};
use proptest::prelude::*;

/// Vertex and edge elimination until nothing changes.
fn gyo(masks: &[u64]) -> bool {
    let mut e = masks.to_vec();
    loop {
        let before = e.clone();
        for v in 0..64 {
            let holders: Vec<usize> = (0..e.len()).filter(|&i| e[i] >> v & 1 == 1).collect();
            if let [only] = holders[..] {
                e[only] &= !(1 << v);
            }
        }
        if let Some(i) = (0..e.len()).find(|&i| (0..e.len()).any(|j| j != i && e[i] & !e[j] == 0)) {
            e.remove(i);
        }
        if e == before {
            return e.len() <= 1;
        }
    }
}

/// Every subset of the edges is alpha-acyclic.
fn beta(masks: &[u64]) -> bool {
    (1u32..1 << masks.len()).all(|s| {
        let part: Vec<u64> = (0..masks.len()).filter(|&i| s >> i & 1 == 1).map(|i| masks[i]).collect();
        gyo(&part)
    })
}

/// Largest neighborhood met while eliminating vertices of the primal graph
/// from the back of `order`.
fn induced_width(n: usize, masks: &[u64], order: &[usize]) -> usize {
    let mut adj = vec![0u64; n];
    for &m in masks {
        for v in (0..n).filter(|v| m >> v & 1 == 1) {
            adj[v] |= m & !(1 << v);
        }
    }
    let mut width = 0;
    for &v in order.iter().rev() {
        let nb = adj[v];
        width = width.max(nb.count_ones() as usize);
        for u in (0..n).filter(|u| nb >> u & 1 == 1) {
            adj[u] = (adj[u] | nb) & !(1 << u) & !(1 << v);
        }
        adj[v] = 0;
    }
    width
}

fn hypergraph() -> impl Strategy<Value = (usize, Vec<u64>)> {
    (1usize..=6)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(1u64..(1 << n), 1..=6)))
        .prop_map(|(n, mut masks)| {
            let full = (1u64 << n) - 1;
            let missing = full & !masks.iter().fold(0, |a, m| a | m);
            masks[0] |= missing;
            (n, masks)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn acyclicity_matches_the_reduction_oracle((n, masks) in hypergraph()) {
        let h = Hypergraph::from_masks(n, &masks).unwrap();
        prop_assert_eq!(h.is_alpha_acyclic(), gyo(&masks));
        prop_assert_eq!(h.is_beta_acyclic(), beta(&masks));
    }

    #[test]
    fn nested_orders_exist_exactly_for_beta_acyclic_graphs((n, masks) in hypergraph()) {
        let h = Hypergraph::from_masks(n, &masks).unwrap();
        match h.nested_elimination_order() {
            Some(g) => {
                prop_assert!(beta(&masks));
                prop_assert!(h.is_nested_elimination_order(&g));
            }
            None => prop_assert!(!beta(&masks)),
        }
        let mut any = false;
        for_each_permutation(n, |p| {
            any |= h.is_nested_elimination_order(&Gao::new(p.to_vec()).unwrap());
        });
        prop_assert_eq!(any, beta(&masks));
    }

    #[test]
    fn elimination_width_is_the_induced_width((n, masks) in hypergraph()) {
        let h = Hypergraph::from_masks(n, &masks).unwrap();
        let mut best = usize::MAX;
        for_each_permutation(n, |p| {
            let w = h.elimination_width(&Gao::new(p.to_vec()).unwrap());
            assert_eq!(w, induced_width(n, &masks, p), "order {p:?}");
            best = best.min(w);
        });
        prop_assert_eq!(h.min_width_order().1, best);
    }
}

#[test]
fn small_cases() {
    let tri = Hypergraph::from_edge_sets(3, &[&[0, 1], &[1, 2], &[0, 2]]).unwrap();
    assert!(!tri.is_alpha_acyclic());
    assert_eq!(tri.min_width_order().1, 2);
    // alpha- but not beta-acyclic: the triangle under a covering edge
    let covered = Hypergraph::from_edge_sets(3, &[&[0, 1], &[1, 2], &[0, 2], &[0, 1, 2]]).unwrap();
    assert!(covered.is_alpha_acyclic() && !covered.is_beta_acyclic());
}
