use std::collections::{BTreeMap, BTreeSet};

use minesweeper::certlab::{
    build_upper_bound_certificate, nested_loop_join, verify_satisfies, witness_equivalence_check, Argument, Instance,
};
use minesweeper::querygraph::Gao;
use minesweeper::storage::Relation;
use minesweeper::Value;
use proptest::prelude::*;

/// `R(A, B)`, `S(B, C)`, `T(A)` with small values.
fn instance() -> impl Strategy<Value = Instance> {
    let pairs = || proptest::collection::vec((0..6i64, 0..6i64), 1..10);
    (pairs(), pairs(), proptest::collection::vec(0..6i64, 1..6)).prop_map(|(r, s, t)| {
        let two = |v: Vec<(Value, Value)>| v.into_iter().map(|(a, b)| vec![a, b]).collect();
        let rels = vec![
            Relation::new("R", vec![0, 1], two(r)).unwrap(),
            Relation::new("S", vec![1, 2], two(s)).unwrap(),
            Relation::new("T", vec![0], t.into_iter().map(|a| vec![a]).collect()).unwrap(),
        ];
        Instance::new(rels, Gao::identity(3)).unwrap()
    })
}

/// Strictly increasing per attribute: `v -> v * k_a + c_a`.
fn stretch() -> impl Strategy<Value = Vec<(Value, Value)>> {
    proptest::collection::vec((1..5i64, 0..10i64), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certificate_is_small_and_holds(inst in instance()) {
        let c = build_upper_bound_certificate(&inst);
        prop_assert!(c.len() <= inst.max_arity() * inst.size());
        prop_assert!(verify_satisfies(&inst, &c).unwrap());
        let round = Argument::parse(&c.to_text(&inst), &inst).unwrap();
        prop_assert_eq!(round, c);
    }

    #[test]
    fn witnesses_survive_order_preserving_maps(inst in instance(), f in stretch()) {
        let c = build_upper_bound_certificate(&inst);
        let other = inst.revalue(|a, v| v * f[a].0 + f[a].1).unwrap();
        prop_assert!(verify_satisfies(&other, &c).unwrap());
        let check = witness_equivalence_check(&c, &inst, &other).unwrap();
        prop_assert!(!check.vacuous && check.same);
    }

    #[test]
    fn join_matches_enumeration(inst in instance()) {
        let sets: Vec<BTreeSet<&Vec<Value>>> = inst.relations().iter().map(|r| r.tuples().iter().collect()).collect();
        let mut want = BTreeSet::new();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    if sets[0].contains(&vec![a, b]) && sets[1].contains(&vec![b, c]) && sets[2].contains(&vec![a]) {
                        want.insert(vec![a, b, c]);
                    }
                }
            }
        }
        let got = nested_loop_join(&inst);
        prop_assert_eq!(got.witnesses.len(), got.tuples.len());
        prop_assert_eq!(got.tuples, want);
    }
}

#[test]
fn equal_values_become_equalities() {
    let rels = vec![
        Relation::new("R", vec![0], vec![vec![1], vec![3]]).unwrap(),
        Relation::new("S", vec![0], vec![vec![3], vec![4]]).unwrap(),
    ];
    let inst = Instance::new(rels, Gao::identity(1)).unwrap();
    let c = build_upper_bound_certificate(&inst);
    // groups {R1}, {R2, S1}, {S2}: one equality and a chain of two
    assert_eq!(c.len(), 3);
    assert_eq!(c.equalities(), 1);
    let per_value: BTreeMap<usize, usize> = inst.variables().into_iter().map(|(a, v)| (a, v.len())).collect();
    assert_eq!(per_value[&0], 4);
}
