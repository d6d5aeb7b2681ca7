use std::collections::BTreeSet;

use minesweeper::cds::{Cds, Component, Constraint, ConstraintTree, Pattern};
use minesweeper::probe::{ProbeMode, TreeCds};
use minesweeper::triangle::TriangleCds;
use minesweeper::{Ext, Value};
use proptest::prelude::*;

const ARITY: usize = 3;

fn endpoint_pair(d: Value) -> impl Strategy<Value = (Ext, Ext)> {
    (-2..=d, 1..=d).prop_map(move |(lo, len)| {
        let l = if lo == -2 { Ext::NegInf } else { Ext::Fin(lo) };
        let h = if lo + len >= d { Ext::PosInf } else { Ext::Fin(lo + len) };
        (l, h)
    })
}

fn component(d: Value) -> impl Strategy<Value = Component> {
    prop_oneof![Just(Component::Star), (0..d).prop_map(Component::Eq)]
}

/// Any pattern shape.
fn constraint(d: Value) -> impl Strategy<Value = Constraint> {
    (proptest::collection::vec(component(d), 0..ARITY), endpoint_pair(d))
        .prop_map(|(p, (lo, hi))| Constraint::new(Pattern(p), lo, hi).unwrap())
}

/// Equalities first, then wildcards: these patterns always form chains.
fn nested_constraint(d: Value) -> impl Strategy<Value = Constraint> {
    (0..ARITY)
        .prop_flat_map(move |len| (Just(len), 0..=len, proptest::collection::vec(0..d, len), endpoint_pair(d)))
        .prop_map(|(len, eqs, vals, (lo, hi))| {
            let p = (0..len).map(|i| if i < eqs { Component::Eq(vals[i]) } else { Component::Star }).collect();
            Constraint::new(Pattern(p), lo, hi).unwrap()
        })
}

fn all_tuples(d: Value) -> Vec<Vec<Value>> {
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

/// Constraints ruling out everything outside `[0, d)^3`.
fn boundary(d: Value) -> Vec<Constraint> {
    let mut out = Vec::new();
    for k in 0..ARITY {
        let p = Pattern::stars(k);
        out.push(Constraint::new(p.clone(), Ext::NegInf, Ext::Fin(0)).unwrap());
        out.push(Constraint::new(p, Ext::Fin(d - 1), Ext::PosInf).unwrap());
    }
    out
}

/// Probes until exhaustion, blocking each returned point. Returns the probes.
fn enumerate(cds: &mut dyn Cds, user: &[Constraint], d: Value) -> Vec<Vec<Value>> {
    let mut seen = Vec::new();
    while let Some(t) = cds.probe().unwrap() {
        assert!(!user.iter().any(|c| c.satisfied_by(&t)), "probe {t:?} lies in a gap");
        assert!(seen.len() <= (d * d * d) as usize, "probe keeps returning points");
        let block = Constraint::new(
            Pattern(t[..ARITY - 1].iter().map(|&v| Component::Eq(v)).collect()),
            Ext::Fin(t[ARITY - 1] - 1),
            Ext::Fin(t[ARITY - 1] + 1),
        )
        .unwrap();
        cds.insert(&block).unwrap();
        seen.push(t);
    }
    seen
}

fn free_tuples(user: &[Constraint], d: Value) -> Vec<Vec<Value>> {
    all_tuples(d).into_iter().filter(|t| !user.iter().any(|c| c.satisfied_by(t))).collect()
}

fn check_enumeration(cds: &mut dyn Cds, constraints: Vec<Constraint>, d: Value) -> Result<(), TestCaseError> {
    let mut user = constraints;
    user.extend(boundary(d));
    for c in &user {
        cds.insert(c).unwrap();
    }
    let got = enumerate(cds, &user, d);
    let set: BTreeSet<_> = got.iter().cloned().collect();
    prop_assert_eq!(set.len(), got.len(), "a point was returned twice");
    prop_assert_eq!(set.into_iter().collect::<Vec<_>>(), free_tuples(&user, d));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tree_agrees_with_a_flat_list(cs in proptest::collection::vec(constraint(8), 0..40)) {
        let mut tree = ConstraintTree::new(ARITY);
        for c in &cs {
            tree.insert(c).unwrap();
            prop_assert!(tree.check_invariant().is_ok());
        }
        for t in all_tuples(8) {
            prop_assert_eq!(tree.covers_tuple(&t), cs.iter().any(|c| c.satisfied_by(&t)), "tuple {:?}", t);
        }
    }

    #[test]
    fn shadow_probe_enumerates_exactly_the_free_points(cs in proptest::collection::vec(constraint(6), 0..30)) {
        check_enumeration(&mut TreeCds::new(ARITY, ProbeMode::Shadow), cs, 6)?;
    }

    #[test]
    fn chain_probe_enumerates_exactly_the_free_points(cs in proptest::collection::vec(nested_constraint(6), 0..30)) {
        check_enumeration(&mut TreeCds::new(ARITY, ProbeMode::Chain), cs, 6)?;
    }

    #[test]
    fn triangle_store_enumerates_exactly_the_free_points(cs in proptest::collection::vec(constraint(6), 0..30)) {
        check_enumeration(&mut TriangleCds::new(5), cs, 6)?;
    }

    #[test]
    fn shadow_and_chain_agree_on_nested_patterns(cs in proptest::collection::vec(nested_constraint(5), 0..25)) {
        let mut user = cs;
        user.extend(boundary(5));
        let mut a = TreeCds::new(ARITY, ProbeMode::Chain);
        let mut b = TreeCds::new(ARITY, ProbeMode::Shadow);
        for c in &user {
            a.insert(c).unwrap();
            b.insert(c).unwrap();
        }
        let mut x = enumerate(&mut a, &user, 5);
        let mut y = enumerate(&mut b, &user, 5);
        x.sort();
        y.sort();
        prop_assert_eq!(x, y);
    }
}

#[test]
fn chain_probe_rejects_crossing_patterns() {
    let mut cds = TreeCds::new(ARITY, ProbeMode::Chain);
    cds.insert(&"<=0, *, (-inf, 3)>".parse().unwrap()).unwrap();
    cds.insert(&"<*, =0, (-inf, 3)>".parse().unwrap()).unwrap();
    cds.insert(&"<(-inf, 0)>".parse().unwrap()).unwrap();
    cds.insert(&"<*, (-inf, 0)>".parse().unwrap()).unwrap();
    assert!(cds.probe().is_err());
}
