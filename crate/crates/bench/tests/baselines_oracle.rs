use std::collections::BTreeSet;

use minesweeper::certlab::{nested_loop_join, Instance as CertInstance};
use minesweeper::engine::QueryPlan;
use minesweeper::Value;
use msbench::baselines::{run_baseline, Baseline, BaselineError};
use msbench::generate::{
    bowtie_random, example21, path_chunk, path_hard_wide, set_intersect_disjoint, triangle_offset, triangle_random,
    worked_q2, Family, Instance,
};
use proptest::prelude::*;

fn oracle(inst: &Instance) -> BTreeSet<Vec<Value>> {
    let plan = QueryPlan::auto(inst.hypergraph.clone());
    let permuted = inst.relations.iter().map(|r| r.permuted_to(plan.gao())).collect();
    nested_loop_join(&CertInstance::new(permuted, plan.gao().clone()).unwrap()).tuples
}

/// Runs every baseline that accepts the instance against the oracle.
fn check_all(inst: &Instance) -> usize {
    let want: Vec<Vec<Value>> = oracle(inst).into_iter().collect();
    let gao = QueryPlan::auto(inst.hypergraph.clone()).gao().clone();
    let mut applied = 0;
    for b in [Baseline::Merge, Baseline::Yannakakis, Baseline::Leapfrog] {
        match run_baseline(b, &inst.hypergraph, &gao, &inst.relations) {
            Ok(run) => {
                assert_eq!(run.tuples, want, "{b:?} on {}", inst.id);
                applied += 1;
            }
            Err(BaselineError::NotIntersection | BaselineError::Cyclic) => {}
            Err(e) => panic!("{b:?} on {}: {e}", inst.id),
        }
    }
    applied
}

#[test]
fn fixed_families() {
    assert_eq!(check_all(&set_intersect_disjoint(200)), 3);
    assert_eq!(check_all(&example21(10)), 2);
    assert_eq!(check_all(&worked_q2(5)), 2);
    assert_eq!(check_all(&path_hard_wide(4, 4, 2)), 2);
    assert_eq!(check_all(&path_hard_wide(3, 3, 3)), 2);
    assert_eq!(check_all(&triangle_offset(12)), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_families(seed in any::<u64>(), n in 1usize..60, v in 3i64..16) {
        prop_assert_eq!(check_all(&bowtie_random(n, v, seed)), 2);
        prop_assert_eq!(check_all(&triangle_random(v, 0.4, seed)), 1);
    }

    #[test]
    fn generators_are_seed_deterministic(seed in any::<u64>()) {
        let f: Family = "bowtieRandom(30,9)".parse().unwrap();
        prop_assert_eq!(f.generate(seed).unwrap().relations, f.generate(seed).unwrap().relations);
    }
}

#[test]
fn path_family_matches_its_construction() {
    let (m, big_m) = (5usize, 4i64);
    let inst = path_hard_wide(m, big_m, 2);
    assert!(oracle(&inst).is_empty());
    for (idx, rel) in inst.relations.iter().enumerate() {
        let i = idx + 1;
        let prev = if i == 1 { m } else { i - 1 };
        let expected = 1 + (m - 2) * (big_m as usize - 1).pow(2);
        assert_eq!(rel.len(), expected);
        for t in rel.tuples() {
            // chunk j holds values in ((j-1)M, jM]
            let j = ((t[0] - 1) / big_m + 1) as usize;
            assert_eq!((t[1] - 1) / big_m + 1, j as i64, "both coordinates in one chunk");
            assert_ne!(j, prev, "chunk i-1 is empty");
            let base = (j as i64 - 1) * big_m;
            if j == i {
                assert_eq!(t, &vec![base + 1, base + 1]);
            } else {
                assert!(t.iter().all(|&x| (base + 2..=base + big_m).contains(&x)));
            }
        }
        for j in 1..=m {
            assert_eq!(path_chunk(i, j, m, big_m, 2).is_empty(), j == prev);
        }
    }
}
