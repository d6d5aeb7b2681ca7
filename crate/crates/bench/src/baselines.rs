//! Reference join algorithms with simple work counters, used for scaling
//! comparisons.

use std::collections::{HashMap, HashSet};

use minesweeper::querygraph::{Gao, Hypergraph};
use minesweeper::storage::{NodeRef, Relation, TrieIndex};
use minesweeper::{Ext, Value};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("merge intersection needs unary relations over one attribute")]
    NotIntersection,
    #[error("Yannakakis needs an alpha-acyclic query")]
    Cyclic,
    #[error("relation {0} does not follow the attribute order")]
    Order(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Merge,
    Yannakakis,
    Leapfrog,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BaselineRun {
    /// Output tuples indexed by attribute id, sorted.
    pub tuples: Vec<Vec<Value>>,
    /// Element visits plus search steps; only comparable within one baseline.
    pub work: u64,
}

pub fn run_baseline(
    which: Baseline,
    h: &Hypergraph,
    gao: &Gao,
    rels: &[Relation],
) -> Result<BaselineRun, BaselineError> {
    match which {
        Baseline::Merge => merge_intersection(h, rels),
        Baseline::Yannakakis => yannakakis(h, rels),
        Baseline::Leapfrog => leapfrog(h, gao, rels),
    }
}

/// First index `>= from` with `v[i] >= x`, by doubling then bisecting.
fn gallop(v: &[Value], from: usize, x: Value, work: &mut u64) -> usize {
    let (mut lo, mut hi, mut step) = (from, from, 1);
    while hi < v.len() && v[hi] < x {
        *work += 1;
        lo = hi + 1;
        hi = from + step;
        step *= 2;
    }
    let hi = hi.min(v.len());
    lo + v[lo..hi].partition_point(|&y| {
        *work += 1;
        y < x
    })
}

/// Intersection of unary relations by galloping each list up to the current
/// maximum.
pub fn merge_intersection(h: &Hypergraph, rels: &[Relation]) -> Result<BaselineRun, BaselineError> {
    if h.num_attributes() != 1 || rels.iter().any(|r| r.arity() != 1) || rels.is_empty() {
        return Err(BaselineError::NotIntersection);
    }
    let lists: Vec<Vec<Value>> = rels.iter().map(|r| r.tuples().iter().map(|t| t[0]).collect()).collect();
    let mut pos = vec![0usize; lists.len()];
    let mut run = BaselineRun::default();
    'outer: loop {
        let mut target = Value::MIN;
        for (l, &p) in lists.iter().zip(&pos) {
            match l.get(p) {
                None => break 'outer,
                Some(&v) => target = target.max(v),
            }
        }
        let mut all = true;
        for (l, p) in lists.iter().zip(pos.iter_mut()) {
            *p = gallop(l, *p, target, &mut run.work);
            run.work += 1;
            match l.get(*p) {
                None => break 'outer,
                Some(&v) if v != target => all = false,
                _ => {}
            }
        }
        if all {
            run.tuples.push(vec![target]);
            pos[0] += 1;
        }
    }
    Ok(run)
}

fn project(t: &[Value], cols: &[usize]) -> Vec<Value> {
    cols.iter().map(|&c| t[c]).collect()
}

/// Columns of `r` holding the attributes shared with `s`, for both sides.
fn shared(r: &Relation, s: &Relation) -> (Vec<usize>, Vec<usize>) {
    let mut rc = Vec::new();
    let mut sc = Vec::new();
    for (i, a) in r.attrs.iter().enumerate() {
        if let Some(j) = s.attrs.iter().position(|b| b == a) {
            rc.push(i);
            sc.push(j);
        }
    }
    (rc, sc)
}

/// Keeps the tuples of `r` that agree with some tuple of `s`.
fn semijoin(r: &[Vec<Value>], rc: &[usize], s: &[Vec<Value>], sc: &[usize], work: &mut u64) -> Vec<Vec<Value>> {
    let keys: HashSet<Vec<Value>> = s.iter().map(|t| project(t, sc)).collect();
    *work += (r.len() + s.len()) as u64;
    r.iter().filter(|t| keys.contains(&project(t, rc))).cloned().collect()
}

/// Full reducer along a GYO join tree, then joins from the root down.
pub fn yannakakis(h: &Hypergraph, rels: &[Relation]) -> Result<BaselineRun, BaselineError> {
    let tree = h.gyo_reduce().join_tree.ok_or(BaselineError::Cyclic)?;
    let mut run = BaselineRun::default();
    let mut data: Vec<Vec<Vec<Value>>> = rels.iter().map(|r| r.tuples().to_vec()).collect();
    let root = tree.root();
    // post-order over the tree
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(e) = stack.pop() {
        order.push(e);
        stack.extend(tree.children(e));
    }
    for &e in order.iter().rev() {
        if let Some(p) = tree.parent[e] {
            let (pc, ec) = shared(&rels[p], &rels[e]);
            data[p] = semijoin(&data[p], &pc, &data[e], &ec, &mut run.work);
        }
    }
    for &e in &order {
        if let Some(p) = tree.parent[e] {
            let (ec, pc) = shared(&rels[e], &rels[p]);
            data[e] = semijoin(&data[e], &ec, &data[p], &pc, &mut run.work);
        }
    }
    let n = h.num_attributes();
    let mut partial: Vec<Vec<Option<Value>>> = data[root]
        .iter()
        .map(|t| {
            let mut row = vec![None; n];
            for (&a, &v) in rels[root].attrs.iter().zip(t) {
                row[a] = Some(v);
            }
            row
        })
        .collect();
    let mut bound: Vec<usize> = rels[root].attrs.clone();
    for &e in order.iter().skip(1) {
        let r = &rels[e];
        let key_cols: Vec<usize> = (0..r.arity()).filter(|&i| bound.contains(&r.attrs[i])).collect();
        let mut index: HashMap<Vec<Value>, Vec<&Vec<Value>>> = HashMap::new();
        for t in &data[e] {
            index.entry(project(t, &key_cols)).or_default().push(t);
        }
        let mut next = Vec::new();
        for row in &partial {
            run.work += 1;
            let key: Vec<Value> = key_cols.iter().map(|&i| row[r.attrs[i]].expect("bound")).collect();
            for t in index.get(&key).into_iter().flatten() {
                run.work += 1;
                let mut row = row.clone();
                for (&a, &v) in r.attrs.iter().zip(t.iter()) {
                    row[a] = Some(v);
                }
                next.push(row);
            }
        }
        partial = next;
        for &a in &r.attrs {
            if !bound.contains(&a) {
                bound.push(a);
            }
        }
    }
    run.tuples = partial.into_iter().map(|r| r.into_iter().map(|v| v.expect("all bound")).collect()).collect();
    run.tuples.sort();
    run.tuples.dedup();
    Ok(run)
}

/// Backtracking trie join in attribute order: at each attribute, scan the
/// smallest candidate list and look the values up in the others.
pub fn leapfrog(h: &Hypergraph, gao: &Gao, rels: &[Relation]) -> Result<BaselineRun, BaselineError> {
    let idx: Vec<TrieIndex> = rels
        .iter()
        .map(|r| TrieIndex::build(&r.permuted_to(gao), gao).map_err(|_| BaselineError::Order(r.name.clone())))
        .collect::<Result<_, _>>()?;
    let n = h.num_attributes();
    // per attribute position, the relations that contain it
    let at: Vec<Vec<usize>> = (0..n)
        .map(|p| (0..idx.len()).filter(|&r| idx[r].attrs().contains(&gao.order()[p])).collect())
        .collect();
    let mut nodes: Vec<NodeRef> = idx.iter().map(TrieIndex::root).collect();
    let mut t = Vec::with_capacity(n);
    let mut run = BaselineRun::default();
    lf_rec(&idx, &at, 0, &mut nodes, &mut t, &mut run);
    for tuple in run.tuples.iter_mut() {
        let mut by_attr = vec![0; n];
        for (p, &a) in gao.order().iter().enumerate() {
            by_attr[a] = tuple[p];
        }
        *tuple = by_attr;
    }
    run.tuples.sort();
    Ok(run)
}

fn lf_rec(
    idx: &[TrieIndex],
    at: &[Vec<usize>],
    p: usize,
    nodes: &mut Vec<NodeRef>,
    t: &mut Vec<Value>,
    run: &mut BaselineRun,
) {
    if p == at.len() {
        run.tuples.push(t.clone());
        return;
    }
    let rs = &at[p];
    let &lead = rs.iter().min_by_key(|&&r| nodes[r].fanout()).expect("every attribute is covered");
    let lead_node = nodes[lead];
    for i in 1..=lead_node.fanout() {
        run.work += 1;
        let Ext::Fin(v) = idx[lead].value_at(lead_node, i) else { unreachable!() };
        let mut hits = Vec::with_capacity(rs.len());
        let mut ok = true;
        for &r in rs {
            let (lo, hi) = if r == lead { (i, i) } else { idx[r].gap_in(nodes[r], v, &mut 0) };
            run.work += u64::from(r != lead);
            if lo != hi {
                ok = false;
                break;
            }
            hits.push((r, lo));
        }
        if !ok {
            continue;
        }
        let saved: Vec<(usize, NodeRef)> = hits.iter().map(|&(r, _)| (r, nodes[r])).collect();
        for &(r, i) in &hits {
            if nodes[r].depth + 1 < idx[r].arity() {
                nodes[r] = idx[r].child(nodes[r], i);
            }
        }
        t.push(v);
        lf_rec(idx, at, p + 1, nodes, t, run);
        t.pop();
        for (r, node) in saved {
            nodes[r] = node;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{set_intersect_disjoint, triangle_random};

    #[test]
    fn gallop_finds_lower_bound() {
        let v = vec![1, 3, 5, 7, 9, 11];
        for x in 0..13 {
            for from in 0..v.len() {
                let got = gallop(&v, from, x, &mut 0);
                let expect = from + v[from..].partition_point(|&y| y < x);
                assert_eq!(got, expect, "x={x} from={from}");
            }
        }
    }

    #[test]
    fn disjoint_sets_need_little_work() {
        let inst = set_intersect_disjoint(1000);
        let run = merge_intersection(&inst.hypergraph, &inst.relations).unwrap();
        assert!(run.tuples.is_empty());
        assert!(run.work < 64, "work {}", run.work);
    }

    #[test]
    fn refusals() {
        let inst = triangle_random(6, 0.5, 1);
        assert_eq!(yannakakis(&inst.hypergraph, &inst.relations), Err(BaselineError::Cyclic));
        assert_eq!(merge_intersection(&inst.hypergraph, &inst.relations), Err(BaselineError::NotIntersection));
    }
}
