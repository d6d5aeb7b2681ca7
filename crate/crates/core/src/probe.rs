//! Probe-point search over a constraint tree.
//!
//! Both variants build the probe one attribute at a time. At depth `i` they
//! collect the nodes whose pattern generalizes the current prefix, find the
//! least value not covered by any of them, and backtrack when no value is
//! left. The chain variant needs those nodes to form a chain, which holds for
//! beta-acyclic queries under a nested elimination order. The general variant
//! walks a chain of pattern meets ("shadows") instead.

use crate::cds::{Cds, CdsError, CdsStats, Component, Constraint, ConstraintTree, NodeId, Pattern};
use crate::value::{Ext, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeMode {
    Chain,
    Shadow,
}

/// Constraint tree plus the probe algorithm matching the attribute order.
#[derive(Clone, Debug)]
pub struct TreeCds {
    tree: ConstraintTree,
    mode: ProbeMode,
}

impl TreeCds {
    pub fn new(arity: usize, mode: ProbeMode) -> Self {
        TreeCds { tree: ConstraintTree::new(arity), mode }
    }

    pub fn tree(&self) -> &ConstraintTree {
        &self.tree
    }

    pub fn tree_mut(&mut self) -> &mut ConstraintTree {
        &mut self.tree
    }

    pub fn mode(&self) -> ProbeMode {
        self.mode
    }
}

impl Cds for TreeCds {
    fn insert(&mut self, c: &Constraint) -> Result<(), CdsError> {
        self.tree.insert(c).map(|_| ())
    }

    fn probe(&mut self) -> Result<Option<Vec<Value>>, CdsError> {
        match self.mode {
            ProbeMode::Chain => probe_chain(&mut self.tree),
            ProbeMode::Shadow => probe_shadow(&mut self.tree),
        }
    }

    fn stats(&self) -> CdsStats {
        self.tree.stats()
    }
}

/// Orders `g` bottom (most specialized) first and checks it is a chain.
pub fn chain_order(tree: &ConstraintTree, g: &[NodeId]) -> Option<Vec<NodeId>> {
    let mut chain = g.to_vec();
    chain.sort_by(|&a, &b| {
        let (pa, pb) = (tree.pattern(a), tree.pattern(b));
        pb.equality_count().cmp(&pa.equality_count()).then_with(|| pa.cmp(pb))
    });
    chain
        .windows(2)
        .all(|w| tree.pattern(w[0]).specializes(tree.pattern(w[1])))
        .then_some(chain)
}

fn backtrack_constraint(bottom: &Pattern, i0: usize) -> Constraint {
    let comps = bottom.components();
    let Component::Eq(p) = comps[i0 - 1] else {
        unreachable!("i0 indexes an equality component")
    };
    Constraint {
        prefix: Pattern(comps[..i0 - 1].to_vec()),
        lo: Ext::Fin(p - 1),
        hi: Ext::Fin(p + 1),
    }
}

fn memo(tree: &mut ConstraintTree, node: NodeId, x: Ext, y: Ext) -> Result<(), CdsError> {
    if y > x {
        let c = Constraint { prefix: tree.pattern(node).clone(), lo: x.pred(), hi: y };
        tree.stats.memo_inserts += 1;
        tree.insert(&c)?;
    }
    Ok(())
}

/// Smallest `y >= x` uncovered at `chain[j]` and every node above it.
pub fn next_chain_val(
    tree: &mut ConstraintTree,
    x: Ext,
    chain: &[NodeId],
    j: usize,
) -> Result<Ext, CdsError> {
    let u = chain[j];
    if j + 1 == chain.len() {
        return Ok(tree.next(u, x));
    }
    let mut y = x;
    loop {
        let z = next_chain_val(tree, y, chain, j + 1)?;
        y = tree.next(u, z);
        if y == z {
            break;
        }
    }
    memo(tree, u, x, y)?;
    Ok(y)
}

/// Probe search for chain-shaped principal filters. Errors when a filter is
/// not a chain.
pub fn probe_chain(tree: &mut ConstraintTree) -> Result<Option<Vec<Value>>, CdsError> {
    let n = tree.arity();
    let mut t: Vec<Value> = vec![-1; n];
    let mut i = 0;
    while i < n {
        let g = tree.principal_filter(&t[..i]);
        if g.is_empty() {
            t[i] = -1;
            i += 1;
            continue;
        }
        let chain = chain_order(tree, &g).ok_or(CdsError::NotAChain { depth: i })?;
        let next = next_chain_val(tree, Ext::Fin(-1), &chain, 0)?;
        let bottom = tree.pattern(chain[0]).clone();
        match next {
            Ext::Fin(v) => {
                t[i] = v;
                i += 1;
            }
            _ => {
                let i0 = bottom.last_equality();
                if i0 == 0 {
                    return Ok(None);
                }
                tree.stats.backtracks += 1;
                tree.insert(&backtrack_constraint(&bottom, i0))?;
                i = i0 - 1;
            }
        }
    }
    Ok(Some(t))
}

/// Sorts `g` by (equality count descending, pattern), a linear extension of
/// the specialization order.
pub fn linearize(tree: &ConstraintTree, g: &[NodeId]) -> Vec<NodeId> {
    let mut lin = g.to_vec();
    lin.sort_by(|&a, &b| {
        let (pa, pb) = (tree.pattern(a), tree.pattern(b));
        pb.equality_count().cmp(&pa.equality_count()).then_with(|| pa.cmp(pb))
    });
    lin
}

/// Shadow patterns: the meet of each node's pattern with all later ones.
pub fn shadow_patterns(patterns: &[Pattern]) -> Result<Vec<Pattern>, CdsError> {
    let mut out = vec![Pattern::default(); patterns.len()];
    let mut acc: Option<Pattern> = None;
    for j in (0..patterns.len()).rev() {
        let m = match &acc {
            None => patterns[j].clone(),
            Some(a) => patterns[j].meet(a).ok_or_else(|| {
                CdsError::Invariant(format!("patterns {} and {a} have no meet", patterns[j]))
            })?,
        };
        out[j] = m.clone();
        acc = Some(m);
    }
    Ok(out)
}

/// `nextChainVal` on the two-element chain `shadow ⪯ original`.
fn next_pair_val(
    tree: &mut ConstraintTree,
    x: Ext,
    shadow: NodeId,
    original: NodeId,
) -> Result<Ext, CdsError> {
    if shadow == original {
        next_chain_val(tree, x, &[shadow], 0)
    } else {
        next_chain_val(tree, x, &[shadow, original], 0)
    }
}

/// Smallest `y >= x` uncovered at entry `j` of the shadow chain and every
/// entry above it; each entry consults both its shadow and its original node.
pub fn next_shadow_chain_val(
    tree: &mut ConstraintTree,
    x: Ext,
    entries: &[(NodeId, NodeId)],
    j: usize,
) -> Result<Ext, CdsError> {
    let (shadow, original) = entries[j];
    if j + 1 == entries.len() {
        return next_pair_val(tree, x, shadow, original);
    }
    let mut y = x;
    loop {
        let z = next_shadow_chain_val(tree, y, entries, j + 1)?;
        y = next_pair_val(tree, z, shadow, original)?;
        if y == z {
            break;
        }
    }
    // Recorded at the shadow node: the skipped values are only known to be
    // dead for tuples matching every pattern above, i.e. the shadow.
    memo(tree, shadow, x, y)?;
    Ok(y)
}

/// Probe search for arbitrary attribute orders.
pub fn probe_shadow(tree: &mut ConstraintTree) -> Result<Option<Vec<Value>>, CdsError> {
    let n = tree.arity();
    let mut t: Vec<Value> = vec![-1; n];
    let mut i = 0;
    while i < n {
        let g = tree.principal_filter(&t[..i]);
        if g.is_empty() {
            t[i] = -1;
            i += 1;
            continue;
        }
        let lin = linearize(tree, &g);
        let patterns: Vec<Pattern> = lin.iter().map(|&v| tree.pattern(v).clone()).collect();
        let shadows = shadow_patterns(&patterns)?;
        let mut entries = Vec::with_capacity(lin.len());
        for (sp, &orig) in shadows.iter().zip(&lin) {
            let node = match tree.find(sp) {
                Some(v) => v,
                None => {
                    tree.stats.shadow_nodes += 1;
                    tree.insert(&Constraint { prefix: sp.clone(), lo: Ext::NegInf, hi: Ext::Fin(0) })?;
                    tree.find(sp).ok_or_else(|| {
                        CdsError::Invariant(format!("shadow node {sp} could not be created"))
                    })?
                }
            };
            entries.push((node, orig));
        }
        let next = next_shadow_chain_val(tree, Ext::Fin(-1), &entries, 0)?;
        let bottom = shadows[0].clone();
        match next {
            Ext::Fin(v) => {
                t[i] = v;
                i += 1;
            }
            _ => {
                let i0 = bottom.last_equality();
                if i0 == 0 {
                    return Ok(None);
                }
                tree.stats.backtracks += 1;
                tree.insert(&backtrack_constraint(&bottom, i0))?;
                i = i0 - 1;
            }
        }
    }
    Ok(Some(t))
}
