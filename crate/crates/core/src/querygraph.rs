//! Query hypergraphs, acyclicity tests and global attribute order selection.
//!
//! Attribute sets are kept as `u64` bitmasks, so a query may mention at most
//! 64 attributes.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_ATTRIBUTES: usize = 64;

/// Orders larger than this fall back to the greedy min-degree heuristic.
pub const EXHAUSTIVE_GAO_LIMIT: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryGraphError {
    #[error("query has {0} attributes, at most {MAX_ATTRIBUTES} are supported")]
    TooManyAttributes(usize),
    #[error("relation `{0}` has no attributes")]
    EmptyEdge(String),
    #[error("relation `{0}` mentions attribute id {1} which does not exist")]
    UnknownAttribute(String, usize),
    #[error("relation `{0}` repeats an attribute")]
    RepeatedAttribute(String),
    #[error("attribute `{0}` does not occur in any relation")]
    UncoveredAttribute(String),
    #[error("relation name `{0}` is used twice")]
    DuplicateRelation(String),
    #[error("attribute name `{0}` is used twice")]
    DuplicateAttribute(String),
    #[error("invalid attribute order: {0}")]
    InvalidGao(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    /// Attribute ids in the order the relation lists them.
    pub attrs: Vec<usize>,
}

/// The query hypergraph: one vertex per attribute, one edge per relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    attrs: Vec<String>,
    edges: Vec<Edge>,
    masks: Vec<u64>,
}

fn bit(v: usize) -> u64 {
    1u64 << v
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..MAX_ATTRIBUTES).filter(move |&v| mask & bit(v) != 0)
}

fn is_chain(sets: &[u64]) -> bool {
    let mut sorted = sets.to_vec();
    sorted.sort_by_key(|s| s.count_ones());
    sorted.windows(2).all(|w| w[0] & !w[1] == 0)
}

impl Hypergraph {
    pub fn new(attrs: Vec<String>, edges: Vec<Edge>) -> Result<Self, QueryGraphError> {
        let n = attrs.len();
        if n > MAX_ATTRIBUTES {
            return Err(QueryGraphError::TooManyAttributes(n));
        }
        for (i, a) in attrs.iter().enumerate() {
            if attrs[..i].contains(a) {
                return Err(QueryGraphError::DuplicateAttribute(a.clone()));
            }
        }
        let mut masks = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if edges[..i].iter().any(|o| o.name == e.name) {
                return Err(QueryGraphError::DuplicateRelation(e.name.clone()));
            }
            if e.attrs.is_empty() {
                return Err(QueryGraphError::EmptyEdge(e.name.clone()));
            }
            let mut mask = 0u64;
            for &a in &e.attrs {
                if a >= n {
                    return Err(QueryGraphError::UnknownAttribute(e.name.clone(), a));
                }
                if mask & bit(a) != 0 {
                    return Err(QueryGraphError::RepeatedAttribute(e.name.clone()));
                }
                mask |= bit(a);
            }
            masks.push(mask);
        }
        let covered = masks.iter().fold(0u64, |acc, m| acc | m);
        if let Some(v) = (0..n).find(|&v| covered & bit(v) == 0) {
            return Err(QueryGraphError::UncoveredAttribute(attrs[v].clone()));
        }
        Ok(Hypergraph { attrs, edges, masks })
    }

    /// Builds a hypergraph with attributes `A0..A{n-1}` and relations `R0..`.
    pub fn from_edge_sets(n: usize, edges: &[&[usize]]) -> Result<Self, QueryGraphError> {
        let attrs = (0..n).map(|i| format!("A{i}")).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, e)| Edge { name: format!("R{i}"), attrs: e.to_vec() })
            .collect();
        Hypergraph::new(attrs, edges)
    }

    /// Builds a hypergraph from edge masks; vertices are `0..n`.
    pub fn from_masks(n: usize, masks: &[u64]) -> Result<Self, QueryGraphError> {
        let sets: Vec<Vec<usize>> = masks.iter().map(|&m| bits(m).collect()).collect();
        let refs: Vec<&[usize]> = sets.iter().map(|s| s.as_slice()).collect();
        Hypergraph::from_edge_sets(n, &refs)
    }

    pub fn num_attributes(&self) -> usize {
        self.attrs.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn attributes(&self) -> &[String] {
        &self.attrs
    }

    pub fn attribute_name(&self, id: usize) -> &str {
        &self.attrs[id]
    }

    pub fn attribute_id(&self, name: &str) -> Option<usize> {
        self.attrs.iter().position(|a| a == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_mask(&self, e: usize) -> u64 {
        self.masks[e]
    }

    pub fn edge_masks(&self) -> &[u64] {
        &self.masks
    }

    /// Runs the GYO reduction, returning a join tree when it empties the
    /// hypergraph.
    pub fn gyo_reduce(&self) -> GyoResult {
        gyo(&self.masks)
    }

    pub fn is_alpha_acyclic(&self) -> bool {
        gyo(&self.masks).alpha_acyclic
    }

    /// Repeated nest-point elimination. A hypergraph is beta-acyclic iff this
    /// empties it.
    pub fn is_beta_acyclic(&self) -> bool {
        nest_point_elimination(&self.masks, self.num_attributes()).is_some()
    }

    /// An order whose prefix posets are all chains, built by picking nest
    /// points (smallest id first) as the last remaining attribute.
    pub fn nested_elimination_order(&self) -> Option<Gao> {
        let removed = nest_point_elimination(&self.masks, self.num_attributes())?;
        let mut order = removed;
        order.reverse();
        Some(Gao::new(order).expect("nest-point elimination visits every attribute"))
    }

    /// Every nested elimination order, in lexicographic order, when the query
    /// is small enough to enumerate; otherwise just the greedy one.
    pub fn nested_elimination_orders(&self, limit: usize) -> Vec<Gao> {
        let n = self.num_attributes();
        if n > EXHAUSTIVE_GAO_LIMIT {
            return self.nested_elimination_order().into_iter().collect();
        }
        let mut found = Vec::new();
        for_each_permutation(n, |perm| {
            if found.len() >= limit {
                return;
            }
            let gao = Gao::new(perm.to_vec()).expect("permutation");
            if self.is_nested_elimination_order(&gao) {
                found.push(gao);
            }
        });
        found
    }

    /// The prefix posets `P_1..P_n` of the elimination process driven by `gao`
    /// (index `k - 1` holds `P_k`).
    pub fn prefix_posets(&self, gao: &Gao) -> Vec<PrefixPoset> {
        let n = self.num_attributes();
        assert_eq!(gao.len(), n, "order does not match the hypergraph");
        let mut edges: Vec<u64> = self.masks.clone();
        let mut posets = vec![PrefixPoset::default(); n];
        for k in (1..=n).rev() {
            let v = gao.order[k - 1];
            let sets: Vec<u64> = edges
                .iter()
                .filter(|&&f| f & bit(v) != 0)
                .map(|&f| f & !bit(v))
                .collect();
            let universe = sets.iter().fold(0u64, |acc, s| acc | s);
            let mut next: Vec<u64> = edges.iter().map(|&f| f & !bit(v)).collect();
            next.push(universe);
            next.retain(|&f| f != 0);
            next.sort_unstable();
            next.dedup();
            edges = next;
            let mut dedup = sets;
            dedup.sort_unstable();
            dedup.dedup();
            posets[k - 1] = PrefixPoset { k, sets: dedup };
        }
        posets
    }

    pub fn is_nested_elimination_order(&self, gao: &Gao) -> bool {
        self.prefix_posets(gao).iter().all(PrefixPoset::is_chain)
    }

    /// `max_k |U(P_k)|` for the given order.
    pub fn elimination_width(&self, gao: &Gao) -> usize {
        self.prefix_posets(gao)
            .iter()
            .map(|p| p.universe().count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Minimum elimination width over all orders (exhaustive) together with
    /// the lexicographically first order achieving it.
    pub fn min_width_order(&self) -> (Gao, usize) {
        let mut best: Option<(Vec<usize>, usize)> = None;
        for_each_permutation(self.num_attributes(), |perm| {
            let gao = Gao::new(perm.to_vec()).expect("permutation");
            let w = self.elimination_width(&gao);
            if best.as_ref().is_none_or(|(_, bw)| w < *bw) {
                best = Some((perm.to_vec(), w));
            }
        });
        let (order, w) = best.unwrap_or((Vec::new(), 0));
        (Gao::new(order).expect("permutation"), w)
    }

    /// Greedy min-degree elimination on the Gaifman graph. The first vertex
    /// eliminated is placed last in the returned order.
    pub fn min_degree_order(&self) -> Gao {
        let n = self.num_attributes();
        let mut adj = vec![0u64; n];
        for &m in &self.masks {
            for v in bits(m) {
                adj[v] |= m & !bit(v);
            }
        }
        let mut alive = if n == 64 { u64::MAX } else { bit(n) - 1 };
        let mut eliminated = Vec::with_capacity(n);
        while alive != 0 {
            let v = bits(alive)
                .min_by_key(|&v| ((adj[v] & alive).count_ones(), v))
                .expect("alive is nonempty");
            let nbrs = adj[v] & alive;
            for u in bits(nbrs) {
                adj[u] |= nbrs & !bit(u);
            }
            alive &= !bit(v);
            eliminated.push(v);
        }
        eliminated.reverse();
        Gao::new(eliminated).expect("every vertex eliminated once")
    }

    /// Picks the order used for evaluation: a nested elimination order when
    /// one exists, otherwise the narrowest order found.
    pub fn choose_gao(&self) -> GaoChoice {
        if let Some(gao) = self.nested_elimination_order() {
            let width = self.elimination_width(&gao);
            return GaoChoice { gao, mode: GaoMode::BetaChain, width };
        }
        let (gao, width) = if self.num_attributes() <= EXHAUSTIVE_GAO_LIMIT {
            self.min_width_order()
        } else {
            let gao = self.min_degree_order();
            let w = self.elimination_width(&gao);
            (gao, w)
        };
        GaoChoice { gao, mode: GaoMode::ShadowGeneral, width }
    }

    /// Three binary relations over three attributes, pairwise sharing one
    /// attribute each.
    pub fn is_triangle(&self) -> bool {
        if self.num_attributes() != 3 || self.num_edges() != 3 {
            return false;
        }
        let mut masks = self.masks.clone();
        masks.sort_unstable();
        masks == [0b011, 0b101, 0b110]
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let names: Vec<&str> = e.attrs.iter().map(|&a| self.attrs[a].as_str()).collect();
            write!(f, "{}({})", e.name, names.join(","))?;
        }
        Ok(())
    }
}

/// Outcome of the GYO reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GyoResult {
    pub alpha_acyclic: bool,
    pub join_tree: Option<JoinTree>,
}

/// A join tree over the relations of the query; `parent[e]` is the edge `e`
/// was folded into, `None` for the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinTree {
    pub parent: Vec<Option<usize>>,
}

impl JoinTree {
    pub fn root(&self) -> usize {
        self.parent.iter().position(Option::is_none).expect("join tree has a root")
    }

    pub fn links(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (c, p)))
            .collect()
    }

    pub fn children(&self, e: usize) -> Vec<usize> {
        (0..self.parent.len()).filter(|&c| self.parent[c] == Some(e)).collect()
    }
}

fn gyo(masks: &[u64]) -> GyoResult {
    let m = masks.len();
    let mut cur = masks.to_vec();
    let mut live = vec![true; m];
    let mut parent: Vec<Option<usize>> = vec![None; m];
    let mut remaining = m;
    loop {
        let mut changed = false;
        // private vertices
        let mut seen_once = 0u64;
        let mut seen_twice = 0u64;
        for e in (0..m).filter(|&e| live[e]) {
            seen_twice |= seen_once & cur[e];
            seen_once |= cur[e];
        }
        let private = seen_once & !seen_twice;
        if private != 0 {
            for e in (0..m).filter(|&e| live[e]) {
                if cur[e] & private != 0 {
                    cur[e] &= !private;
                    changed = true;
                }
            }
        }
        // subsumed or empty edges
        for e in 0..m {
            if !live[e] {
                continue;
            }
            let witness = (0..m).find(|&f| f != e && live[f] && cur[e] & !cur[f] == 0);
            if cur[e] == 0 || witness.is_some() {
                live[e] = false;
                remaining -= 1;
                parent[e] = witness;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if remaining == 0 {
        GyoResult { alpha_acyclic: true, join_tree: Some(JoinTree { parent }) }
    } else {
        GyoResult { alpha_acyclic: false, join_tree: None }
    }
}

/// Returns the vertices in removal order, or `None` when no nest point is left
/// before the hypergraph is empty.
fn nest_point_elimination(masks: &[u64], n: usize) -> Option<Vec<usize>> {
    let mut edges: Vec<u64> = masks.to_vec();
    let mut alive: u64 = edges.iter().fold(0, |acc, e| acc | e);
    let mut removed = Vec::with_capacity(n);
    while alive != 0 {
        let v = bits(alive).find(|&v| {
            let incident: Vec<u64> = edges.iter().copied().filter(|e| e & bit(v) != 0).collect();
            is_chain(&incident)
        })?;
        for e in edges.iter_mut() {
            *e &= !bit(v);
        }
        edges.retain(|&e| e != 0);
        alive &= !bit(v);
        removed.push(v);
    }
    Some(removed)
}

/// Calls `f` on every permutation of `0..n` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        f(&perm);
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// A global attribute order: `order[p]` is the attribute id at position `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gao {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Gao {
    pub fn new(order: Vec<usize>) -> Result<Self, QueryGraphError> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (p, &a) in order.iter().enumerate() {
            if a >= n {
                return Err(QueryGraphError::InvalidGao(format!("attribute id {a} out of range")));
            }
            if position[a] != usize::MAX {
                return Err(QueryGraphError::InvalidGao(format!("attribute id {a} repeated")));
            }
            position[a] = p;
        }
        Ok(Gao { order, position })
    }

    pub fn identity(n: usize) -> Self {
        Gao::new((0..n).collect()).expect("identity is a permutation")
    }

    /// Parses a comma separated list of attribute names.
    pub fn parse(h: &Hypergraph, text: &str) -> Result<Self, QueryGraphError> {
        let mut order = Vec::new();
        for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let id = h
                .attribute_id(name)
                .ok_or_else(|| QueryGraphError::InvalidGao(format!("unknown attribute `{name}`")))?;
            order.push(id);
        }
        if order.len() != h.num_attributes() {
            return Err(QueryGraphError::InvalidGao(format!(
                "expected {} attributes, got {}",
                h.num_attributes(),
                order.len()
            )));
        }
        Gao::new(order)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position of attribute `attr` in the order.
    pub fn position(&self, attr: usize) -> usize {
        self.position[attr]
    }

    pub fn names<'a>(&self, h: &'a Hypergraph) -> Vec<&'a str> {
        self.order.iter().map(|&a| h.attribute_name(a)).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrefixPoset {
    /// 1-based depth.
    pub k: usize,
    /// Subsets of the first `k - 1` attributes of the order, as masks of
    /// attribute ids.
    pub sets: Vec<u64>,
}

impl PrefixPoset {
    pub fn is_chain(&self) -> bool {
        is_chain(&self.sets)
    }

    pub fn universe(&self) -> u64 {
        self.sets.iter().fold(0, |acc, s| acc | s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GaoMode {
    BetaChain,
    ShadowGeneral,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaoChoice {
    pub gao: Gao,
    pub mode: GaoMode,
    pub width: usize,
}
