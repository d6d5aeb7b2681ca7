use std::fmt::Write as _;

use super::{CdsError, CdsStats, Component, Constraint, IntervalList, Pattern, SortedList};
use crate::value::{Ext, Value};

pub type NodeId = usize;

#[derive(Clone, Debug)]
struct Node {
    pattern: Pattern,
    equalities: SortedList<Value, NodeId>,
    star: Option<NodeId>,
    intervals: IntervalList,
}

impl Node {
    fn new(pattern: Pattern) -> Self {
        Node { pattern, equalities: SortedList::new(), star: None, intervals: IntervalList::new() }
    }
}

/// Pattern-keyed tree of interval lists. A node at depth `k` holds intervals
/// on attribute `k` (0-based) for tuples matching its pattern.
///
/// Nodes are kept in an arena; branches cut off by a covering interval stay
/// allocated but become unreachable.
#[derive(Clone, Debug)]
pub struct ConstraintTree {
    arity: usize,
    nodes: Vec<Node>,
    pub(crate) stats: CdsStats,
}

impl ConstraintTree {
    pub const ROOT: NodeId = 0;

    pub fn new(arity: usize) -> Self {
        ConstraintTree { arity, nodes: vec![Node::new(Pattern::default())], stats: CdsStats::default() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn stats(&self) -> CdsStats {
        self.stats
    }

    pub fn pattern(&self, id: NodeId) -> &Pattern {
        &self.nodes[id].pattern
    }

    pub fn intervals(&self, id: NodeId) -> &IntervalList {
        &self.nodes[id].intervals
    }

    /// `Next` on the node's interval list, counted in the stats.
    pub fn next(&mut self, id: NodeId, x: Ext) -> Ext {
        self.stats.interval_next_calls += 1;
        self.nodes[id].intervals.next(x)
    }

    /// Inserts a constraint. Returns `false` when it was subsumed by an
    /// interval on its path.
    pub fn insert(&mut self, c: &Constraint) -> Result<bool, CdsError> {
        if c.lo >= c.hi {
            return Err(CdsError::MalformedInterval { lo: c.lo, hi: c.hi });
        }
        if c.position() >= self.arity {
            return Err(CdsError::PositionOutOfRange { position: c.position(), arity: self.arity });
        }
        self.stats.tree_inserts += 1;
        let c = c.normalized();
        let mut v = Self::ROOT;
        for (depth, &comp) in c.prefix.components().iter().enumerate() {
            let next = match comp {
                Component::Eq(x) => {
                    if self.nodes[v].intervals.covers_value(x) {
                        self.stats.subsumed += 1;
                        return Ok(false);
                    }
                    self.nodes[v].equalities.find(x).copied()
                }
                Component::Star => self.nodes[v].star,
            };
            v = match next {
                Some(child) => child,
                None => {
                    let child = self.nodes.len();
                    self.nodes.push(Node::new(Pattern(c.prefix.components()[..=depth].to_vec())));
                    match comp {
                        Component::Eq(x) => {
                            self.nodes[v].equalities.insert(x, child);
                        }
                        Component::Star => self.nodes[v].star = Some(child),
                    }
                    child
                }
            };
        }
        let node = &mut self.nodes[v];
        node.intervals.insert(c.lo, c.hi)?;
        match (c.lo, c.hi) {
            (Ext::NegInf, Ext::PosInf) => {
                node.equalities.delete_range(..);
            }
            (Ext::NegInf, Ext::Fin(h)) => {
                node.equalities.delete_range(..h);
            }
            (Ext::Fin(l), Ext::PosInf) => {
                node.equalities.delete_range(l + 1..);
            }
            (Ext::Fin(l), Ext::Fin(h)) => {
                node.equalities.delete_interval(l, h);
            }
            _ => unreachable!("lo < hi rules out the remaining shapes"),
        }
        Ok(true)
    }

    /// Reachable node with exactly this pattern.
    pub fn find(&self, pattern: &Pattern) -> Option<NodeId> {
        let mut v = Self::ROOT;
        for &comp in pattern.components() {
            v = match comp {
                Component::Eq(x) => *self.nodes[v].equalities.find(x)?,
                Component::Star => self.nodes[v].star?,
            };
        }
        Some(v)
    }

    /// Nodes at depth `prefix.len()` with nonempty intervals whose pattern
    /// generalizes `prefix`, in discovery order.
    pub fn principal_filter(&self, prefix: &[Value]) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![(Self::ROOT, 0usize)];
        while let Some((v, depth)) = stack.pop() {
            if depth == prefix.len() {
                if !self.nodes[v].intervals.is_empty() {
                    out.push(v);
                }
                continue;
            }
            if let Some(s) = self.nodes[v].star {
                stack.push((s, depth + 1));
            }
            if let Some(&e) = self.nodes[v].equalities.find(prefix[depth]) {
                stack.push((e, depth + 1));
            }
        }
        out
    }

    /// Whether the full tuple `t` lies in some gap represented by the tree.
    pub fn covers_tuple(&self, t: &[Value]) -> bool {
        let mut stack = vec![(Self::ROOT, 0usize)];
        while let Some((v, depth)) = stack.pop() {
            if depth >= t.len() {
                continue;
            }
            let node = &self.nodes[v];
            if node.intervals.covers_value(t[depth]) {
                return true;
            }
            if let Some(s) = node.star {
                stack.push((s, depth + 1));
            }
            if let Some(&e) = node.equalities.find(t[depth]) {
                stack.push((e, depth + 1));
            }
        }
        false
    }

    fn reachable(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![Self::ROOT];
        while let Some(v) = stack.pop() {
            out.push(v);
            let node = &self.nodes[v];
            stack.extend(node.equalities.iter().map(|(_, &c)| c));
            stack.extend(node.star);
        }
        out.sort_by(|&a, &b| self.nodes[a].pattern.cmp(&self.nodes[b].pattern));
        out
    }

    pub fn node_count(&self) -> usize {
        self.reachable().len()
    }

    /// No equality label of a reachable node lies inside its own intervals.
    pub fn check_invariant(&self) -> Result<(), CdsError> {
        for v in self.reachable() {
            let node = &self.nodes[v];
            if let Some(label) = node.equalities.keys().find(|&k| node.intervals.covers_value(k)) {
                return Err(CdsError::Invariant(format!(
                    "label {label} of node {} is covered by its own intervals",
                    node.pattern
                )));
            }
        }
        Ok(())
    }

    /// Every stored interval as a constraint, in pattern order.
    pub fn constraints(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        for v in self.reachable() {
            let node = &self.nodes[v];
            for (lo, hi) in node.intervals.intervals() {
                out.push(Constraint { prefix: node.pattern.clone(), lo, hi });
            }
        }
        out
    }

    /// One line per reachable node: `pattern | intervals | equality-labels`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for v in self.reachable() {
            let node = &self.nodes[v];
            let ivs: Vec<String> =
                node.intervals.intervals().iter().map(|(l, h)| format!("({l}, {h})")).collect();
            let mut labels: Vec<String> = node.equalities.keys().map(|k| k.to_string()).collect();
            if node.star.is_some() {
                labels.push("*".to_string());
            }
            let _ = writeln!(s, "{} | {} | {}", node.pattern, ivs.join(" "), labels.join(" "));
        }
        s
    }
}
