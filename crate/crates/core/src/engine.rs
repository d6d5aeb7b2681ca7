//! The outer loop: probe, look for gaps around the probe in every relation,
//! then either emit the probe or record the gaps.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cds::{Cds, CdsError, CdsStats, Component, Constraint, Pattern};
use crate::probe::{ProbeMode, TreeCds};
use crate::querygraph::{Gao, GaoMode, Hypergraph};
use crate::storage::{NodeRef, Relation, StorageError, TrieIndex};
use crate::triangle::TriangleCds;
use crate::value::{Ext, Value};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("attribute order is not a nested elimination order; chain probing needs one")]
    NotNested,
    #[error("triangle mode needs three binary relations forming a triangle")]
    NotTriangle,
    #[error("attribute order covers {got} attributes, query has {expected}")]
    GaoArity { expected: usize, got: usize },
    #[error("expected {expected} relations, got {got}")]
    RelationCount { expected: usize, got: usize },
    #[error("relation `{0}` does not match its query atom")]
    SchemaMismatch(String),
    #[error("probe limit of {0} reached")]
    ProbeLimit(u64),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Cds(#[from] CdsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EvalMode {
    BetaChain,
    ShadowGeneral,
    Triangle,
}

impl From<GaoMode> for EvalMode {
    fn from(m: GaoMode) -> Self {
        match m {
            GaoMode::BetaChain => EvalMode::BetaChain,
            GaoMode::ShadowGeneral => EvalMode::ShadowGeneral,
        }
    }
}

/// A validated query, attribute order and evaluation mode.
#[derive(Clone, Debug)]
pub struct QueryPlan {
    hypergraph: Hypergraph,
    gao: Gao,
    mode: EvalMode,
    /// Per relation, GAO positions of its attributes in increasing order.
    positions: Vec<Vec<usize>>,
}

impl QueryPlan {
    pub fn new(hypergraph: Hypergraph, gao: Gao, mode: EvalMode) -> Result<Self, EngineError> {
        if gao.len() != hypergraph.num_attributes() {
            return Err(EngineError::GaoArity { expected: hypergraph.num_attributes(), got: gao.len() });
        }
        match mode {
            EvalMode::BetaChain if !hypergraph.is_nested_elimination_order(&gao) => {
                return Err(EngineError::NotNested)
            }
            EvalMode::Triangle if !hypergraph.is_triangle() => return Err(EngineError::NotTriangle),
            _ => {}
        }
        let positions = hypergraph
            .edges()
            .iter()
            .map(|e| {
                let mut p: Vec<usize> = e.attrs.iter().map(|&a| gao.position(a)).collect();
                p.sort_unstable();
                p
            })
            .collect();
        Ok(QueryPlan { hypergraph, gao, mode, positions })
    }

    /// Order and mode picked by the query analysis.
    pub fn auto(hypergraph: Hypergraph) -> Self {
        let choice = hypergraph.choose_gao();
        QueryPlan::new(hypergraph, choice.gao, choice.mode.into())
            .expect("chosen order is consistent with its mode")
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    pub fn gao(&self) -> &Gao {
        &self.gao
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    /// Sorts each relation's columns by the plan's order and builds its trie.
    pub fn build_indexes(&self, relations: &[Relation]) -> Result<Vec<TrieIndex>, EngineError> {
        if relations.len() != self.hypergraph.num_edges() {
            return Err(EngineError::RelationCount {
                expected: self.hypergraph.num_edges(),
                got: relations.len(),
            });
        }
        relations
            .iter()
            .zip(self.hypergraph.edges())
            .map(|(r, e)| {
                let mut a = r.attrs.clone();
                let mut b = e.attrs.clone();
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    return Err(EngineError::SchemaMismatch(r.name.clone()));
                }
                Ok(TrieIndex::build(&r.permuted_to(&self.gao), &self.gao)?)
            })
            .collect()
    }
}

/// Monotone counters for one evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EngineStats {
    /// Calls to the probe routine, including the last one that found nothing.
    pub probe_calls: u64,
    /// Constraints inserted by the outer loop (gaps and output exclusions).
    pub constraints_inserted: u64,
    pub find_gap_calls: u64,
    pub output_count: u64,
    /// Value comparisons made inside FindGap.
    pub comparisons: u64,
    pub cds: CdsStats,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions {
    pub trace: bool,
    pub max_probes: Option<u64>,
}

/// One outer-loop iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// The probe, by attribute order position.
    pub probe: Vec<Value>,
    pub output: bool,
    /// Constraints the iteration inserted, in text form.
    pub constraints: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    /// Output tuples indexed by attribute id, in emission order.
    pub tuples: Vec<Vec<Value>>,
    pub stats: EngineStats,
    pub trace: Vec<TraceStep>,
    pub elapsed_ms: f64,
}

impl Evaluation {
    pub fn sorted_tuples(&self) -> Vec<Vec<Value>> {
        let mut t = self.tuples.clone();
        t.sort_unstable();
        t
    }
}

pub fn evaluate(plan: &QueryPlan, indexes: &[TrieIndex]) -> Result<Evaluation, EngineError> {
    evaluate_with(plan, indexes, EvalOptions::default())
}

pub fn evaluate_with(
    plan: &QueryPlan,
    indexes: &[TrieIndex],
    opts: EvalOptions,
) -> Result<Evaluation, EngineError> {
    let h = &plan.hypergraph;
    if indexes.len() != h.num_edges() {
        return Err(EngineError::RelationCount { expected: h.num_edges(), got: indexes.len() });
    }
    for (idx, pos) in indexes.iter().zip(&plan.positions) {
        let got: Vec<usize> = idx.attrs().iter().map(|&a| plan.gao.position(a)).collect();
        if &got != pos {
            return Err(EngineError::SchemaMismatch(idx.name().to_string()));
        }
    }
    let n = h.num_attributes();
    let mut cds: Box<dyn Cds> = match plan.mode {
        EvalMode::BetaChain => Box::new(TreeCds::new(n, ProbeMode::Chain)),
        EvalMode::ShadowGeneral => Box::new(TreeCds::new(n, ProbeMode::Shadow)),
        EvalMode::Triangle => {
            let max_b = indexes
                .iter()
                .zip(&plan.positions)
                .filter_map(|(idx, pos)| pos.iter().position(|&p| p == 1).map(|c| (idx, c)))
                .flat_map(|(idx, c)| level_values(idx, c))
                .max()
                .unwrap_or(0);
            Box::new(TriangleCds::new(max_b))
        }
    };
    run(plan, indexes, cds.as_mut(), opts)
}

fn level_values(idx: &TrieIndex, level: usize) -> Vec<Value> {
    let mut out = Vec::new();
    let mut frontier = vec![idx.root()];
    for depth in 0..=level {
        let mut next = Vec::new();
        for node in frontier {
            for i in 1..=node.fanout() {
                if depth == level {
                    if let Ext::Fin(v) = idx.value_at(node, i) {
                        out.push(v);
                    }
                } else {
                    next.push(idx.child(node, i));
                }
            }
        }
        frontier = next;
    }
    out
}

/// Scratch state for exploring one relation around a probe.
struct Explorer<'a> {
    idx: &'a TrieIndex,
    positions: &'a [usize],
    t: &'a [Value],
    find_gaps: u64,
    comparisons: u64,
    gaps: Vec<Constraint>,
}

impl Explorer<'_> {
    /// Explores the `{l,h}` paths below `node` at relation level `p`, with
    /// `path` holding the values fixed at earlier levels.
    fn explore(&mut self, node: NodeRef, p: usize, path: &mut Vec<Value>) {
        let k = self.positions.len();
        let target = self.t[self.positions[p]];
        self.find_gaps += 1;
        let (lo, hi) = self.idx.gap_in(node, target, &mut self.comparisons);
        let (vlo, vhi) = (self.idx.value_at(node, lo), self.idx.value_at(node, hi));
        if lo != hi {
            // skip intervals with no integer inside
            let has_integer = match (vlo, vhi) {
                (Ext::Fin(a), Ext::Fin(b)) => b > a + 1,
                _ => true,
            };
            if has_integer {
                let mut prefix = vec![Component::Star; self.positions[p]];
                for (j, &v) in path.iter().enumerate() {
                    prefix[self.positions[j]] = Component::Eq(v);
                }
                self.gaps.push(Constraint { prefix: Pattern(prefix), lo: vlo, hi: vhi });
            }
        }
        if p + 1 == k {
            return;
        }
        let children: &[usize] = if lo == hi { &[lo][..] } else { &[lo, hi][..] };
        for &i in children {
            if i == 0 || i > node.fanout() {
                continue;
            }
            let Ext::Fin(v) = self.idx.value_at(node, i) else { unreachable!() };
            path.push(v);
            let child = self.idx.child(node, i);
            self.explore(child, p + 1, path);
            path.pop();
        }
    }

    /// Whether the all-`h` path spells out the probe.
    fn matches(&mut self) -> bool {
        let mut node = self.idx.root();
        for (p, &pos) in self.positions.iter().enumerate() {
            let (lo, hi) = self.idx.gap_in(node, self.t[pos], &mut 0);
            if lo != hi {
                return false;
            }
            if p + 1 < self.positions.len() {
                node = self.idx.child(node, hi);
            }
        }
        true
    }
}

fn run(
    plan: &QueryPlan,
    indexes: &[TrieIndex],
    cds: &mut dyn Cds,
    opts: EvalOptions,
) -> Result<Evaluation, EngineError> {
    let start = Instant::now();
    let n = plan.hypergraph.num_attributes();
    let mut stats = EngineStats::default();
    let mut tuples = Vec::new();
    let mut trace = Vec::new();
    loop {
        if let Some(limit) = opts.max_probes {
            if stats.probe_calls >= limit {
                return Err(EngineError::ProbeLimit(limit));
            }
        }
        stats.probe_calls += 1;
        let Some(t) = cds.probe()? else { break };
        let mut all_match = true;
        let mut gaps = Vec::new();
        for (idx, pos) in indexes.iter().zip(&plan.positions) {
            let mut ex = Explorer {
                idx,
                positions: pos,
                t: &t,
                find_gaps: 0,
                comparisons: 0,
                gaps: Vec::new(),
            };
            ex.explore(idx.root(), 0, &mut Vec::new());
            all_match &= ex.matches();
            stats.find_gap_calls += ex.find_gaps;
            stats.comparisons += ex.comparisons;
            gaps.append(&mut ex.gaps);
        }
        let inserted = if all_match {
            let out = Constraint {
                prefix: Pattern(t[..n - 1].iter().map(|&v| Component::Eq(v)).collect()),
                lo: Ext::Fin(t[n - 1] - 1),
                hi: Ext::Fin(t[n - 1] + 1),
            };
            let mut by_attr = vec![0; n];
            for (p, &a) in plan.gao.order().iter().enumerate() {
                by_attr[a] = t[p];
            }
            tuples.push(by_attr);
            stats.output_count += 1;
            cds.insert(&out)?;
            cds.note_output(&t);
            vec![out]
        } else {
            for c in &gaps {
                cds.insert(c)?;
            }
            gaps
        };
        stats.constraints_inserted += inserted.len() as u64;
        if opts.trace {
            trace.push(TraceStep {
                probe: t,
                output: all_match,
                constraints: inserted.iter().map(|c| c.display_with_arity(n)).collect(),
            });
        }
    }
    stats.cds = cds.stats();
    Ok(Evaluation { tuples, stats, trace, elapsed_ms: start.elapsed().as_secs_f64() * 1e3 })
}

/// Counters next to the reference quantities of the analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatsReport {
    pub probe_calls: u64,
    pub constraints_inserted: u64,
    pub cert_ub: u64,
    pub output: u64,
    /// `2^r * certUB + Z`
    pub probe_reference: u64,
    /// `m * 4^r * certUB + Z`
    pub constraint_reference: u64,
    pub probe_ratio: f64,
    pub constraint_ratio: f64,
}

/// `r` is the largest relation arity and `m` the number of relations.
pub fn stats_report(stats: &EngineStats, cert_ub: u64, z: u64, r: u32, m: u64) -> StatsReport {
    let probe_reference = (1u64 << r) * cert_ub + z;
    let constraint_reference = m * 4u64.pow(r) * cert_ub + z;
    let ratio = |x: u64, y: u64| if y == 0 { x as f64 } else { x as f64 / y as f64 };
    StatsReport {
        probe_calls: stats.probe_calls,
        constraints_inserted: stats.constraints_inserted,
        cert_ub,
        output: z,
        probe_reference,
        constraint_reference,
        probe_ratio: ratio(stats.probe_calls, probe_reference),
        constraint_ratio: ratio(stats.constraints_inserted, constraint_reference),
    }
}
