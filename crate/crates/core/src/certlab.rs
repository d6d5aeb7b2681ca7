//! Comparison certificates on small instances. The brute-force join here
//! also reports witnesses, and the linear-size certificate is built from the
//! sorted values of every attribute.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::querygraph::Gao;
use crate::storage::{Relation, StorageError, TrieIndex};
use crate::value::{Ext, Value};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertError {
    #[error("relation {rel} has no variable {idx:?}")]
    ShapeMismatch { rel: usize, idx: Vec<usize> },
    #[error("instances have different index shapes")]
    InstanceShapes,
    #[error("comparison {0} relates variables of different attributes")]
    AttributeMismatch(String),
    #[error("cannot parse comparison `{0}`")]
    Parse(String),
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// A symbolic variable `R[x]`: relation number and 1-based index tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var {
    pub rel: usize,
    pub idx: Vec<usize>,
}

impl Var {
    pub fn new(rel: usize, idx: Vec<usize>) -> Self {
        Var { rel, idx }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Op {
    Lt,
    Eq,
    Gt,
}

impl Op {
    fn holds(self, l: Value, r: Value) -> bool {
        match self {
            Op::Lt => l < r,
            Op::Eq => l == r,
            Op::Gt => l > r,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Op::Lt => "<",
            Op::Eq => "=",
            Op::Gt => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Comparison {
    pub left: Var,
    pub op: Op,
    pub right: Var,
}

impl Comparison {
    pub fn new(left: Var, op: Op, right: Var) -> Self {
        Comparison { left, op, right }
    }
}

/// A set of comparisons.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Argument(pub BTreeSet<Comparison>);

impl Argument {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: &Comparison) -> bool {
        self.0.contains(c)
    }

    pub fn equalities(&self) -> usize {
        self.0.iter().filter(|c| c.op == Op::Eq).count()
    }

    /// One comparison per line, e.g. `R[1,2] < S[1]`.
    pub fn to_text(&self, inst: &Instance) -> String {
        self.0.iter().map(|c| inst.render(c) + "\n").collect()
    }

    pub fn parse(text: &str, inst: &Instance) -> Result<Argument, CertError> {
        let mut out = BTreeSet::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            out.insert(inst.parse_comparison(line)?);
        }
        Ok(Argument(out))
    }
}

/// Relations indexed under one attribute order.
#[derive(Clone, Debug)]
pub struct Instance {
    gao: Gao,
    relations: Vec<Relation>,
    indexes: Vec<TrieIndex>,
}

/// Join output by attribute id together with the witnesses, each a list of
/// one full index tuple per relation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JoinResult {
    pub tuples: BTreeSet<Vec<Value>>,
    pub witnesses: BTreeSet<Vec<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    /// One of the instances violates the argument, so nothing was compared.
    pub vacuous: bool,
    pub same: bool,
}

impl Instance {
    pub fn new(relations: Vec<Relation>, gao: Gao) -> Result<Self, CertError> {
        let indexes = relations
            .iter()
            .map(|r| TrieIndex::build(r, &gao))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Instance { gao, relations, indexes })
    }

    pub fn gao(&self) -> &Gao {
        &self.gao
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn indexes(&self) -> &[TrieIndex] {
        &self.indexes
    }

    /// Total number of input tuples.
    pub fn size(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(Relation::arity).max().unwrap_or(0)
    }

    pub fn is_valid(&self, v: &Var) -> bool {
        let Some(idx) = self.indexes.get(v.rel) else { return false };
        if v.idx.is_empty() || v.idx.len() > idx.arity() {
            return false;
        }
        (0..v.idx.len()).all(|k| (1..=idx.fanout(&v.idx[..k])).contains(&v.idx[k]))
    }

    pub fn value(&self, v: &Var) -> Result<Value, CertError> {
        if !self.is_valid(v) {
            return Err(CertError::ShapeMismatch { rel: v.rel, idx: v.idx.clone() });
        }
        match self.indexes[v.rel].access(&v.idx) {
            Ext::Fin(x) => Ok(x),
            _ => unreachable!("valid index tuples address stored values"),
        }
    }

    /// Attribute id a variable ranges over.
    pub fn attribute_of(&self, v: &Var) -> Option<usize> {
        self.is_valid(v).then(|| self.indexes[v.rel].attrs()[v.idx.len() - 1])
    }

    /// All variables, grouped by attribute id.
    pub fn variables(&self) -> BTreeMap<usize, Vec<Var>> {
        let mut out: BTreeMap<usize, Vec<Var>> = BTreeMap::new();
        for (rel, idx) in self.indexes.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for full in idx.full_index_tuples() {
                for k in 1..=full.len() {
                    if seen.insert(full[..k].to_vec()) {
                        out.entry(idx.attrs()[k - 1]).or_default().push(Var::new(rel, full[..k].to_vec()));
                    }
                }
            }
        }
        out
    }

    /// Same relations and the same set of index tuples.
    pub fn same_shape(&self, other: &Instance) -> bool {
        self.gao == other.gao
            && self.indexes.len() == other.indexes.len()
            && self.indexes.iter().zip(&other.indexes).all(|(a, b)| {
                a.attrs() == b.attrs() && a.full_index_tuples() == b.full_index_tuples()
            })
    }

    /// Applies `f(attribute, value)` to every stored value. A map that is
    /// strictly increasing in the value for each attribute keeps the index
    /// shape.
    pub fn revalue(&self, f: impl Fn(usize, Value) -> Value) -> Result<Instance, CertError> {
        let relations = self
            .relations
            .iter()
            .map(|r| {
                let tuples = r
                    .tuples()
                    .iter()
                    .map(|t| t.iter().zip(&r.attrs).map(|(&v, &a)| f(a, v)).collect())
                    .collect();
                Relation::new(&r.name, r.attrs.clone(), tuples)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Instance::new(relations, self.gao.clone())
    }

    fn render_var(&self, v: &Var) -> String {
        let name = self.indexes.get(v.rel).map_or("?", |i| i.name());
        let idx: Vec<String> = v.idx.iter().map(usize::to_string).collect();
        format!("{name}[{}]", idx.join(","))
    }

    pub fn render(&self, c: &Comparison) -> String {
        format!("{} {} {}", self.render_var(&c.left), c.op.symbol(), self.render_var(&c.right))
    }

    fn parse_var(&self, s: &str) -> Result<Var, CertError> {
        let bad = || CertError::Parse(s.to_string());
        let (name, rest) = s.trim().split_once('[').ok_or_else(bad)?;
        let body = rest.strip_suffix(']').ok_or_else(bad)?;
        let rel = self.indexes.iter().position(|i| i.name() == name.trim()).ok_or_else(bad)?;
        let idx = body
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Var::new(rel, idx))
    }

    fn parse_comparison(&self, line: &str) -> Result<Comparison, CertError> {
        for (sym, op) in [("<", Op::Lt), ("=", Op::Eq), (">", Op::Gt)] {
            if let Some((l, r)) = line.split_once(sym) {
                return Ok(Comparison::new(self.parse_var(l)?, op, self.parse_var(r)?));
            }
        }
        Err(CertError::Parse(line.to_string()))
    }
}

/// Exact natural join by backtracking over the relations, one full index
/// tuple at a time.
pub fn nested_loop_join(inst: &Instance) -> JoinResult {
    let n = inst.gao.len();
    let rows: Vec<Vec<(Vec<usize>, Vec<Value>)>> = inst
        .indexes
        .iter()
        .map(|idx| {
            idx.full_index_tuples()
                .into_iter()
                .map(|x| {
                    let vals = (1..=x.len())
                        .map(|k| idx.access(&x[..k]).finite().expect("stored value"))
                        .collect();
                    (x, vals)
                })
                .collect()
        })
        .collect();
    let mut out = JoinResult::default();
    let mut assign: Vec<Option<Value>> = vec![None; n];
    let mut chosen = Vec::new();
    join_rec(inst, &rows, 0, &mut assign, &mut chosen, &mut out);
    out
}

fn join_rec(
    inst: &Instance,
    rows: &[Vec<(Vec<usize>, Vec<Value>)>],
    r: usize,
    assign: &mut Vec<Option<Value>>,
    chosen: &mut Vec<Vec<usize>>,
    out: &mut JoinResult,
) {
    if r == rows.len() {
        if let Some(t) = assign.iter().copied().collect::<Option<Vec<_>>>() {
            out.tuples.insert(t);
            out.witnesses.insert(chosen.clone());
        }
        return;
    }
    let attrs = inst.indexes[r].attrs();
    for (x, vals) in &rows[r] {
        let saved = assign.clone();
        let ok = attrs.iter().zip(vals).all(|(&a, &v)| match assign[a] {
            Some(w) => w == v,
            None => {
                assign[a] = Some(v);
                true
            }
        });
        if ok {
            chosen.push(x.clone());
            join_rec(inst, rows, r + 1, assign, chosen, out);
            chosen.pop();
        }
        *assign = saved;
    }
}

/// For every attribute, equalities from each group of equal-valued variables
/// to its least member, then a `<` chain through the group representatives.
pub fn build_upper_bound_certificate(inst: &Instance) -> Argument {
    let mut out = BTreeSet::new();
    for vars in inst.variables().into_values() {
        let mut valued: Vec<(Value, Var)> = vars
            .into_iter()
            .map(|v| (inst.value(&v).expect("listed variables are valid"), v))
            .collect();
        valued.sort();
        let mut centers: Vec<&Var> = Vec::new();
        let mut i = 0;
        while i < valued.len() {
            let (val, center) = &valued[i];
            let mut j = i + 1;
            while j < valued.len() && valued[j].0 == *val {
                out.insert(Comparison::new(center.clone(), Op::Eq, valued[j].1.clone()));
                j += 1;
            }
            centers.push(center);
            i = j;
        }
        for w in centers.windows(2) {
            out.insert(Comparison::new(w[0].clone(), Op::Lt, w[1].clone()));
        }
    }
    Argument(out)
}

pub fn verify_satisfies(inst: &Instance, arg: &Argument) -> Result<bool, CertError> {
    let mut all = true;
    for c in &arg.0 {
        let (l, r) = (inst.value(&c.left)?, inst.value(&c.right)?);
        if inst.attribute_of(&c.left) != inst.attribute_of(&c.right) {
            return Err(CertError::AttributeMismatch(inst.render(c)));
        }
        all &= c.op.holds(l, r);
    }
    Ok(all)
}

/// Compares the witness sets of two instances that both satisfy `arg`. This
/// is a necessary condition for `arg` to be a certificate, not a proof.
pub fn witness_equivalence_check(
    arg: &Argument,
    a: &Instance,
    b: &Instance,
) -> Result<WitnessCheck, CertError> {
    if !a.same_shape(b) {
        return Err(CertError::InstanceShapes);
    }
    if !verify_satisfies(a, arg)? || !verify_satisfies(b, arg)? {
        return Ok(WitnessCheck { vacuous: true, same: true });
    }
    let same = nested_loop_join(a).witnesses == nested_loop_join(b).witnesses;
    Ok(WitnessCheck { vacuous: false, same })
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
