use std::collections::HashMap;

use super::dyadic::{DyadicNode, DyadicTree};
use crate::cds::{Cds, CdsError, CdsStats, Component, Constraint, IntervalList};
use crate::value::{Ext, Value};

/// Constraint store for three attributes where gaps on `C` that hold for
/// every `b` are aggregated over dyadic ranges of `B`.
///
/// Leaf `j` of the dyadic tree stands for `b = j - 1`, so the probe can
/// start at `b = -1`.
#[derive(Clone, Debug)]
pub struct TriangleCds {
    /// `<(lo, hi), *, *>`
    top: IntervalList,
    /// `<=a, (lo, hi), *>`
    on_b: HashMap<Value, IntervalList>,
    /// `<*, (lo, hi), *>`
    any_b: IntervalList,
    /// `<=a, *, (lo, hi)>`
    a_any: HashMap<Value, IntervalList>,
    /// `<*, =b, (lo, hi)>` at the leaves, derived ranges above.
    tree: DyadicTree,
    /// `<=a, =b, (lo, hi)>`
    pair: HashMap<(Value, Value), IntervalList>,
    /// `<*, *, (lo, hi)>`
    any_c: IntervalList,
    /// Smallest `c` not yet ruled out for `a` and every `b` under a node.
    cache: HashMap<(Value, DyadicNode), Ext>,
    stats: CdsStats,
}

impl TriangleCds {
    /// A store for `B` values up to `max_b`.
    pub fn new(max_b: Value) -> Self {
        let need = (max_b.max(0) as u64 + 3).max(2);
        let depth = need.next_power_of_two().trailing_zeros();
        TriangleCds {
            top: IntervalList::new(),
            on_b: HashMap::new(),
            any_b: IntervalList::new(),
            a_any: HashMap::new(),
            tree: DyadicTree::new(depth),
            pair: HashMap::new(),
            any_c: IntervalList::new(),
            cache: HashMap::new(),
            stats: CdsStats::default(),
        }
    }

    pub fn tree(&self) -> &DyadicTree {
        &self.tree
    }

    /// Largest `b` with a leaf.
    pub fn b_limit(&self) -> Value {
        self.tree.size() as Value - 2
    }

    fn leaf_of(&self, b: Value) -> Option<usize> {
        (-1..=self.b_limit()).contains(&b).then(|| (b + 1) as usize)
    }

    /// Closed `B` range under node `x`.
    fn b_range(&self, x: DyadicNode) -> (Value, Value) {
        let (s, e) = self.tree.span(x);
        (s as Value - 1, e as Value - 2)
    }

    fn add(list: &mut IntervalList, c: &Constraint) -> Result<(), CdsError> {
        list.insert(c.lo, c.hi)
    }

    fn insert_any_b(&mut self, lo: Ext, hi: Ext) -> Result<(), CdsError> {
        self.any_b.insert(lo, hi)?;
        // a `b` excluded outright also excludes every `c` under it
        let first = match lo.succ() {
            Ext::Fin(v) => v.max(-1),
            Ext::NegInf => -1,
            Ext::PosInf => return Ok(()),
        };
        let last = match hi.pred() {
            Ext::Fin(v) => v.min(self.b_limit()),
            Ext::PosInf => self.b_limit(),
            Ext::NegInf => return Ok(()),
        };
        for b in first..=last {
            self.tree.insert((b + 1) as usize, Ext::NegInf, Ext::PosInf);
        }
        Ok(())
    }

    fn backtrack_a(&mut self, a: Value) {
        self.stats.backtracks += 1;
        self.stats.tree_inserts += 1;
        self.top.insert(Ext::Fin(a - 1), Ext::Fin(a + 1)).expect("nonempty interval");
    }

    fn probe_inner(&mut self) -> Option<Vec<Value>> {
        let empty = IntervalList::new();
        'outer: loop {
            // gaps that hold for every a end the search at once; walking the
            // a values one by one would not terminate
            let root = self.tree.list(DyadicTree::ROOT);
            let calls = &mut self.stats.interval_next_calls;
            if next_union(&[root, &self.any_c], Ext::Fin(-1), calls) == Ext::PosInf {
                if self.top.next(Ext::Fin(-1)) != Ext::PosInf {
                    self.stats.backtracks += 1;
                    self.stats.tree_inserts += 1;
                    self.top.insert(Ext::NegInf, Ext::PosInf).expect("nonempty interval");
                }
                return None;
            }
            self.stats.interval_next_calls += 1;
            let a = self.top.next(Ext::Fin(-1)).finite()?;
            let calls = &mut self.stats.interval_next_calls;
            let on_b = self.on_b.get(&a).unwrap_or(&empty);
            let a_any = self.a_any.get(&a).unwrap_or(&empty);
            if next_union(&[on_b, &self.any_b], Ext::Fin(-1), calls) == Ext::PosInf
                || next_union(&[a_any, &self.any_c], Ext::Fin(-1), calls) == Ext::PosInf
            {
                self.backtrack_a(a);
                continue 'outer;
            }
            let mut x = DyadicTree::ROOT;
            let mut floor = Ext::Fin(-1);
            loop {
                let (blo, bhi) = self.b_range(x);
                let calls = &mut self.stats.interval_next_calls;
                let on_b = self.on_b.get(&a).unwrap_or(&empty);
                let a_any = self.a_any.get(&a).unwrap_or(&empty);
                let mut dead = next_union(&[on_b, &self.any_b], Ext::Fin(blo), calls) > Ext::Fin(bhi);
                let mut c = Ext::PosInf;
                if !dead {
                    let cached = self.cache.get(&(a, x)).copied().unwrap_or(Ext::Fin(-1));
                    let z = cached.max(floor);
                    let node = self.tree.list(x);
                    c = if self.tree.is_leaf(x) {
                        let p = self.pair.get(&(a, blo)).unwrap_or(&empty);
                        next_union(&[a_any, node, &self.any_c, p], z, calls)
                    } else {
                        next_union(&[a_any, node, &self.any_c], z, calls)
                    };
                    self.cache.insert((a, x), c);
                    dead = c == Ext::PosInf;
                }
                if dead {
                    // every (b, c) under x is ruled out for this a
                    self.stats.backtracks += 1;
                    self.stats.tree_inserts += 1;
                    let lo = if blo - 1 < 0 { Ext::NegInf } else { Ext::Fin(blo - 1) };
                    self.on_b
                        .entry(a)
                        .or_default()
                        .insert(lo, Ext::Fin(bhi + 1))
                        .expect("nonempty interval");
                    match DyadicTree::next_sibling(x) {
                        Some(y) => {
                            x = y;
                            floor = Ext::Fin(-1);
                        }
                        None => {
                            self.backtrack_a(a);
                            continue 'outer;
                        }
                    }
                } else if self.tree.is_leaf(x) {
                    let c = c.finite().expect("live leaf has a finite c");
                    return Some(vec![a, blo, c]);
                } else {
                    x *= 2;
                    floor = c;
                }
            }
        }
    }
}

/// Smallest value `>= z` covered by none of `lists`.
pub(crate) fn next_union(lists: &[&IntervalList], z: Ext, calls: &mut u64) -> Ext {
    let mut v = z;
    loop {
        let before = v;
        for l in lists {
            *calls += 1;
            v = l.next(v);
        }
        if v == before {
            return v;
        }
    }
}

impl Cds for TriangleCds {
    fn insert(&mut self, c: &Constraint) -> Result<(), CdsError> {
        use Component::{Eq, Star};
        let c = c.normalized();
        self.stats.tree_inserts += 1;
        match c.prefix.components() {
            [] => Self::add(&mut self.top, &c),
            [Eq(a)] => Self::add(self.on_b.entry(*a).or_default(), &c),
            [Star] => self.insert_any_b(c.lo, c.hi),
            [Eq(a), Star] => Self::add(self.a_any.entry(*a).or_default(), &c),
            [Star, Eq(b)] => {
                if let Some(j) = self.leaf_of(*b) {
                    self.tree.insert(j, c.lo, c.hi);
                }
                Ok(())
            }
            [Eq(a), Eq(b)] => Self::add(self.pair.entry((*a, *b)).or_default(), &c),
            [Star, Star] => Self::add(&mut self.any_c, &c),
            _ => Err(CdsError::PositionOutOfRange { position: c.position(), arity: 3 }),
        }
    }

    fn probe(&mut self) -> Result<Option<Vec<Value>>, CdsError> {
        Ok(self.probe_inner())
    }

    fn note_output(&mut self, t: &[Value]) {
        if let (&[a, b, c], Some(j)) = (t, t.get(1).and_then(|&b| self.leaf_of(b))) {
            debug_assert_eq!(self.leaf_of(b), Some(j));
            let x = self.tree.leaf(j);
            let e = self.cache.entry((a, x)).or_insert(Ext::Fin(-1));
            *e = (*e).max(Ext::Fin(c + 1));
        }
    }

    fn stats(&self) -> CdsStats {
        self.stats
    }
}
