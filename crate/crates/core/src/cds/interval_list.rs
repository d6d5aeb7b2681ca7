use serde::{Deserialize, Serialize};

use super::sorted_list::SortedList;
use super::CdsError;
use crate::value::{Ext, Value};

/// Role of a stored endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    /// Left end of an interval.
    L,
    /// Right end of one interval and left end of the next.
    M,
    /// Right end of an interval.
    R,
}

/// A union of open intervals over the extended integers, stored as a sorted
/// list of tagged endpoints of disjoint pieces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalList {
    ends: SortedList<Ext, Tag>,
}

impl IntervalList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    /// Number of stored endpoints.
    pub fn endpoint_count(&self) -> usize {
        self.ends.len()
    }

    /// Smallest `v' >= v` not covered by any stored interval.
    pub fn next(&self, v: Ext) -> Ext {
        match self.ends.find_lub(v) {
            None => v,
            Some((u, Tag::R | Tag::M)) => u,
            Some((_, Tag::L)) => v,
        }
    }

    pub fn next_value(&self, v: Value) -> Ext {
        self.next(Ext::Fin(v))
    }

    pub fn covers(&self, v: Ext) -> bool {
        match self.ends.find_lub(v) {
            Some((u, Tag::R | Tag::M)) => u != v,
            _ => false,
        }
    }

    pub fn covers_value(&self, v: Value) -> bool {
        self.covers(Ext::Fin(v))
    }

    /// Adds the open interval `(lo, hi)` to the union.
    pub fn insert(&mut self, lo: Ext, hi: Ext) -> Result<(), CdsError> {
        if lo >= hi {
            return Err(CdsError::MalformedInterval { lo, hi });
        }
        let lo_covered = self.covers(lo);
        let hi_covered = self.covers(hi);
        self.ends.delete_interval(lo, hi);
        if !lo_covered {
            match self.ends.find(lo).copied() {
                Some(Tag::R) => {
                    self.ends.insert(lo, Tag::M);
                }
                Some(Tag::L | Tag::M) => {}
                None => {
                    self.ends.insert(lo, Tag::L);
                }
            }
        }
        if !hi_covered {
            match self.ends.find(hi).copied() {
                Some(Tag::L) => {
                    self.ends.insert(hi, Tag::M);
                }
                Some(Tag::R | Tag::M) => {}
                None => {
                    self.ends.insert(hi, Tag::R);
                }
            }
        }
        Ok(())
    }

    /// The stored pieces, in order. Adjacent pieces sharing a mixed endpoint
    /// are reported separately.
    pub fn intervals(&self) -> Vec<(Ext, Ext)> {
        let mut out = Vec::new();
        let mut open: Option<Ext> = None;
        for (k, tag) in self.ends.iter() {
            match tag {
                Tag::L => open = Some(k),
                Tag::M => {
                    out.push((open.expect("mixed endpoint closes an open piece"), k));
                    open = Some(k);
                }
                Tag::R => {
                    out.push((open.take().expect("right endpoint closes an open piece"), k));
                }
            }
        }
        out
    }

    pub fn endpoints(&self) -> Vec<(Ext, Tag)> {
        self.ends.iter().map(|(k, t)| (k, *t)).collect()
    }

    /// Maximal runs of integers in the closed range `[a, b]` covered by the
    /// union, as closed ranges. Infinite ends stand for unbounded runs.
    pub fn covered_runs_ext(&self, a: Ext, b: Ext) -> Vec<(Ext, Ext)> {
        let mut runs = Vec::new();
        if a > b {
            return runs;
        }
        let mut push = |s: Ext, e: Ext| {
            let e = e.min(b);
            if s <= e {
                runs.push((s, e));
            }
        };
        let mut start = self.covers(a).then_some(a);
        for (k, tag) in self.ends.iter_from(a) {
            if k > b {
                break;
            }
            match tag {
                Tag::L => start = Some(k.succ()),
                Tag::M => {
                    if let Some(s) = start {
                        push(s, k.pred());
                    }
                    start = Some(k.succ());
                }
                Tag::R => {
                    if let Some(s) = start.take() {
                        push(s, k.pred());
                    }
                }
            }
        }
        if let Some(s) = start {
            push(s, b);
        }
        runs
    }

    /// Maximal runs of integers in `[a, b]` not covered by the union.
    pub fn uncovered_runs_ext(&self, a: Ext, b: Ext) -> Vec<(Ext, Ext)> {
        let mut out = Vec::new();
        let mut cur = a;
        for (s, e) in self.covered_runs_ext(a, b) {
            if cur < s {
                out.push((cur, s.pred()));
            }
            cur = e.succ();
            if e == Ext::PosInf {
                return out;
            }
        }
        if cur <= b {
            out.push((cur, b));
        }
        out
    }

    pub fn covered_runs(&self, a: Value, b: Value) -> Vec<(Value, Value)> {
        self.covered_runs_ext(Ext::Fin(a), Ext::Fin(b))
            .into_iter()
            .filter_map(|(s, e)| Some((s.finite()?, e.finite()?)))
            .collect()
    }

    /// Whether every integer of `[a, b]` is covered.
    pub fn covers_range(&self, a: Value, b: Value) -> bool {
        a > b || (self.covers_value(a) && self.next_value(a) > Ext::Fin(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fin(v: i64) -> Ext {
        Ext::Fin(v)
    }

    #[test]
    fn adjacent_pieces_keep_the_shared_point_free() {
        let mut l = IntervalList::new();
        l.insert(fin(2), fin(5)).unwrap();
        l.insert(fin(5), fin(9)).unwrap();
        assert_eq!(l.endpoints(), vec![(fin(2), Tag::L), (fin(5), Tag::M), (fin(9), Tag::R)]);
        assert!(!l.covers(fin(5)));
        assert_eq!(l.intervals(), vec![(fin(2), fin(5)), (fin(5), fin(9))]);
    }

    #[test]
    fn contained_insert_changes_nothing() {
        let mut l = IntervalList::new();
        l.insert(fin(1), fin(10)).unwrap();
        l.insert(fin(3), fin(4)).unwrap();
        assert_eq!(l.intervals(), vec![(fin(1), fin(10))]);
    }

    #[test]
    fn overlapping_inserts_merge() {
        let mut l = IntervalList::new();
        l.insert(fin(1), fin(4)).unwrap();
        l.insert(fin(3), fin(8)).unwrap();
        assert!(l.covers(fin(2)) && l.covers(fin(5)));
        assert!(!l.covers(fin(1)) && !l.covers(fin(8)));
        assert_eq!(l.intervals(), vec![(fin(1), fin(8))]);
    }

    #[test]
    fn next_examples() {
        let mut l = IntervalList::new();
        assert_eq!(l.next(fin(-1)), fin(-1));
        l.insert(fin(1), fin(10)).unwrap();
        assert_eq!(l.next(fin(5)), fin(10));
        let mut l = IntervalList::new();
        l.insert(Ext::NegInf, fin(1)).unwrap();
        l.insert(fin(1), fin(3)).unwrap();
        assert_eq!(l.next(fin(-1)), fin(1));
        l.insert(fin(0), Ext::PosInf).unwrap();
        assert_eq!(l.next(fin(-1)), Ext::PosInf);
    }

    #[test]
    fn malformed_interval_rejected() {
        let mut l = IntervalList::new();
        assert!(l.insert(fin(3), fin(3)).is_err());
        assert!(l.insert(Ext::PosInf, fin(3)).is_err());
    }

    #[test]
    fn covered_runs_on_closed_ranges() {
        let mut l = IntervalList::new();
        l.insert(fin(1), fin(4)).unwrap();
        l.insert(fin(4), fin(7)).unwrap();
        l.insert(fin(9), fin(10)).unwrap();
        assert_eq!(l.covered_runs(0, 9), vec![(2, 3), (5, 6)]);
        assert!(l.covers_range(2, 3));
        assert!(!l.covers_range(2, 4));
        assert_eq!(
            l.uncovered_runs_ext(Ext::Fin(0), Ext::PosInf),
            vec![(fin(0), fin(1)), (fin(4), fin(4)), (fin(7), Ext::PosInf)]
        );
        let mut u = IntervalList::new();
        u.insert(Ext::NegInf, fin(3)).unwrap();
        assert_eq!(u.covered_runs_ext(Ext::NegInf, Ext::PosInf), vec![(Ext::NegInf, fin(2))]);
    }

    #[derive(Clone, Debug)]
    enum Op {
        Insert(i64, i64),
        Next(i64),
        Covers(i64),
    }

    const DOMAIN: i64 = 256;

    fn endpoint(v: i64) -> Ext {
        match v {
            -2 => Ext::NegInf,
            v if v > DOMAIN => Ext::PosInf,
            v => fin(v),
        }
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (-2i64..=DOMAIN, 1i64..40).prop_map(|(lo, len)| Op::Insert(lo, lo + len)),
            (-1i64..=DOMAIN).prop_map(Op::Next),
            (-1i64..=DOMAIN).prop_map(Op::Covers),
        ]
    }

    proptest! {
        #[test]
        fn matches_bitmap_oracle(ops in proptest::collection::vec(op(), 1..200)) {
            // bitmap over -1..=DOMAIN, index v+1
            let mut bitmap = vec![false; DOMAIN as usize + 2];
            let mut l = IntervalList::new();
            for op in ops {
                match op {
                    Op::Insert(lo, hi) => {
                        let (lo, hi) = (endpoint(lo), endpoint(hi));
                        l.insert(lo, hi).unwrap();
                        for v in -1..=DOMAIN {
                            if lo < fin(v) && fin(v) < hi {
                                bitmap[(v + 1) as usize] = true;
                            }
                        }
                    }
                    Op::Next(v) => {
                        let expect = (v..=DOMAIN)
                            .find(|&w| !bitmap[(w + 1) as usize])
                            .map(fin);
                        let got = l.next(fin(v));
                        match expect {
                            Some(e) => prop_assert_eq!(got, e),
                            None => prop_assert!(got > fin(DOMAIN)),
                        }
                    }
                    Op::Covers(v) => prop_assert_eq!(l.covers(fin(v)), bitmap[(v + 1) as usize]),
                }
            }
        }
    }
}
