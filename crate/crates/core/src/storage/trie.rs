use super::{Relation, StorageError};
use crate::querygraph::Gao;
use crate::value::{Ext, Value};

#[derive(Clone, Debug, Default)]
struct Level {
    values: Vec<Value>,
    /// `child_start[i]..child_start[i + 1]` are the children of entry `i` on
    /// the next level. Empty on the last level.
    child_start: Vec<usize>,
}

/// A relation stored as a flattened trie: one sorted array per level, with
/// child ranges pointing into the next level.
///
/// Index tuples are 1-based per level. Coordinate 0 reads as `-inf` and
/// coordinate `fanout + 1` as `+inf`.
#[derive(Clone, Debug)]
pub struct TrieIndex {
    name: String,
    attrs: Vec<usize>,
    levels: Vec<Level>,
    len: usize,
}

/// The children of one trie node: a contiguous range on level `depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRef {
    pub depth: usize,
    pub start: usize,
    pub end: usize,
}

impl NodeRef {
    pub fn fanout(&self) -> usize {
        self.end - self.start
    }
}

impl TrieIndex {
    /// Builds the trie for `rel`; its attributes must already follow `gao`.
    pub fn build(rel: &Relation, gao: &Gao) -> Result<TrieIndex, StorageError> {
        if !rel.is_consistent_with(gao) {
            return Err(StorageError::InconsistentOrder(rel.name.clone()));
        }
        let k = rel.arity();
        let mut levels = vec![Level::default(); k];
        let tuples = rel.tuples();
        for (row, t) in tuples.iter().enumerate() {
            // first level where this tuple departs from the previous one
            let split = if row == 0 {
                0
            } else {
                let prev = &tuples[row - 1];
                (0..k).find(|&j| prev[j] != t[j]).unwrap_or(k)
            };
            for j in split..k {
                if j + 1 < k {
                    let next_len = levels[j + 1].values.len();
                    levels[j].child_start.push(next_len);
                }
                levels[j].values.push(t[j]);
            }
        }
        for j in 0..k.saturating_sub(1) {
            let end = levels[j + 1].values.len();
            levels[j].child_start.push(end);
        }
        Ok(TrieIndex { name: rel.name.clone(), attrs: rel.attrs.clone(), levels, len: tuples.len() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attrs(&self) -> &[usize] {
        &self.attrs
    }

    pub fn arity(&self) -> usize {
        self.levels.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn root(&self) -> NodeRef {
        let end = self.levels.first().map_or(0, |l| l.values.len());
        NodeRef { depth: 0, start: 0, end }
    }

    /// Value at 1-based position `i` under `node`, with the sentinels for 0
    /// and `fanout + 1`.
    pub fn value_at(&self, node: NodeRef, i: usize) -> Ext {
        if i == 0 {
            Ext::NegInf
        } else if i > node.fanout() {
            assert!(i == node.fanout() + 1, "index {i} beyond fanout {} + 1", node.fanout());
            Ext::PosInf
        } else {
            Ext::Fin(self.levels[node.depth].values[node.start + i - 1])
        }
    }

    /// Children of the entry at 1-based position `i` under `node`.
    pub fn child(&self, node: NodeRef, i: usize) -> NodeRef {
        assert!(i >= 1 && i <= node.fanout(), "index {i} out of range 1..={}", node.fanout());
        assert!(node.depth + 1 < self.arity(), "leaf entries have no children");
        let level = &self.levels[node.depth];
        let pos = node.start + i - 1;
        NodeRef { depth: node.depth + 1, start: level.child_start[pos], end: level.child_start[pos + 1] }
    }

    /// Binary search for `a` among the children of `node`. Returns the
    /// tightest 1-based pair `(lo, hi)` with `value(lo) <= a <= value(hi)`;
    /// `lo == hi` exactly when `a` is present. Adds the number of value
    /// comparisons to `comparisons`.
    pub fn gap_in(&self, node: NodeRef, a: Value, comparisons: &mut u64) -> (usize, usize) {
        let vals = &self.levels[node.depth].values[node.start..node.end];
        let below = vals.partition_point(|&v| {
            *comparisons += 1;
            v < a
        });
        if below < vals.len() {
            *comparisons += 1;
            if vals[below] == a {
                return (below + 1, below + 1);
            }
        }
        (below, below + 1)
    }

    /// Node reached by following the in-range index tuple `x` from the root.
    pub fn node(&self, x: &[usize]) -> NodeRef {
        x.iter().fold(self.root(), |node, &i| self.child(node, i))
    }

    /// `R[x]`. Only the last coordinate may be a sentinel.
    pub fn access(&self, x: &[usize]) -> Ext {
        let (last, prefix) = x.split_last().expect("index tuple is nonempty");
        self.value_at(self.node(prefix), *last)
    }

    /// `|R[x, *]|` for an in-range prefix `x`.
    pub fn fanout(&self, x: &[usize]) -> usize {
        if x.len() == self.arity() {
            return 0;
        }
        self.node(x).fanout()
    }

    /// FindGap on the children of the in-range prefix `x`.
    pub fn find_gap(&self, x: &[usize], a: Value) -> (usize, usize) {
        assert!(x.len() < self.arity(), "prefix must be shorter than the arity");
        let mut ignored = 0;
        self.gap_in(self.node(x), a, &mut ignored)
    }

    /// Every full index tuple, in lexicographic order.
    pub fn full_index_tuples(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if self.arity() == 0 {
            return out;
        }
        let mut path = Vec::new();
        self.collect(self.root(), &mut path, &mut out);
        out
    }

    fn collect(&self, node: NodeRef, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for i in 1..=node.fanout() {
            path.push(i);
            if node.depth + 1 == self.arity() {
                out.push(path.clone());
            } else {
                self.collect(self.child(node, i), path, out);
            }
            path.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> TrieIndex {
        let r = Relation::new("R", vec![0, 1], vec![vec![1, 1], vec![1, 8], vec![2, 3], vec![2, 4]]).unwrap();
        TrieIndex::build(&r, &Gao::identity(2)).unwrap()
    }

    #[test]
    fn access_and_fanout() {
        let t = sample();
        assert_eq!(t.fanout(&[]), 2);
        assert_eq!(t.access(&[1]), Ext::Fin(1));
        assert_eq!(t.access(&[2]), Ext::Fin(2));
        assert_eq!(t.access(&[1, 2]), Ext::Fin(8));
        assert_eq!(t.access(&[2, 1]), Ext::Fin(3));
        assert_eq!(t.access(&[1, 0]), Ext::NegInf);
        assert_eq!(t.access(&[1, 3]), Ext::PosInf);
        assert_eq!(t.fanout(&[1]), 2);
    }

    #[test]
    fn find_gap_examples() {
        let t = sample();
        assert_eq!(t.find_gap(&[], 2), (2, 2));
        assert_eq!(t.find_gap(&[1], 5), (1, 2));
        assert_eq!(t.find_gap(&[], 0), (0, 1));
        assert_eq!(t.find_gap(&[1], 9), (2, 3));
    }

    #[test]
    fn empty_and_duplicate_relations() {
        let r = Relation::new("E", vec![0, 1], vec![]).unwrap();
        let t = TrieIndex::build(&r, &Gao::identity(2)).unwrap();
        assert_eq!(t.fanout(&[]), 0);
        assert_eq!(t.find_gap(&[], 4), (0, 1));
        let r = Relation::new("D", vec![0, 1], vec![vec![1, 1], vec![1, 1]]).unwrap();
        let t = TrieIndex::build(&r, &Gao::identity(2)).unwrap();
        assert_eq!(t.fanout(&[]), 1);
        assert_eq!(t.fanout(&[1]), 1);
    }

    #[test]
    fn inconsistent_order_rejected() {
        let r = Relation::new("R", vec![1, 0], vec![vec![1, 2]]).unwrap();
        assert!(matches!(
            TrieIndex::build(&r, &Gao::identity(2)),
            Err(StorageError::InconsistentOrder(_))
        ));
    }

    fn relation() -> impl Strategy<Value = Relation> {
        proptest::collection::vec(proptest::collection::vec(0i64..=32, 3), 0..256)
            .prop_map(|ts| Relation::new("R", vec![0, 1, 2], ts).unwrap())
    }

    proptest! {
        #[test]
        fn find_gap_matches_linear_scan(rel in relation()) {
            let t = TrieIndex::build(&rel, &Gao::identity(3)).unwrap();
            // every in-range prefix of length 0..=2
            let mut prefixes: Vec<Vec<usize>> = vec![vec![]];
            for i in 1..=t.fanout(&[]) {
                prefixes.push(vec![i]);
                for j in 1..=t.fanout(&[i]) {
                    prefixes.push(vec![i, j]);
                }
            }
            for x in prefixes {
                let k = t.fanout(&x);
                let mut vals = vec![Ext::NegInf];
                for i in 1..=k {
                    let mut full = x.clone();
                    full.push(i);
                    vals.push(t.access(&full));
                }
                vals.push(Ext::PosInf);
                prop_assert!(vals.windows(2).all(|w| w[0] < w[1]));
                for a in -1i64..=33 {
                    let lo = (0..=k + 1).rev().find(|&i| vals[i] <= Ext::Fin(a)).unwrap();
                    let hi = (0..=k + 1).find(|&i| vals[i] >= Ext::Fin(a)).unwrap();
                    prop_assert_eq!(t.find_gap(&x, a), (lo, hi));
                }
            }
        }

        #[test]
        fn index_tuples_enumerate_the_relation(rel in relation()) {
            let t = TrieIndex::build(&rel, &Gao::identity(3)).unwrap();
            let rows: Vec<Vec<i64>> = t
                .full_index_tuples()
                .iter()
                .map(|x| (1..=3).map(|j| t.access(&x[..j]).finite().unwrap()).collect())
                .collect();
            prop_assert_eq!(rows, rel.tuples().to_vec());
        }
    }
}
