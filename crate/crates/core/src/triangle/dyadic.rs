use thiserror::Error;

use crate::cds::IntervalList;
use crate::value::Ext;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DyadicError {
    #[error("range [{lo}, {hi}] does not fit in [0, {size})")]
    OutOfDomain { lo: u64, hi: u64, size: u64 },
}

/// Minimal cover of the closed range `[lo, hi]` of `[0, 2^depth)` by dyadic
/// intervals, returned as half-open ranges in increasing order.
pub fn dyadic_decompose(depth: u32, lo: u64, hi: u64) -> Result<Vec<(u64, u64)>, DyadicError> {
    let size = 1u64 << depth;
    if lo > hi || hi >= size {
        return Err(DyadicError::OutOfDomain { lo, hi, size });
    }
    let mut out = Vec::new();
    let mut start = lo;
    let end = hi + 1;
    while start < end {
        // largest aligned block starting at `start` that fits
        let mut len = if start == 0 { size } else { 1u64 << start.trailing_zeros() };
        while start + len > end {
            len /= 2;
        }
        out.push((start, start + len));
        start += len;
    }
    Ok(out)
}

/// Node ids use the heap layout: the root is 1 and node `x` has children
/// `2x` and `2x + 1`. Leaves are `size..2 * size`.
pub type DyadicNode = usize;

/// Interval lists over the dyadic intervals of `[0, 2^depth)`, maintaining
/// that each internal list covers exactly what both children cover.
#[derive(Clone, Debug)]
pub struct DyadicTree {
    depth: u32,
    lists: Vec<IntervalList>,
}

impl DyadicTree {
    pub fn new(depth: u32) -> Self {
        DyadicTree { depth, lists: vec![IntervalList::new(); 2usize << depth] }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn size(&self) -> usize {
        1usize << self.depth
    }

    pub const ROOT: DyadicNode = 1;

    pub fn leaf(&self, j: usize) -> DyadicNode {
        assert!(j < self.size(), "leaf {j} out of range");
        self.size() + j
    }

    pub fn is_leaf(&self, x: DyadicNode) -> bool {
        x >= self.size()
    }

    /// Leaves `[start, end)` spanned by node `x`.
    pub fn span(&self, x: DyadicNode) -> (usize, usize) {
        let level = usize::BITS - 1 - x.leading_zeros();
        let width = 1usize << (self.depth - level);
        let start = (x - (1usize << level)) * width;
        (start, start + width)
    }

    pub fn list(&self, x: DyadicNode) -> &IntervalList {
        &self.lists[x]
    }

    /// Next node in pre-order after skipping the subtree of `x`: the last
    /// left turn on the path to `x` becomes a right turn.
    pub fn next_sibling(x: DyadicNode) -> Option<DyadicNode> {
        let mut x = x;
        while x > 1 && x % 2 == 1 {
            x /= 2;
        }
        (x > 1).then_some(x + 1)
    }

    /// Adds the open interval `(lo, hi)` at leaf `j` and floats the newly
    /// covered points up. Returns how many interval lists were touched.
    pub fn insert(&mut self, j: usize, lo: Ext, hi: Ext) -> usize {
        let x = self.leaf(j);
        if lo >= hi {
            return 0;
        }
        let (a, b) = (lo.succ(), hi.pred());
        let fresh = self.lists[x].uncovered_runs_ext(a, b);
        if fresh.is_empty() {
            return 0;
        }
        self.lists[x].insert(lo, hi).expect("lo < hi");
        1 + self.float_up(x, fresh)
    }

    /// Pushes closed runs newly covered at `x` into its ancestors wherever the
    /// sibling already covers them.
    fn float_up(&mut self, x: DyadicNode, fresh: Vec<(Ext, Ext)>) -> usize {
        let mut touched = 0;
        let mut x = x;
        let mut fresh = fresh;
        while x > 1 && !fresh.is_empty() {
            let sibling = x ^ 1;
            let parent = x / 2;
            let mut next = Vec::new();
            for &(s, e) in &fresh {
                for (cs, ce) in self.lists[sibling].covered_runs_ext(s, e) {
                    next.extend(self.lists[parent].uncovered_runs_ext(cs, ce));
                }
            }
            for &(s, e) in &next {
                self.lists[parent].insert(s.pred(), e.succ()).expect("closed run is nonempty");
            }
            if !next.is_empty() {
                touched += 1;
            }
            x = parent;
            fresh = next;
        }
        touched
    }

    /// Checks the parent/children intersection property on the integers of
    /// `[lo, hi]`.
    pub fn check_upward(&self, lo: i64, hi: i64) -> Result<(), String> {
        for x in 1..self.size() {
            for v in lo..=hi {
                let both = self.lists[2 * x].covers_value(v) && self.lists[2 * x + 1].covers_value(v);
                if self.lists[x].covers_value(v) != both {
                    return Err(format!("node {x} disagrees with its children at {v}"));
                }
            }
        }
        Ok(())
    }
}
