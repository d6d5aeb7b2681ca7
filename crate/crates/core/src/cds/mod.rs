//! The constraint data structure: sorted lists, interval lists and the
//! constraint tree that stores discovered gaps.

mod constraint;
mod interval_list;
mod sorted_list;
mod tree;

pub use constraint::{Component, Constraint, Pattern};
pub use interval_list::{IntervalList, Tag};
pub use sorted_list::SortedList;
pub use tree::{ConstraintTree, NodeId};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::{Ext, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CdsError {
    #[error("malformed interval ({lo}, {hi})")]
    MalformedInterval { lo: Ext, hi: Ext },
    #[error("constraint interval at position {position} but the tree has {arity} attributes")]
    PositionOutOfRange { position: usize, arity: usize },
    #[error("cannot parse constraint: {0}")]
    Parse(String),
    #[error("principal filter at depth {depth} is not a chain; the attribute order is not a nested elimination order")]
    NotAChain { depth: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Work counters kept by a constraint store.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdsStats {
    /// Every constraint handed to the tree, including ones the probe
    /// algorithms add for memoization, backtracking and shadow nodes.
    pub tree_inserts: u64,
    /// Inserts dropped because an ancestor interval already covered them.
    pub subsumed: u64,
    /// Calls to `IntervalList::next` made on behalf of probing.
    pub interval_next_calls: u64,
    pub backtracks: u64,
    pub memo_inserts: u64,
    pub shadow_nodes: u64,
}

/// A constraint store that can propose the next active tuple.
pub trait Cds {
    fn insert(&mut self, c: &Constraint) -> Result<(), CdsError>;

    /// Returns a tuple that satisfies no stored constraint, or `None` when the
    /// constraints cover the whole output space.
    fn probe(&mut self) -> Result<Option<Vec<Value>>, CdsError>;

    /// Called after the engine emits `t`.
    fn note_output(&mut self, _t: &[Value]) {}

    fn stats(&self) -> CdsStats;
}
