//! Dictionary-encoded relations and their trie indexes.

mod dictionary;
mod trie;

pub use dictionary::{Dictionary, RawOrder};
pub use trie::{NodeRef, TrieIndex};

use thiserror::Error;

use crate::querygraph::Gao;
use crate::value::Value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StorageError {
    #[error("relation `{relation}` has arity {arity} but a tuple has {got} values")]
    Arity { relation: String, arity: usize, got: usize },
    #[error("relation `{relation}` holds negative value {value}; encoded values start at 0")]
    NegativeValue { relation: String, value: Value },
    #[error("relation `{0}` lists an attribute twice")]
    RepeatedAttribute(String),
    #[error("relation `{0}` is not sorted consistently with the attribute order")]
    InconsistentOrder(String),
    #[error("value `{value}` is not an integer but attribute `{attribute}` uses numeric ordering")]
    NotNumeric { attribute: String, value: String },
}

/// A set of tuples over attribute ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub attrs: Vec<usize>,
    tuples: Vec<Vec<Value>>,
}

impl Relation {
    /// Validates arity and sign, then sorts and deduplicates.
    pub fn new(
        name: impl Into<String>,
        attrs: Vec<usize>,
        tuples: Vec<Vec<Value>>,
    ) -> Result<Self, StorageError> {
        let name = name.into();
        for (i, a) in attrs.iter().enumerate() {
            if attrs[..i].contains(a) {
                return Err(StorageError::RepeatedAttribute(name));
            }
        }
        for t in &tuples {
            if t.len() != attrs.len() {
                return Err(StorageError::Arity { relation: name, arity: attrs.len(), got: t.len() });
            }
            if let Some(&v) = t.iter().find(|&&v| v < 0) {
                return Err(StorageError::NegativeValue { relation: name, value: v });
            }
        }
        let mut tuples = tuples;
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Relation { name, attrs, tuples })
    }

    pub fn arity(&self) -> usize {
        self.attrs.len()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Sorted, distinct tuples in `attrs` column order.
    pub fn tuples(&self) -> &[Vec<Value>] {
        &self.tuples
    }

    /// The same relation with columns reordered by position in `gao`.
    pub fn permuted_to(&self, gao: &Gao) -> Relation {
        let mut cols: Vec<usize> = (0..self.arity()).collect();
        cols.sort_by_key(|&c| gao.position(self.attrs[c]));
        let attrs = cols.iter().map(|&c| self.attrs[c]).collect();
        let mut tuples: Vec<Vec<Value>> =
            self.tuples.iter().map(|t| cols.iter().map(|&c| t[c]).collect()).collect();
        tuples.sort_unstable();
        Relation { name: self.name.clone(), attrs, tuples }
    }

    /// Whether the attributes appear in strictly increasing `gao` position.
    pub fn is_consistent_with(&self, gao: &Gao) -> bool {
        self.attrs.windows(2).all(|w| gao.position(w[0]) < gao.position(w[1]))
    }

    /// Value of attribute `attr` in tuple `t`, if the relation has it.
    pub fn column_of(&self, attr: usize) -> Option<usize> {
        self.attrs.iter().position(|&a| a == attr)
    }
}
