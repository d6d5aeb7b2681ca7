use std::collections::BTreeMap;
use std::ops::{Bound, RangeBounds};

/// Ordered map from distinct keys to payloads with the handful of operations
/// the constraint structures need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedList<K, V> {
    map: BTreeMap<K, V>,
}

impl<K: Ord + Copy, V> Default for SortedList<K, V> {
    fn default() -> Self {
        SortedList { map: BTreeMap::new() }
    }
}

impl<K: Ord + Copy, V> SortedList<K, V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn find(&self, key: K) -> Option<&V> {
        self.map.get(&key)
    }

    pub fn find_mut(&mut self, key: K) -> Option<&mut V> {
        self.map.get_mut(&key)
    }

    /// Least entry with key `>= key`.
    pub fn find_lub(&self, key: K) -> Option<(K, &V)> {
        self.map.range(key..).next().map(|(k, v)| (*k, v))
    }

    /// Inserts or replaces; returns the previous payload.
    pub fn insert(&mut self, key: K, value: V) -> Option<V> {
        self.map.insert(key, value)
    }

    pub fn delete(&mut self, key: K) -> Option<V> {
        self.map.remove(&key)
    }

    /// Removes every key strictly between `lo` and `hi`, returning the removed
    /// entries in key order.
    pub fn delete_interval(&mut self, lo: K, hi: K) -> Vec<(K, V)> {
        if lo >= hi {
            return Vec::new();
        }
        self.delete_range((Bound::Excluded(lo), Bound::Excluded(hi)))
    }

    pub fn delete_range(&mut self, range: impl RangeBounds<K>) -> Vec<(K, V)> {
        let keys: Vec<K> = self.map.range(range).map(|(k, _)| *k).collect();
        keys.into_iter()
            .map(|k| {
                let v = self.map.remove(&k).expect("key was just listed");
                (k, v)
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (K, &V)> + '_ {
        self.map.iter().map(|(k, v)| (*k, v))
    }

    /// Entries with key `>= key`, in order.
    pub fn iter_from(&self, key: K) -> impl Iterator<Item = (K, &V)> + '_ {
        self.map.range(key..).map(|(k, v)| (*k, v))
    }

    pub fn keys(&self) -> impl Iterator<Item = K> + '_ {
        self.map.keys().copied()
    }
}
