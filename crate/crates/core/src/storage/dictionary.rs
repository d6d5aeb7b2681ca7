use serde::{Deserialize, Serialize};

use super::StorageError;
use crate::value::Value;

/// How raw strings of one attribute are ordered before encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawOrder {
    #[default]
    Lexicographic,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Keys {
    Text(Vec<String>),
    Numbers(Vec<i64>),
}

/// Order-preserving map between the raw values of one attribute and the
/// codes `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dictionary {
    attribute: String,
    keys: Keys,
}

impl Dictionary {
    pub fn build<'a>(
        attribute: &str,
        raw: impl IntoIterator<Item = &'a str>,
        order: RawOrder,
    ) -> Result<Self, StorageError> {
        let keys = match order {
            RawOrder::Lexicographic => {
                let mut v: Vec<String> = raw.into_iter().map(str::to_owned).collect();
                v.sort_unstable();
                v.dedup();
                Keys::Text(v)
            }
            RawOrder::Numeric => {
                let mut v = Vec::new();
                for s in raw {
                    v.push(s.trim().parse::<i64>().map_err(|_| StorageError::NotNumeric {
                        attribute: attribute.to_owned(),
                        value: s.to_owned(),
                    })?);
                }
                v.sort_unstable();
                v.dedup();
                Keys::Numbers(v)
            }
        };
        Ok(Dictionary { attribute: attribute.to_owned(), keys })
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn len(&self) -> usize {
        match &self.keys {
            Keys::Text(v) => v.len(),
            Keys::Numbers(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encode(&self, raw: &str) -> Option<Value> {
        let idx = match &self.keys {
            Keys::Text(v) => v.binary_search_by(|k| k.as_str().cmp(raw)).ok(),
            Keys::Numbers(v) => v.binary_search(&raw.trim().parse().ok()?).ok(),
        };
        idx.map(|i| i as Value)
    }

    pub fn decode(&self, code: Value) -> Option<String> {
        let i = usize::try_from(code).ok()?;
        match &self.keys {
            Keys::Text(v) => v.get(i).cloned(),
            Keys::Numbers(v) => v.get(i).map(i64::to_string),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn numeric_and_lexicographic_orders_differ() {
        let raw = ["10", "9", "100"];
        let lex = Dictionary::build("A", raw, RawOrder::Lexicographic).unwrap();
        let num = Dictionary::build("A", raw, RawOrder::Numeric).unwrap();
        assert_eq!(lex.encode("9"), Some(2));
        assert_eq!(num.encode("9"), Some(0));
        assert_eq!(num.decode(2).as_deref(), Some("100"));
        assert!(Dictionary::build("A", ["1", "x"], RawOrder::Numeric).is_err());
        assert_eq!(lex.encode("7"), None);
    }

    proptest! {
        #[test]
        fn round_trip_and_order(raw in proptest::collection::vec("[a-z]{0,4}", 1..40)) {
            let d = Dictionary::build("A", raw.iter().map(String::as_str), RawOrder::Lexicographic).unwrap();
            for a in &raw {
                let ca = d.encode(a).unwrap();
                prop_assert_eq!(d.decode(ca), Some(a.clone()));
                for b in &raw {
                    prop_assert_eq!(a < b, ca < d.encode(b).unwrap());
                }
            }
        }

        #[test]
        fn numeric_round_trip(raw in proptest::collection::vec(-1000i64..1000, 1..40)) {
            let strs: Vec<String> = raw.iter().map(i64::to_string).collect();
            let d = Dictionary::build("A", strs.iter().map(String::as_str), RawOrder::Numeric).unwrap();
            for (a, s) in raw.iter().zip(&strs) {
                let ca = d.encode(s).unwrap();
                prop_assert_eq!(d.decode(ca), Some(a.to_string()));
                for (b, t) in raw.iter().zip(&strs) {
                    prop_assert_eq!(a < b, ca < d.encode(t).unwrap());
                }
            }
        }
    }
}
