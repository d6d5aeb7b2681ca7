//! Domain values extended with the two infinite sentinels.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Dictionary-encoded attribute value. Relations only hold non-negative values;
/// `-1` is used by the probe search as the "below every value" starting point.
pub type Value = i64;

/// A value of the ordered domain extended with `-inf` and `+inf`.
///
/// The derived ordering is the intended one: `NegInf < Fin(_) < PosInf`, and
/// finite values compare numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ext {
    NegInf,
    Fin(Value),
    PosInf,
}

impl Ext {
    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    pub fn finite(self) -> Option<Value> {
        match self {
            Ext::Fin(v) => Some(v),
            _ => None,
        }
    }

    /// `self - 1`; infinities absorb the shift.
    pub fn pred(self) -> Ext {
        match self {
            Ext::Fin(v) => Ext::Fin(v - 1),
            other => other,
        }
    }

    /// `self + 1`; infinities absorb the shift.
    pub fn succ(self) -> Ext {
        match self {
            Ext::Fin(v) => Ext::Fin(v + 1),
            other => other,
        }
    }
}

impl From<Value> for Ext {
    fn from(v: Value) -> Self {
        Ext::Fin(v)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::Fin(v) => write!(f, "{v}"),
            Ext::PosInf => f.write_str("+inf"),
        }
    }
}
