use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CdsError;
use crate::value::{Ext, Value};

/// One prefix component of a constraint or node pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    Eq(Value),
    Star,
}

impl Component {
    pub fn is_star(self) -> bool {
        matches!(self, Component::Star)
    }

    pub fn matches(self, v: Value) -> bool {
        match self {
            Component::Eq(e) => e == v,
            Component::Star => true,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Eq(v) => write!(f, "={v}"),
            Component::Star => f.write_str("*"),
        }
    }
}

/// A vector of equality/wildcard components.
///
/// `p.specializes(q)` is the partial order where `q` generalizes `p`: every
/// equality of `q` is also present in `p`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pattern(pub Vec<Component>);

impl Pattern {
    pub fn new(components: Vec<Component>) -> Self {
        Pattern(components)
    }

    pub fn stars(k: usize) -> Self {
        Pattern(vec![Component::Star; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.0
    }

    pub fn equality_count(&self) -> usize {
        self.0.iter().filter(|c| !c.is_star()).count()
    }

    /// Whether this pattern generalizes the value prefix `t`.
    pub fn generalizes_tuple(&self, t: &[Value]) -> bool {
        self.len() == t.len() && self.0.iter().zip(t).all(|(c, &v)| c.matches(v))
    }

    /// `self ⪯ other`: `other` is obtained from `self` by turning some
    /// equalities into wildcards.
    pub fn specializes(&self, other: &Pattern) -> bool {
        self.len() == other.len()
            && self.0.iter().zip(&other.0).all(|(a, b)| b.is_star() || a == b)
    }

    /// Greatest common specialization, or `None` when two different equality
    /// values collide.
    pub fn meet(&self, other: &Pattern) -> Option<Pattern> {
        if self.len() != other.len() {
            return None;
        }
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(match (a, b) {
                (Component::Star, x) | (x, Component::Star) => *x,
                (Component::Eq(x), Component::Eq(y)) if x == y => *a,
                _ => return None,
            });
        }
        Some(Pattern(out))
    }

    /// Position (1-based) of the last equality component, 0 if none.
    pub fn last_equality(&self) -> usize {
        self.0.iter().rposition(|c| !c.is_star()).map_or(0, |p| p + 1)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(">")
    }
}

/// A gap in the output space: a pattern on the first attributes followed by
/// an open interval on the next one. Later attributes are unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub prefix: Pattern,
    pub lo: Ext,
    pub hi: Ext,
}

impl Constraint {
    pub fn new(prefix: Pattern, lo: Ext, hi: Ext) -> Result<Self, CdsError> {
        if lo >= hi {
            return Err(CdsError::MalformedInterval { lo, hi });
        }
        Ok(Constraint { prefix, lo, hi })
    }

    /// Convenience constructor for tests and generators.
    pub fn from_parts(prefix: &[Component], lo: Ext, hi: Ext) -> Result<Self, CdsError> {
        Constraint::new(Pattern(prefix.to_vec()), lo, hi)
    }

    /// Depth (0-based attribute position) of the interval component.
    pub fn position(&self) -> usize {
        self.prefix.len()
    }

    /// Whether the full tuple `t` lies in the gap.
    pub fn satisfied_by(&self, t: &[Value]) -> bool {
        let p = self.position();
        p < t.len()
            && self.prefix.generalizes_tuple(&t[..p])
            && self.lo < Ext::Fin(t[p])
            && Ext::Fin(t[p]) < self.hi
    }

    /// The interval with a negative finite left end widened to `-inf`; the
    /// domain starts at 0, so this loses nothing.
    pub fn normalized(&self) -> Constraint {
        let mut c = self.clone();
        if matches!(c.lo, Ext::Fin(v) if v < 0) {
            c.lo = Ext::NegInf;
        }
        c
    }

    /// Renders the constraint padded with wildcards to `n` components.
    pub fn display_with_arity(&self, n: usize) -> String {
        let mut parts: Vec<String> = self.prefix.0.iter().map(|c| c.to_string()).collect();
        parts.push(format!("({}, {})", self.lo, self.hi));
        while parts.len() < n {
            parts.push("*".to_string());
        }
        format!("<{}>", parts.join(", "))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with_arity(0))
    }
}

fn parse_ext(s: &str) -> Result<Ext, CdsError> {
    match s.trim() {
        "-inf" => Ok(Ext::NegInf),
        "+inf" | "inf" => Ok(Ext::PosInf),
        v => v
            .parse::<Value>()
            .map(Ext::Fin)
            .map_err(|_| CdsError::Parse(format!("bad interval endpoint `{v}`"))),
    }
}

/// Parses the text form `<=1, *, (-inf, 3), *>`. Trailing wildcards after the
/// interval are accepted and dropped.
impl FromStr for Constraint {
    type Err = CdsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .trim()
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| CdsError::Parse(format!("expected <...> in `{s}`")))?;
        let open = body
            .find('(')
            .ok_or_else(|| CdsError::Parse(format!("no interval component in `{s}`")))?;
        let close = body[open..]
            .find(')')
            .map(|c| c + open)
            .ok_or_else(|| CdsError::Parse(format!("unclosed interval in `{s}`")))?;
        let mut prefix = Vec::new();
        for part in body[..open].split(',').map(str::trim).filter(|p| !p.is_empty()) {
            prefix.push(match part {
                "*" => Component::Star,
                p => Component::Eq(
                    p.trim_start_matches('=')
                        .parse()
                        .map_err(|_| CdsError::Parse(format!("bad component `{p}`")))?,
                ),
            });
        }
        let (lo, hi) = body[open + 1..close]
            .split_once(',')
            .ok_or_else(|| CdsError::Parse(format!("interval needs two endpoints in `{s}`")))?;
        for part in body[close + 1..].split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part != "*" {
                return Err(CdsError::Parse(format!("only wildcards may follow the interval in `{s}`")));
            }
        }
        Constraint::new(Pattern(prefix), parse_ext(lo)?, parse_ext(hi)?)
    }
}
