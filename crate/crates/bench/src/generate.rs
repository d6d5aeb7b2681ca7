//! Seeded instance families.

use std::fmt;
use std::str::FromStr;

use minesweeper::querygraph::Hypergraph;
use minesweeper::storage::Relation;
use minesweeper::Value;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::query::parse_query;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters for {family}: {reason}")]
    Params { family: &'static str, reason: String },
}

/// A query together with data for every atom.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub query: String,
    pub hypergraph: Hypergraph,
    pub relations: Vec<Relation>,
}

impl Instance {
    fn build(id: String, query: String, tuples: Vec<Vec<Vec<Value>>>) -> Instance {
        let hypergraph = parse_query(&query).expect("generated queries parse").hypergraph;
        let relations = hypergraph
            .edges()
            .iter()
            .zip(tuples)
            .map(|(e, t)| Relation::new(e.name.clone(), e.attrs.clone(), t).expect("generated tuples fit"))
            .collect();
        Instance { id, query, hypergraph, relations }
    }

    pub fn size(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    SetIntersectDisjoint { n: i64 },
    SetIntersectExample21 { n: i64 },
    WorkedQ2 { n: i64 },
    BowtieRandom { n: usize, domain: i64 },
    PathHard { m: usize, big_m: i64 },
    PathHardWide { m: usize, big_m: i64, k: usize },
    TriangleRandom { vertices: i64, p: f64 },
    TriangleOffset { n: i64 },
}

fn err(family: &'static str, reason: impl Into<String>) -> GenError {
    GenError::Params { family, reason: reason.into() }
}

impl Family {
    pub fn generate(&self, seed: u64) -> Result<Instance, GenError> {
        match *self {
            Family::SetIntersectDisjoint { n } => {
                if n < 1 {
                    return Err(err("setIntersectDisjoint", "N must be positive"));
                }
                Ok(set_intersect_disjoint(n))
            }
            Family::SetIntersectExample21 { n } => {
                if n < 1 {
                    return Err(err("setIntersectExample21", "N must be positive"));
                }
                Ok(example21(n))
            }
            Family::WorkedQ2 { n } => {
                if n < 4 {
                    return Err(err("workedQ2", "N must be at least 4"));
                }
                Ok(worked_q2(n))
            }
            Family::BowtieRandom { n, domain } => {
                if domain < 1 {
                    return Err(err("bowtieRandom", "domain must be positive"));
                }
                Ok(bowtie_random(n, domain, seed))
            }
            Family::PathHard { m, big_m } => {
                if m < 2 || big_m < 2 {
                    return Err(err("pathHard", "need m >= 2 and M >= 2"));
                }
                Ok(path_hard_wide(m, big_m, 2))
            }
            Family::PathHardWide { m, big_m, k } => {
                if m < 2 || big_m < 2 || k < 2 {
                    return Err(err("pathHardWide", "need m >= 2, M >= 2 and k >= 2"));
                }
                Ok(path_hard_wide(m, big_m, k))
            }
            Family::TriangleRandom { vertices, p } => {
                if vertices < 1 || !(0.0..=1.0).contains(&p) {
                    return Err(err("triangleRandom", "need |V| >= 1 and p in [0, 1]"));
                }
                Ok(triangle_random(vertices, p, seed))
            }
            Family::TriangleOffset { n } => {
                if n < 1 {
                    return Err(err("triangleOffset", "n must be positive"));
                }
                Ok(triangle_offset(n))
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::SetIntersectDisjoint { n } => write!(f, "setIntersectDisjoint({n})"),
            Family::SetIntersectExample21 { n } => write!(f, "setIntersectExample21({n})"),
            Family::WorkedQ2 { n } => write!(f, "workedQ2({n})"),
            Family::BowtieRandom { n, domain } => write!(f, "bowtieRandom({n},{domain})"),
            Family::PathHard { m, big_m } => write!(f, "pathHard({m},{big_m})"),
            Family::PathHardWide { m, big_m, k } => write!(f, "pathHardWide({m},{big_m},{k})"),
            Family::TriangleRandom { vertices, p } => write!(f, "triangleRandom({vertices},{p})"),
            Family::TriangleOffset { n } => write!(f, "triangleOffset({n})"),
        }
    }
}

impl FromStr for Family {
    type Err = GenError;

    /// Parses `name(arg, ...)`, e.g. `pathHard(5,16)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || GenError::UnknownFamily(s.to_string());
        let (name, rest) = s.trim().split_once('(').ok_or_else(unknown)?;
        let args: Vec<&str> = rest
            .strip_suffix(')')
            .ok_or_else(unknown)?
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .collect();
        fn num<T: FromStr>(family: &'static str, args: &[&str], i: usize) -> Result<T, GenError> {
            args.get(i)
                .ok_or_else(|| err(family, format!("missing argument {}", i + 1)))?
                .parse()
                .map_err(|_| err(family, format!("argument {} is not a number", i + 1)))
        }
        let arity = |family: &'static str, k: usize| {
            if args.len() == k {
                Ok(())
            } else {
                Err(err(family, format!("expected {k} arguments, got {}", args.len())))
            }
        };
        Ok(match name.trim() {
            "setIntersectDisjoint" => {
                arity("setIntersectDisjoint", 1)?;
                Family::SetIntersectDisjoint { n: num("setIntersectDisjoint", &args, 0)? }
            }
            "setIntersectExample21" => {
                arity("setIntersectExample21", 1)?;
                Family::SetIntersectExample21 { n: num("setIntersectExample21", &args, 0)? }
            }
            "workedQ2" => {
                arity("workedQ2", 1)?;
                Family::WorkedQ2 { n: num("workedQ2", &args, 0)? }
            }
            "bowtieRandom" => {
                arity("bowtieRandom", 2)?;
                Family::BowtieRandom { n: num("bowtieRandom", &args, 0)?, domain: num("bowtieRandom", &args, 1)? }
            }
            "pathHard" => {
                arity("pathHard", 2)?;
                Family::PathHard { m: num("pathHard", &args, 0)?, big_m: num("pathHard", &args, 1)? }
            }
            "pathHardWide" => {
                arity("pathHardWide", 3)?;
                Family::PathHardWide {
                    m: num("pathHardWide", &args, 0)?,
                    big_m: num("pathHardWide", &args, 1)?,
                    k: num("pathHardWide", &args, 2)?,
                }
            }
            "triangleRandom" => {
                arity("triangleRandom", 2)?;
                Family::TriangleRandom {
                    vertices: num("triangleRandom", &args, 0)?,
                    p: num("triangleRandom", &args, 1)?,
                }
            }
            "triangleOffset" => {
                arity("triangleOffset", 1)?;
                Family::TriangleOffset { n: num("triangleOffset", &args, 0)? }
            }
            _ => return Err(unknown()),
        })
    }
}

fn singletons(values: impl IntoIterator<Item = Value>) -> Vec<Vec<Value>> {
    values.into_iter().map(|v| vec![v]).collect()
}

/// `S1 = [1, N]`, `S2 = [N+1, 2N]`.
pub fn set_intersect_disjoint(n: Value) -> Instance {
    Instance::build(
        format!("setIntersectDisjoint({n})"),
        "Q(A) :- S1(A), S2(A).".into(),
        vec![singletons(1..=n), singletons(n + 1..=2 * n)],
    )
}

/// `R = [N]`, `T = {(1, 2i)} ∪ {(2, 3i)}` for `i` in `[N]`.
pub fn example21(n: Value) -> Instance {
    let mut t: Vec<Vec<Value>> = (1..=n).map(|i| vec![1, 2 * i]).collect();
    t.extend((1..=n).map(|i| vec![2, 3 * i]));
    Instance::build(format!("setIntersectExample21({n})"), "Q(A,B) :- R(A), T(A,B).".into(), vec![singletons(1..=n), t])
}

/// `R = [N]`, `S = [N]^2`, `T = {(2,2),(2,4)}`, `U = {1,3}`; the output is empty.
pub fn worked_q2(n: Value) -> Instance {
    let s = (1..=n).flat_map(|a| (1..=n).map(move |b| vec![a, b])).collect();
    Instance::build(
        format!("workedQ2({n})"),
        "Q(A1,A2,A3) :- R(A1), S(A1,A2), T(A2,A3), U(A3).".into(),
        vec![singletons(1..=n), s, vec![vec![2, 2], vec![2, 4]], singletons([1, 3])],
    )
}

/// Random `R(X)`, `S(X,Y)`, `T(Y)` with `n` tuples each over `[0, domain)`.
pub fn bowtie_random(n: usize, domain: Value, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (0..n).map(|_| vec![rng.gen_range(0..domain)]).collect();
    let s = (0..n).map(|_| vec![rng.gen_range(0..domain), rng.gen_range(0..domain)]).collect();
    let t = (0..n).map(|_| vec![rng.gen_range(0..domain)]).collect();
    Instance::build(format!("bowtieRandom({n},{domain})#{seed}"), "Q(X,Y) :- R(X), S(X,Y), T(Y).".into(), vec![r, s, t])
}

/// Chunk `j` (1-based) of relation `i` in the path family.
pub fn path_chunk(i: usize, j: usize, m: usize, big_m: Value, k: usize) -> Vec<Vec<Value>> {
    let prev = if i == 1 { m } else { i - 1 };
    let base = (j as Value - 1) * big_m;
    if j == prev {
        Vec::new()
    } else if j == i {
        vec![vec![base + 1; k]]
    } else {
        let mut out = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|t: Vec<Value>| {
                    (base + 2..=base + big_m).map(move |v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

/// `R_i(A_i, ..., A_{i+k-1})` for `i` in `[m]`, each made of `m` chunks; the
/// join is empty but every pairwise semijoin is large.
pub fn path_hard_wide(m: usize, big_m: Value, k: usize) -> Instance {
    let atoms: Vec<String> = (1..=m)
        .map(|i| {
            let vars: Vec<String> = (i..i + k).map(|a| format!("A{a}")).collect();
            format!("R{i}({})", vars.join(","))
        })
        .collect();
    let head: Vec<String> = (1..m + k).map(|a| format!("A{a}")).collect();
    let query = format!("Q({}) :- {}.", head.join(","), atoms.join(", "));
    let tuples = (1..=m).map(|i| (1..=m).flat_map(|j| path_chunk(i, j, m, big_m, k)).collect()).collect();
    let id = if k == 2 { format!("pathHard({m},{big_m})") } else { format!("pathHardWide({m},{big_m},{k})") };
    Instance::build(id, query, tuples)
}

/// Edges of `G(|V|, p)` stored in both directions; each undirected triangle
/// yields six outputs.
pub fn triangle_random(vertices: Value, p: f64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..vertices {
        for v in u + 1..vertices {
            if rng.gen_bool(p) {
                edges.push(vec![u, v]);
                edges.push(vec![v, u]);
            }
        }
    }
    Instance::build(
        format!("triangleRandom({vertices},{p})#{seed}"),
        "Q(A,B,C) :- R(A,B), S(B,C), T(A,C).".into(),
        vec![edges.clone(), edges.clone(), edges],
    )
}

/// `R = [n]^2`, `S = {(b, 2b)}`, `T = {(a, 2a + 1)}`: every `(a, b)` pair
/// survives `R` but no `c` fits both `S` and `T`, so the output is empty.
pub fn triangle_offset(n: Value) -> Instance {
    let r = (0..n).flat_map(|a| (0..n).map(move |b| vec![a, b])).collect();
    let s = (0..n).map(|b| vec![b, 2 * b]).collect();
    let t = (0..n).map(|a| vec![a, 2 * a + 1]).collect();
    Instance::build(format!("triangleOffset({n})"), "Q(A,B,C) :- R(A,B), S(B,C), T(A,C).".into(), vec![r, s, t])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_family_names() {
        assert_eq!("pathHard(5, 16)".parse::<Family>().unwrap(), Family::PathHard { m: 5, big_m: 16 });
        assert_eq!(
            "triangleRandom(32,0.2)".parse::<Family>().unwrap(),
            Family::TriangleRandom { vertices: 32, p: 0.2 }
        );
        assert!("pathHard(5)".parse::<Family>().is_err());
        assert!(matches!("nope(1)".parse::<Family>(), Err(GenError::UnknownFamily(_))));
        let f = Family::PathHardWide { m: 5, big_m: 4, k: 3 };
        assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
    }

    #[test]
    fn path_chunks() {
        // relation 1 has its own chunk as one tuple and chunk m empty
        assert_eq!(path_chunk(1, 1, 5, 4, 2), vec![vec![1, 1]]);
        assert!(path_chunk(1, 5, 5, 4, 2).is_empty());
        assert_eq!(path_chunk(1, 2, 5, 4, 2).len(), 9);
        let inst = path_hard_wide(5, 4, 2);
        for r in &inst.relations {
            assert_eq!(r.len(), 1 + 3 * 9);
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = triangle_random(20, 0.3, 7);
        let b = triangle_random(20, 0.3, 7);
        assert_eq!(a.relations, b.relations);
        assert_ne!(a.relations, triangle_random(20, 0.3, 8).relations);
        assert!(Family::TriangleRandom { vertices: 3, p: 2.0 }.generate(0).is_err());
    }
}
