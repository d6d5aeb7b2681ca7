use std::collections::HashMap;

use minesweeper::querygraph::{Edge, Hypergraph, QueryGraphError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("malformed query: {0}")]
    Syntax(String),
    #[error("head variable {0} appears in no body atom")]
    UnknownVariable(String),
    #[error(transparent)]
    Graph(#[from] QueryGraphError),
}

/// A parsed rule `Head(vars) :- R1(vars), ..., Rk(vars).`
#[derive(Clone, Debug)]
pub struct Query {
    pub head: String,
    pub head_vars: Vec<String>,
    pub hypergraph: Hypergraph,
}

fn atom(text: &str) -> Result<(String, Vec<String>), QueryError> {
    let bad = || QueryError::Syntax(format!("expected `Name(vars)`, found `{text}`"));
    let (name, rest) = text.trim().split_once('(').ok_or_else(bad)?;
    let args = rest.trim_end().strip_suffix(')').ok_or_else(bad)?;
    let name = name.trim();
    let valid = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_');
    if !valid(name) {
        return Err(bad());
    }
    let vars: Vec<String> = args.split(',').map(|v| v.trim().to_string()).collect();
    if vars.iter().any(|v| !valid(v)) {
        return Err(bad());
    }
    Ok((name.to_string(), vars))
}

/// Splits on commas that are outside parentheses.
fn split_atoms(body: &str) -> Result<Vec<&str>, QueryError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if !(0..=1).contains(&depth) {
            return Err(QueryError::Syntax("unbalanced parentheses".into()));
        }
    }
    out.push(&body[start..]);
    Ok(out)
}

/// Parses a conjunctive rule. Attributes are numbered in order of first
/// appearance in the body; the head only names the result.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let text = text.trim();
    let text = text.strip_suffix('.').unwrap_or(text);
    let (head, body) = text
        .split_once(":-")
        .ok_or_else(|| QueryError::Syntax("missing `:-`".into()))?;
    let (head, head_vars) = atom(head)?;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut attrs = Vec::new();
    let mut edges = Vec::new();
    for part in split_atoms(body)? {
        let (name, vars) = atom(part)?;
        let mut ea = Vec::with_capacity(vars.len());
        for v in vars {
            let id = *ids.entry(v.clone()).or_insert_with(|| {
                attrs.push(v);
                attrs.len() - 1
            });
            ea.push(id);
        }
        edges.push(Edge { name, attrs: ea });
    }
    if let Some(v) = head_vars.iter().find(|v| !ids.contains_key(*v)) {
        return Err(QueryError::UnknownVariable(v.clone()));
    }
    Ok(Query { head, head_vars, hypergraph: Hypergraph::new(attrs, edges)? })
}
