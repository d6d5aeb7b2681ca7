//! Reading relations from delimited text files and encoding them through
//! per-attribute dictionaries.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use minesweeper::querygraph::Hypergraph;
use minesweeper::storage::{Dictionary, RawOrder, Relation, StorageError};
use minesweeper::Value;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("no data file for relation {relation} in {dir} (tried .tsv and .csv)")]
    Missing { relation: String, dir: PathBuf },
    #[error("{path}: row {row} has {got} fields, expected {expected}")]
    Arity { path: PathBuf, row: usize, got: usize, expected: usize },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// How raw values are ordered before encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ValueOrder {
    /// Numeric when every value of the attribute parses as an integer.
    #[default]
    Auto,
    Numeric,
    Lexicographic,
}

/// Raw rows of one relation with columns arranged in atom order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTable {
    pub name: String,
    pub rows: Vec<Vec<String>>,
}

/// Encoded relations plus the dictionaries needed to decode results.
#[derive(Clone, Debug)]
pub struct Database {
    pub relations: Vec<Relation>,
    pub dictionaries: Vec<Dictionary>,
}

impl Database {
    pub fn decode(&self, t: &[Value]) -> Vec<String> {
        t.iter()
            .zip(&self.dictionaries)
            .map(|(&v, d)| d.decode(v).unwrap_or_else(|| v.to_string()))
            .collect()
    }

    pub fn size(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }
}

fn delimiter(path: &Path) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => b',',
        _ => b'\t',
    }
}

pub fn data_file(dir: &Path, relation: &str) -> Result<PathBuf, IngestError> {
    ["tsv", "csv"]
        .iter()
        .map(|ext| dir.join(format!("{relation}.{ext}")))
        .find(|p| p.is_file())
        .ok_or_else(|| IngestError::Missing { relation: relation.to_string(), dir: dir.to_path_buf() })
}

/// Reads a delimited file. A first row naming exactly the variables `vars`
/// is a header and maps columns by name; otherwise columns are positional
/// and the first row is data.
pub fn read_table(path: &Path, name: &str, vars: &[&str]) -> Result<RawTable, IngestError> {
    let csv_err = |source| IngestError::Csv { path: path.to_path_buf(), source };
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter(path))
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(File::open(path)?);
    let mut columns: Vec<usize> = (0..vars.len()).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if i == 0 {
            // a first row naming every variable is a header
            let by_name: Option<Vec<usize>> = vars.iter().map(|v| rec.iter().position(|h| h == *v)).collect();
            if let Some(cols) = by_name.filter(|_| rec.len() == vars.len()) {
                columns = cols;
                continue;
            }
        }
        if rec.len() != vars.len() {
            return Err(IngestError::Arity {
                path: path.to_path_buf(),
                row: i + 1,
                got: rec.len(),
                expected: vars.len(),
            });
        }
        rows.push(columns.iter().map(|&c| rec[c].to_string()).collect());
    }
    Ok(RawTable { name: name.to_string(), rows })
}

/// Builds one dictionary per attribute over all tables and encodes them.
pub fn encode(h: &Hypergraph, tables: &[RawTable], order: ValueOrder) -> Result<Database, IngestError> {
    let mut dictionaries = Vec::with_capacity(h.num_attributes());
    for a in 0..h.num_attributes() {
        let mut raw: Vec<&str> = Vec::new();
        for (t, e) in tables.iter().zip(h.edges()) {
            if let Some(c) = e.attrs.iter().position(|&x| x == a) {
                raw.extend(t.rows.iter().map(|r| r[c].as_str()));
            }
        }
        let order = match order {
            ValueOrder::Numeric => RawOrder::Numeric,
            ValueOrder::Lexicographic => RawOrder::Lexicographic,
            ValueOrder::Auto if raw.iter().all(|s| s.parse::<i64>().is_ok()) => RawOrder::Numeric,
            ValueOrder::Auto => RawOrder::Lexicographic,
        };
        dictionaries.push(Dictionary::build(h.attribute_name(a), raw.iter().copied(), order)?);
    }
    let mut relations = Vec::with_capacity(tables.len());
    for (t, e) in tables.iter().zip(h.edges()) {
        let tuples = t
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&e.attrs)
                    .map(|(s, &a)| dictionaries[a].encode(s).expect("value was added to the dictionary"))
                    .collect()
            })
            .collect();
        relations.push(Relation::new(e.name.clone(), e.attrs.clone(), tuples)?);
    }
    Ok(Database { relations, dictionaries })
}

/// Loads `<relation>.tsv` (or `.csv`) for every atom of the query.
pub fn load(h: &Hypergraph, dir: &Path, order: ValueOrder) -> Result<Database, IngestError> {
    let mut tables = Vec::new();
    for e in h.edges() {
        let vars: Vec<&str> = e.attrs.iter().map(|&a| h.attribute_name(a)).collect();
        tables.push(read_table(&data_file(dir, &e.name)?, &e.name, &vars)?);
    }
    encode(h, &tables, order)
}

/// Writes a relation as TSV with a header of attribute names.
pub fn write_relation(path: &Path, h: &Hypergraph, rel: &Relation) -> Result<(), IngestError> {
    let mut out = std::io::BufWriter::new(File::create(path)?);
    let names: Vec<&str> = rel.attrs.iter().map(|&a| h.attribute_name(a)).collect();
    writeln!(out, "{}", names.join("\t"))?;
    for t in rel.tuples() {
        let row: Vec<String> = t.iter().map(i64::to_string).collect();
        writeln!(out, "{}", row.join("\t"))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;

    fn write(dir: &Path, name: &str, body: &str) {
        std::fs::write(dir.join(name), body).unwrap();
    }

    #[test]
    fn dedup_and_header_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let q = parse_query("Q(A,B) :- R(A,B), S(B).").unwrap();
        write(dir.path(), "R.tsv", "B\tA\n2\t1\n2\t1\n3\t1\n");
        write(dir.path(), "S.csv", "B\n2\n9\n");
        let db = load(&q.hypergraph, dir.path(), ValueOrder::Auto).unwrap();
        assert_eq!(db.relations[0].len(), 2);
        // columns were swapped back into atom order: (A, B)
        let first = &db.relations[0].tuples()[0];
        assert_eq!(db.decode(first), vec!["1".to_string(), "2".to_string()]);
    }

    #[test]
    fn numeric_flag_rejects_text() {
        let dir = tempfile::tempdir().unwrap();
        let q = parse_query("Q(A) :- R(A).").unwrap();
        write(dir.path(), "R.tsv", "A\n1\nx\n");
        assert!(matches!(load(&q.hypergraph, dir.path(), ValueOrder::Numeric), Err(IngestError::Storage(_))));
        let db = load(&q.hypergraph, dir.path(), ValueOrder::Auto).unwrap();
        assert_eq!(db.relations[0].len(), 2);
    }

    #[test]
    fn arity_and_missing_files() {
        let dir = tempfile::tempdir().unwrap();
        let q = parse_query("Q(A,B) :- R(A,B).").unwrap();
        assert!(matches!(load(&q.hypergraph, dir.path(), ValueOrder::Auto), Err(IngestError::Missing { .. })));
        write(dir.path(), "R.tsv", "A\tB\n1\t2\n3\n");
        assert!(matches!(load(&q.hypergraph, dir.path(), ValueOrder::Auto), Err(IngestError::Arity { row: 3, .. })));
    }

    #[test]
    fn headerless_files_keep_their_first_row() {
        let dir = tempfile::tempdir().unwrap();
        let q = parse_query("Q(A,B) :- R(A,B).").unwrap();
        write(dir.path(), "R.csv", "1,2\n3,4\n");
        let db = load(&q.hypergraph, dir.path(), ValueOrder::Auto).unwrap();
        assert_eq!(db.relations[0].len(), 2);
    }
}
