//! Command-line front end for the `minesweeper` engine, with instance
//! generators and baseline joins for benchmarking.

pub mod baselines;
pub mod generate;
pub mod ingest;
pub mod query;
pub mod report;
pub mod run;
