//! Planning and running one instance end to end.

use minesweeper::certlab::{build_upper_bound_certificate, Instance as CertInstance};
use minesweeper::engine::{evaluate_with, EngineError, EvalMode, EvalOptions, Evaluation, QueryPlan};
use minesweeper::querygraph::{Gao, Hypergraph, QueryGraphError};
use minesweeper::storage::Relation;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("bad attribute order: {0}")]
    Gao(#[from] QueryGraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("certificate construction failed: {0}")]
    Certificate(String),
}

/// `--mode` values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    #[default]
    Auto,
    Beta,
    General,
    Triangle,
}

/// Builds a plan. Without an explicit order the analysis picks one; an
/// explicit mode then overrides the chosen mode.
pub fn make_plan(h: &Hypergraph, gao: Option<&str>, mode: ModeChoice) -> Result<QueryPlan, RunError> {
    let auto = QueryPlan::auto(h.clone());
    let gao = match gao {
        Some(text) => Gao::parse(h, text)?,
        None if mode == ModeChoice::Beta => h.nested_elimination_order().ok_or(EngineError::NotNested)?,
        None => auto.gao().clone(),
    };
    let mode = match mode {
        ModeChoice::Auto if h.is_nested_elimination_order(&gao) => EvalMode::BetaChain,
        ModeChoice::Auto => EvalMode::ShadowGeneral,
        ModeChoice::Beta => EvalMode::BetaChain,
        ModeChoice::General => EvalMode::ShadowGeneral,
        ModeChoice::Triangle => EvalMode::Triangle,
    };
    Ok(QueryPlan::new(h.clone(), gao, mode)?)
}

pub fn run_plan(plan: &QueryPlan, rels: &[Relation], opts: EvalOptions) -> Result<Evaluation, RunError> {
    let idx = plan.build_indexes(rels)?;
    Ok(evaluate_with(plan, &idx, opts)?)
}

/// Size of the per-attribute sorted-order certificate under the plan's order.
pub fn cert_ub(plan: &QueryPlan, rels: &[Relation]) -> Result<u64, RunError> {
    let permuted = rels.iter().map(|r| r.permuted_to(plan.gao())).collect();
    let inst = CertInstance::new(permuted, plan.gao().clone()).map_err(|e| RunError::Certificate(e.to_string()))?;
    Ok(build_upper_bound_certificate(&inst).len() as u64)
}

pub fn mode_name(mode: EvalMode) -> &'static str {
    match mode {
        EvalMode::BetaChain => "beta",
        EvalMode::ShadowGeneral => "general",
        EvalMode::Triangle => "triangle",
    }
}
