//! Benchmark suites and their JSON reports.

use minesweeper::engine::{stats_report, EvalMode, EvalOptions, StatsReport};
use minesweeper::Value;
use serde::{Deserialize, Serialize};

use crate::baselines::{run_baseline, Baseline};
use crate::generate::{bowtie_random, path_hard_wide, set_intersect_disjoint, triangle_offset, Instance};
use crate::run::{cert_ub, make_plan, mode_name, run_plan, ModeChoice, RunError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BaselineRecord {
    pub name: String,
    pub work: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub instance: String,
    /// Size parameter the scaling table is keyed on.
    pub param: u64,
    pub mode: String,
    pub gao: Vec<String>,
    pub input_size: u64,
    pub output: u64,
    pub cert_ub: u64,
    pub probe_calls: u64,
    pub constraints_inserted: u64,
    pub interval_next_calls: u64,
    pub bounds: StatsReport,
    pub baseline: Option<BaselineRecord>,
    pub wall_ms: f64,
}

/// Ratio of each counter to the previous row's.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalingRow {
    pub param: u64,
    pub probe_calls: u64,
    pub probe_ratio: Option<f64>,
    pub baseline_work: Option<u64>,
    pub baseline_ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub suite: String,
    pub seed: u64,
    pub runs: Vec<RunRecord>,
    pub scaling: Vec<ScalingRow>,
}

impl BenchReport {
    /// The report with wall-clock fields zeroed, for comparisons.
    pub fn without_timing(&self) -> BenchReport {
        let mut r = self.clone();
        for run in &mut r.runs {
            run.wall_ms = 0.0;
        }
        r
    }
}

pub const SUITES: [&str; 6] = ["empty", "bowtie", "pathHard", "setIntersect", "triangle", "triangleGeneric"];

pub fn run_instance(
    inst: &Instance,
    param: u64,
    mode: ModeChoice,
    baseline: Option<Baseline>,
) -> Result<RunRecord, RunError> {
    let plan = make_plan(&inst.hypergraph, None, mode)?;
    let ev = run_plan(&plan, &inst.relations, EvalOptions::default())?;
    let cert = cert_ub(&plan, &inst.relations)?;
    let r = inst.relations.iter().map(|r| r.arity()).max().unwrap_or(0) as u32;
    let bounds = stats_report(&ev.stats, cert, ev.stats.output_count, r, inst.relations.len() as u64);
    let baseline = match baseline {
        Some(b) => {
            let run = run_baseline(b, &inst.hypergraph, plan.gao(), &inst.relations)
                .expect("suite baselines apply to their instances");
            Some(BaselineRecord { name: format!("{b:?}").to_lowercase(), work: run.work })
        }
        None => None,
    };
    Ok(RunRecord {
        instance: inst.id.clone(),
        param,
        mode: mode_name(plan.mode()).to_string(),
        gao: plan.gao().names(&inst.hypergraph).into_iter().map(String::from).collect(),
        input_size: inst.size() as u64,
        output: ev.stats.output_count,
        cert_ub: cert,
        probe_calls: ev.stats.probe_calls,
        constraints_inserted: ev.stats.constraints_inserted,
        interval_next_calls: ev.stats.cds.interval_next_calls,
        bounds,
        baseline,
        wall_ms: ev.elapsed_ms,
    })
}

pub fn scaling(runs: &[RunRecord]) -> Vec<ScalingRow> {
    let ratio = |a: u64, b: u64| if b == 0 { None } else { Some(a as f64 / b as f64) };
    runs.iter()
        .enumerate()
        .map(|(i, r)| {
            let prev = i.checked_sub(1).map(|j| &runs[j]);
            let work = r.baseline.as_ref().map(|b| b.work);
            ScalingRow {
                param: r.param,
                probe_calls: r.probe_calls,
                probe_ratio: prev.and_then(|p| ratio(r.probe_calls, p.probe_calls)),
                baseline_work: work,
                baseline_ratio: prev
                    .and_then(|p| p.baseline.as_ref())
                    .zip(work)
                    .and_then(|(pb, w)| ratio(w, pb.work)),
            }
        })
        .collect()
}

/// Runs a named suite. Unknown names are an error; `empty` has no runs.
/// Only the random families use `seed`; it is recorded either way.
pub fn run_suite(suite: &str, seed: u64) -> Result<BenchReport, String> {
    let runs: Vec<RunRecord> = match suite {
        "empty" => Vec::new(),
        "bowtie" => [250, 500, 1000, 2000]
            .into_iter()
            .map(|n| {
                let inst = bowtie_random(n, n as Value, seed);
                run_instance(&inst, n as u64, ModeChoice::Auto, Some(Baseline::Yannakakis))
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?,
        "pathHard" => [16, 32, 64, 128]
            .into_iter()
            .map(|m| run_instance(&path_hard_wide(5, m, 2), m as u64, ModeChoice::Auto, Some(Baseline::Leapfrog)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?,
        "setIntersect" => [1_000, 10_000, 100_000]
            .into_iter()
            .map(|n| run_instance(&set_intersect_disjoint(n), n as u64, ModeChoice::Auto, Some(Baseline::Merge)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?,
        "triangle" | "triangleGeneric" => {
            let mode = if suite == "triangle" { ModeChoice::Triangle } else { ModeChoice::General };
            [32, 64, 128, 256]
                .into_iter()
                .map(|n| run_instance(&triangle_offset(n), n as u64, mode, Some(Baseline::Leapfrog)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown suite `{other}`; known: {}", SUITES.join(", "))),
    };
    let scaling = scaling(&runs);
    Ok(BenchReport { suite: suite.to_string(), seed, runs, scaling })
}

pub fn expected_mode(choice: ModeChoice) -> Option<EvalMode> {
    match choice {
        ModeChoice::Auto => None,
        ModeChoice::Beta => Some(EvalMode::BetaChain),
        ModeChoice::General => Some(EvalMode::ShadowGeneral),
        ModeChoice::Triangle => Some(EvalMode::Triangle),
    }
}
