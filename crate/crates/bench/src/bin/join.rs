use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use minesweeper::engine::{stats_report, EvalOptions};
use msbench::baselines::{run_baseline, Baseline};
use msbench::generate::Family;
use msbench::ingest::{load, write_relation, ValueOrder};
use msbench::query::parse_query;
use msbench::report::run_suite;
use msbench::run::{cert_ub, make_plan, mode_name, run_plan, ModeChoice};
use serde_json::json;

/// Worst-case join evaluation driven by gap constraints.
#[derive(Parser)]
#[command(name = "join", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a query over TSV/CSV files and print the result.
    Run {
        /// File holding a rule such as `Q(A,B) :- R(A), S(A,B).`
        #[arg(long)]
        query: PathBuf,
        /// Directory with one `<atom>.tsv` or `<atom>.csv` per body atom.
        #[arg(long)]
        data_dir: PathBuf,
        /// Comma-separated attribute names.
        #[arg(long)]
        gao: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeChoice,
        /// How raw values are ordered before encoding.
        #[arg(long, value_enum, default_value_t)]
        order: ValueOrder,
        /// Also run a baseline and record its work counter.
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        /// Write counters and reference bounds as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print every probe and the constraints it produced to stderr, in
        /// dictionary codes.
        #[arg(long)]
        trace: bool,
    },
    /// Print the structural analysis of a query.
    Analyze {
        #[arg(long)]
        query: PathBuf,
        /// List up to this many nested elimination orders.
        #[arg(long, default_value_t = 16)]
        neo_limit: usize,
    },
    /// Write a generated instance: `query.txt` plus one TSV per atom.
    Gen {
        /// e.g. `pathHard(5,16)` or `triangleRandom(32,0.3)`
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a benchmark suite and write its JSON report.
    Bench {
        /// One of empty, pathHard, setIntersect, triangle.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Misuse of the command line, as opposed to bad data.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { query, data_dir, gao, mode, order, baseline, report, trace } => {
            run(&query, &data_dir, gao.as_deref(), mode, order, baseline, report.as_deref(), trace)
        }
        Command::Analyze { query, neo_limit } => analyze(&query, neo_limit),
        Command::Gen { family, seed, out } => gen(&family, seed, &out),
        Command::Bench { suite, seed, report } => bench(&suite, seed, report.as_deref()),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn read_query(path: &Path) -> Result<msbench::query::Query> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_query(&text)?)
}

#[allow(clippy::too_many_arguments)]
fn run(
    query: &Path,
    data_dir: &Path,
    gao: Option<&str>,
    mode: ModeChoice,
    order: ValueOrder,
    baseline: Option<Baseline>,
    report: Option<&Path>,
    trace: bool,
) -> Result<()> {
    let q = read_query(query)?;
    let h = &q.hypergraph;
    let plan = make_plan(h, gao, mode).map_err(|e| Usage(e.to_string()))?;
    let db = load(h, data_dir, order)?;
    let ev = run_plan(&plan, &db.relations, EvalOptions { trace, max_probes: None })?;
    if trace {
        for (i, s) in ev.trace.iter().enumerate() {
            let tag = if s.output { " output" } else { "" };
            eprintln!("step {}: probe {:?}{tag}", i + 1, s.probe);
            for c in &s.constraints {
                eprintln!("    {c}");
            }
        }
    }

    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    writeln!(out, "{}", h.attributes().join("\t"))?;
    for t in ev.sorted_tuples() {
        writeln!(out, "{}", db.decode(&t).join("\t"))?;
    }
    out.flush()?;

    if let Some(path) = report {
        let cert = cert_ub(&plan, &db.relations)?;
        let r = db.relations.iter().map(|r| r.arity()).max().unwrap_or(0) as u32;
        let bounds = stats_report(&ev.stats, cert, ev.stats.output_count, r, db.relations.len() as u64);
        let base = match baseline {
            Some(b) => {
                let run = run_baseline(b, h, plan.gao(), &db.relations).map_err(|e| Usage(e.to_string()))?;
                Some(json!({ "name": format!("{b:?}").to_lowercase(), "work": run.work }))
            }
            None => None,
        };
        let doc = json!({
            "mode": mode_name(plan.mode()),
            "gao": plan.gao().names(h),
            "inputSize": db.size(),
            "output": ev.stats.output_count,
            "stats": ev.stats,
            "bounds": bounds,
            "baseline": base,
            "wallMs": ev.elapsed_ms,
        });
        write_json(path, &doc)?;
    }
    Ok(())
}

fn analyze(query: &Path, neo_limit: usize) -> Result<()> {
    let q = read_query(query)?;
    let h = &q.hypergraph;
    let (width_order, width) = h.min_width_order();
    let neo = h.nested_elimination_order();
    let all_neos: Vec<Vec<&str>> = h.nested_elimination_orders(neo_limit).iter().map(|g| g.names(h)).collect();
    let choice = make_plan(h, None, ModeChoice::Auto)?;
    let doc = json!({
        "attributes": h.attributes(),
        "relations": h.edges().iter().map(|e| &e.name).collect::<Vec<_>>(),
        "alphaAcyclic": h.is_alpha_acyclic(),
        "betaAcyclic": h.is_beta_acyclic(),
        "triangle": h.is_triangle(),
        "nestedEliminationOrder": neo.as_ref().map(|g| g.names(h)),
        "nestedEliminationOrders": all_neos,
        "eliminationWidth": width,
        "minWidthOrder": width_order.names(h),
        "plan": { "mode": mode_name(choice.mode()), "gao": choice.gao().names(h) },
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn gen(family: &str, seed: u64, out: &Path) -> Result<()> {
    let fam: Family = family.parse().map_err(|e: msbench::generate::GenError| Usage(e.to_string()))?;
    let inst = fam.generate(seed).map_err(|e| Usage(e.to_string()))?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("query.txt"), format!("{}\n", inst.query))?;
    for r in &inst.relations {
        write_relation(&out.join(format!("{}.tsv", r.name)), &inst.hypergraph, r)?;
    }
    eprintln!("{}: {} tuples in {} relations", inst.id, inst.size(), inst.relations.len());
    Ok(())
}

fn bench(suite: &str, seed: u64, report: Option<&Path>) -> Result<()> {
    let rep = run_suite(suite, seed).map_err(Usage)?;
    match report {
        Some(path) => write_json(path, &rep)?,
        None => println!("{}", serde_json::to_string_pretty(&rep)?),
    }
    Ok(())
}
