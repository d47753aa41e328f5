//! Run summaries: the JSON document written by `--out` and the plain-text
//! tables printed to stdout.
//!
//! JSON layout (`schema_version` 1):
//!
//! ```text
//! { schema_version, command, dataset: { source, instruments, budget },
//!   settings: { alpha, penalty_mode, runs, seed, max_iter },
//!   summaries: [ { solver, replications: [ { run, seed, best_value,
//!                  total_weight, feasible, iterations, iterations_to_best,
//!                  wall_seconds, selected } ],
//!                  best_value: { mean, min, max }, mean_iterations_to_best,
//!                  mean_wall_seconds, best_portfolio } ] }
//! ```
//!
//! `seed` is null for the exact solver, which has no randomness and runs once.

use std::io::{self, Write};

use cuckoo_knapsack::portfolio::{EvaluatedPortfolio, Instrument, PortfolioInstance};
use cuckoo_knapsack::solve::{SolveOutcome, SolverKind};
use cuckoo_knapsack::trace::RunTrace;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Document {
    pub schema_version: u32,
    pub command: String,
    pub dataset: Dataset,
    pub settings: Settings,
    pub summaries: Vec<RunSummary>,
}

#[derive(Debug, Serialize)]
pub struct Dataset {
    pub source: String,
    pub instruments: usize,
    pub budget: f64,
}

#[derive(Debug, Serialize)]
pub struct Settings {
    pub alpha: f64,
    pub penalty_mode: String,
    pub runs: u32,
    pub seed: u64,
    pub max_iter: usize,
}

#[derive(Debug, Serialize)]
pub struct Replication {
    pub run: usize,
    pub seed: Option<u64>,
    pub best_value: f64,
    pub total_weight: f64,
    pub feasible: bool,
    pub iterations: usize,
    pub iterations_to_best: usize,
    pub wall_seconds: f64,
    /// Names of the selected instruments, in dataset order.
    pub selected: Vec<String>,
    #[serde(skip)]
    pub trace: Option<RunTrace>,
    #[serde(skip)]
    portfolio: Portfolio,
}

impl Replication {
    pub fn new(run: usize, seed: u64, instance: &PortfolioInstance, outcome: SolveOutcome) -> Self {
        let portfolio = Portfolio::new(instance, &outcome.best_feasible);
        Self {
            run,
            seed: Some(seed),
            best_value: outcome.best_feasible.total_value,
            total_weight: outcome.best_feasible.total_weight,
            feasible: outcome.best_feasible.feasible,
            iterations: outcome.trace.iterations(),
            iterations_to_best: outcome.trace.iterations_to_best(),
            wall_seconds: outcome.trace.wall_seconds,
            selected: portfolio
                .instruments
                .iter()
                .map(|i| i.name.clone())
                .collect(),
            trace: Some(outcome.trace),
            portfolio,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Portfolio {
    pub instruments: Vec<Instrument>,
    pub total_value: f64,
    pub total_weight: f64,
    pub budget: f64,
    pub feasible: bool,
}

impl Portfolio {
    fn new(instance: &PortfolioInstance, eval: &EvaluatedPortfolio) -> Self {
        Self {
            instruments: eval
                .selection
                .indices()
                .map(|i| instance.instruments()[i].clone())
                .collect(),
            total_value: eval.total_value,
            total_weight: eval.total_weight,
            budget: instance.budget(),
            feasible: eval.feasible,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Stats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub solver: &'static str,
    pub replications: Vec<Replication>,
    pub best_value: Stats,
    pub mean_iterations_to_best: f64,
    pub mean_wall_seconds: f64,
    pub best_portfolio: Portfolio,
    #[serde(skip)]
    best_run: usize,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl RunSummary {
    pub fn new(kind: SolverKind, replications: Vec<Replication>) -> Self {
        let values = || replications.iter().map(|r| r.best_value);
        // First replication wins ties so the listing is stable.
        let best = replications.iter().enumerate().fold(0, |b, (i, r)| {
            if r.best_value > replications[b].best_value {
                i
            } else {
                b
            }
        });
        Self {
            solver: kind.as_str(),
            best_value: Stats {
                mean: mean(values()),
                min: values().fold(f64::INFINITY, f64::min),
                max: values().fold(f64::NEG_INFINITY, f64::max),
            },
            mean_iterations_to_best: mean(replications.iter().map(|r| r.iterations_to_best as f64)),
            mean_wall_seconds: mean(replications.iter().map(|r| r.wall_seconds)),
            best_portfolio: replications[best].portfolio.clone(),
            best_run: best,
            replications,
        }
    }

    pub fn exact(
        instance: &PortfolioInstance,
        best: EvaluatedPortfolio,
        wall_seconds: f64,
    ) -> Self {
        let portfolio = Portfolio::new(instance, &best);
        let rep = Replication {
            run: 1,
            seed: None,
            best_value: best.total_value,
            total_weight: best.total_weight,
            feasible: best.feasible,
            iterations: 0,
            iterations_to_best: 0,
            wall_seconds,
            selected: portfolio
                .instruments
                .iter()
                .map(|i| i.name.clone())
                .collect(),
            trace: None,
            portfolio,
        };
        Self::new(SolverKind::Exact, vec![rep])
    }
}

fn seed_label(seed: Option<u64>) -> String {
    seed.map_or_else(|| "-".to_string(), |s| s.to_string())
}

pub fn write_solve<W: Write>(
    out: &mut W,
    instance: &PortfolioInstance,
    summary: &RunSummary,
) -> io::Result<()> {
    writeln!(
        out,
        "solver {} on {} instruments, budget {:.2}",
        summary.solver,
        instance.len(),
        instance.budget()
    )?;
    writeln!(out)?;
    writeln!(
        out,
        "{:>4}  {:>10}  {:>12}  {:>18}  {:>10}",
        "run", "seed", "elapsed (s)", "objective", "iterations"
    )?;
    for r in &summary.replications {
        writeln!(
            out,
            "{:>4}  {:>10}  {:>12.3}  {:>18.2}  {:>10}",
            r.run,
            seed_label(r.seed),
            r.wall_seconds,
            r.best_value,
            r.iterations
        )?;
    }
    writeln!(
        out,
        "{:>4}  {:>10}  {:>12.3}  {:>18.2}",
        "mean", "", summary.mean_wall_seconds, summary.best_value.mean
    )?;
    if summary.replications.len() > 1 {
        writeln!(
            out,
            "best value min {:.2}, max {:.2}; mean iterations to best {:.1}",
            summary.best_value.min, summary.best_value.max, summary.mean_iterations_to_best
        )?;
    }
    writeln!(out)?;
    let rep = &summary.replications[summary.best_run];
    writeln!(
        out,
        "best portfolio (run {}, seed {}):",
        rep.run,
        seed_label(rep.seed)
    )?;
    write_portfolio(out, &summary.best_portfolio)
}

pub fn write_portfolio<W: Write>(out: &mut W, p: &Portfolio) -> io::Result<()> {
    let width = p
        .instruments
        .iter()
        .map(|i| i.name.chars().count())
        .max()
        .unwrap_or(0)
        .max(5);
    writeln!(out, "  {:<width$}  {:>10}  {:>14}", "name", "eps", "price")?;
    for i in &p.instruments {
        writeln!(
            out,
            "  {:<width$}  {:>10}  {:>14.2}",
            i.name, i.eps, i.price
        )?;
    }
    writeln!(
        out,
        "  {:<width$}  {:>10}  {:>14.2}",
        "total", p.total_value, p.total_weight
    )?;
    writeln!(
        out,
        "  {} instruments, budget {:.2}, {}",
        p.instruments.len(),
        p.budget,
        if p.feasible {
            "within budget"
        } else {
            "OVER BUDGET"
        }
    )
}

/// Label, extractor and decimal places for one line of the comparison table.
type Row = (&'static str, fn(&RunSummary) -> f64, usize);

pub fn write_compare<W: Write>(
    out: &mut W,
    instance: &PortfolioInstance,
    coa: &RunSummary,
    ga: &RunSummary,
) -> io::Result<()> {
    writeln!(
        out,
        "coa vs ga on {} instruments, budget {:.2}, {} paired runs",
        instance.len(),
        instance.budget(),
        coa.replications.len()
    )?;
    writeln!(out)?;
    writeln!(
        out,
        "{:>4}  {:>10}  {:>14}  {:>14}",
        "run", "seed", "coa", "ga"
    )?;
    for (c, g) in coa.replications.iter().zip(&ga.replications) {
        writeln!(
            out,
            "{:>4}  {:>10}  {:>14.2}  {:>14.2}",
            c.run,
            seed_label(c.seed),
            c.best_value,
            g.best_value
        )?;
    }
    writeln!(out)?;
    writeln!(out, "{:<24}  {:>14}  {:>14}", "", "coa", "ga")?;
    let rows: [Row; 6] = [
        ("mean best value", |s| s.best_value.mean, 2),
        ("min best value", |s| s.best_value.min, 2),
        ("max best value", |s| s.best_value.max, 2),
        ("mean iterations to best", |s| s.mean_iterations_to_best, 1),
        ("mean wall time (s)", |s| s.mean_wall_seconds, 3),
        (
            "best portfolio size",
            |s| s.best_portfolio.instruments.len() as f64,
            0,
        ),
    ];
    for (label, f, prec) in rows {
        writeln!(
            out,
            "{label:<24}  {:>14.prec$}  {:>14.prec$}",
            f(coa),
            f(ga)
        )?;
    }
    let leader = match coa.best_value.mean.partial_cmp(&ga.best_value.mean) {
        Some(std::cmp::Ordering::Greater) => "coa",
        Some(std::cmp::Ordering::Less) => "ga",
        _ => "tie",
    };
    writeln!(out, "higher mean best value: {leader}")?;
    for s in [coa, ga] {
        writeln!(out)?;
        writeln!(out, "{} best portfolio:", s.solver)?;
        write_portfolio(out, &s.best_portfolio)?;
    }
    Ok(())
}
