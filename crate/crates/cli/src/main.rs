use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cuckoo_knapsack::coa::CoaParams;
use cuckoo_knapsack::data::{bundled_dataset, load_csv_path};
use cuckoo_knapsack::ga::GaParams;
use cuckoo_knapsack::portfolio::{PenaltyMode, PortfolioInstance, DEFAULT_ALPHA, DEFAULT_BUDGET};
use cuckoo_knapsack::solve::{solve_coa, solve_exact, solve_ga, SolveOutcome, SolverKind};
use rayon::prelude::*;

mod report;

use report::{Dataset, Document, Replication, RunSummary, Settings};

const THREADS_ENV: &str = "CUCKOO_KNAPSACK_THREADS";

#[derive(Parser)]
#[command(
    name = "cuckoo-knapsack",
    version,
    about = "Stock portfolio selection as a 0/1 knapsack"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver for a number of seeded replications.
    Solve {
        #[arg(long, value_enum, default_value_t = Solver::Coa)]
        solver: Solver,
        #[command(flatten)]
        common: Common,
    },
    /// Run COA and GA on paired seeds and report them side by side.
    Compare {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Coa,
    Ga,
    Exact,
}

impl From<Solver> for SolverKind {
    fn from(s: Solver) -> Self {
        match s {
            Solver::Coa => SolverKind::Coa,
            Solver::Ga => SolverKind::Ga,
            Solver::Exact => SolverKind::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Penalty {
    Penalizing,
    Literal,
}

impl From<Penalty> for PenaltyMode {
    fn from(p: Penalty) -> Self {
        match p {
            Penalty::Penalizing => PenaltyMode::Penalizing,
            Penalty::Literal => PenaltyMode::Literal,
        }
    }
}

#[derive(Args)]
struct Common {
    /// CSV file with a `name,eps,price` header, or `bundled`.
    #[arg(long, default_value = "bundled")]
    data: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = positive, allow_negative_numbers = true)]
    budget: f64,
    /// Penalty coefficient applied to the relative budget overrun.
    #[arg(long, default_value_t = DEFAULT_ALPHA, value_parser = non_negative, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = Penalty::Penalizing)]
    penalty_mode: Penalty,
    /// Number of replications; replication i uses seed + i.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    runs: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Iterations (COA) or generations (GA) per run.
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Directory for per-replication convergence traces (CSV).
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    /// Path for the JSON summary document.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        Ok(_) => Err("must be a finite number greater than zero".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
        Ok(_) => Err("must be a finite number >= 0".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let pool = thread_pool()?;
    match cli.command {
        Command::Solve { solver, common } => {
            let instance = load_instance(&common)?;
            let summary = pool.install(|| run_solver(solver.into(), &instance, &common))?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            report::write_solve(&mut out, &instance, &summary)?;
            finish(&common, &instance, "solve", vec![summary])
        }
        Command::Compare { common } => {
            let instance = load_instance(&common)?;
            let coa = pool.install(|| run_solver(SolverKind::Coa, &instance, &common))?;
            let ga = pool.install(|| run_solver(SolverKind::Ga, &instance, &common))?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            report::write_compare(&mut out, &instance, &coa, &ga)?;
            finish(&common, &instance, "compare", vec![coa, ga])
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

fn load_instance(common: &Common) -> Result<PortfolioInstance> {
    if common.data == "bundled" {
        let (instance, _) = bundled_dataset();
        return Ok(instance.with_budget(common.budget)?);
    }
    let (instruments, report) = load_csv_path(&common.data)
        .with_context(|| format!("cannot load dataset {}", common.data))?;
    for issue in &report.rejected {
        eprintln!(
            "warning: {}: line {} rejected: {}",
            common.data, issue.line, issue.reason
        );
    }
    if !report.duplicates.is_empty() {
        eprintln!(
            "note: {}: {} repeated rows skipped",
            common.data,
            report.duplicates.len()
        );
    }
    Ok(PortfolioInstance::new(instruments, common.budget)?)
}

fn run_solver(
    kind: SolverKind,
    instance: &PortfolioInstance,
    common: &Common,
) -> Result<RunSummary> {
    let alpha = common.alpha;
    let mode = PenaltyMode::from(common.penalty_mode);
    if kind == SolverKind::Exact {
        let started = Instant::now();
        let best = solve_exact(instance)?;
        return Ok(RunSummary::exact(
            instance,
            best,
            started.elapsed().as_secs_f64(),
        ));
    }
    let seeds: Vec<u64> = (0..u64::from(common.runs))
        .map(|i| common.seed.wrapping_add(i))
        .collect();
    let outcomes = seeds
        .par_iter()
        .map(|&seed| -> Result<(u64, SolveOutcome)> {
            let outcome = match kind {
                SolverKind::Coa => {
                    let params = CoaParams {
                        max_iterations: common.max_iter,
                        ..CoaParams::default().with_seed(seed)
                    };
                    solve_coa(instance, &params, alpha, mode)?
                }
                _ => {
                    let params = GaParams {
                        max_generations: common.max_iter,
                        ..GaParams::default().with_seed(seed)
                    };
                    solve_ga(instance, &params, alpha, mode)?
                }
            };
            Ok((seed, outcome))
        })
        .collect::<Result<Vec<_>>>()?;
    let replications = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, (seed, outcome))| Replication::new(i + 1, seed, instance, outcome))
        .collect();
    Ok(RunSummary::new(kind, replications))
}

fn finish(
    common: &Common,
    instance: &PortfolioInstance,
    command: &str,
    summaries: Vec<RunSummary>,
) -> Result<()> {
    if let Some(dir) = &common.trace_dir {
        write_traces(dir, &summaries)?;
    }
    if let Some(path) = &common.out {
        let doc = Document {
            schema_version: report::SCHEMA_VERSION,
            command: command.to_string(),
            dataset: Dataset {
                source: common.data.clone(),
                instruments: instance.len(),
                budget: instance.budget(),
            },
            settings: Settings {
                alpha: common.alpha,
                penalty_mode: PenaltyMode::from(common.penalty_mode).to_string(),
                runs: common.runs,
                seed: common.seed,
                max_iter: common.max_iter,
            },
            summaries,
        };
        let file =
            fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut w = io::BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}

/// One file per replication, `<solver>_run<NN>_seed<S>.csv`.
fn write_traces(dir: &Path, summaries: &[RunSummary]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for summary in summaries {
        for rep in &summary.replications {
            let (Some(trace), Some(seed)) = (&rep.trace, rep.seed) else {
                continue;
            };
            let path = dir.join(format!(
                "{}_run{:02}_seed{seed}.csv",
                summary.solver, rep.run
            ));
            let file = fs::File::create(&path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = io::BufWriter::new(file);
            trace.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
