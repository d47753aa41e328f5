//! End-to-end solver runs on a portfolio instance.
//!
//! Both stochastic solvers search on the penalized fitness but report the
//! best feasible portfolio they evaluated.

use serde::{Deserialize, Serialize};

use crate::coa::{self, Bounds, CoaParams};
use crate::error::Result;
use crate::ga::{self, GaParams};
use crate::oracle;
use crate::portfolio::{
    make_objective, BestFeasible, EvaluatedPortfolio, PenaltyMode, PortfolioInstance,
};
use crate::trace::RunTrace;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub trace: RunTrace,
    pub best_feasible: EvaluatedPortfolio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Coa,
    Ga,
    Exact,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Coa => "coa",
            SolverKind::Ga => "ga",
            SolverKind::Exact => "exact",
        }
    }
}

/// COA over `[0, 1]^N` with threshold decoding.
pub fn solve_coa(
    instance: &PortfolioInstance,
    params: &CoaParams,
    alpha: f64,
    mode: PenaltyMode,
) -> Result<SolveOutcome> {
    let objective = make_objective(instance, alpha, mode)?;
    let bounds = Bounds::unit(instance.len())?;
    let mut best = BestFeasible::new(instance);
    let trace = coa::run(objective.tracking(&mut best), params, &bounds)?;
    Ok(SolveOutcome {
        trace,
        best_feasible: best.into_best(),
    })
}

pub fn solve_ga(
    instance: &PortfolioInstance,
    params: &GaParams,
    alpha: f64,
    mode: PenaltyMode,
) -> Result<SolveOutcome> {
    let out = ga::ga_run(instance, params, alpha, mode)?;
    Ok(SolveOutcome {
        trace: out.trace,
        best_feasible: out.best_feasible,
    })
}

pub fn solve_exact(instance: &PortfolioInstance) -> Result<EvaluatedPortfolio> {
    oracle::solve_dp(instance)
}
