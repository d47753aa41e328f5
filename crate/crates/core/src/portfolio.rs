//! Knapsack formulation of portfolio selection.
//!
//! Each instrument is bought at most once. The portfolio value is the sum of
//! the selected earnings per share, its weight the sum of share prices, and
//! the weight may not exceed the budget. Searches work on a penalized
//! fitness; reports always come from [`BestFeasible`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: f64 = 100_000.0;
pub const DEFAULT_ALPHA: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instrument {
    pub name: String,
    /// Earnings per share. May be negative.
    pub eps: f64,
    /// Price of one share, strictly positive.
    pub price: f64,
}

impl Instrument {
    pub fn new(name: impl Into<String>, eps: f64, price: f64) -> Self {
        Self {
            name: name.into(),
            eps,
            price,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioInstance {
    instruments: Vec<Instrument>,
    budget: f64,
}

impl PortfolioInstance {
    pub fn new(instruments: Vec<Instrument>, budget: f64) -> Result<Self> {
        if instruments.is_empty() {
            return Err(Error::InvalidArgument(
                "instance needs at least one instrument".into(),
            ));
        }
        if !(budget.is_finite() && budget > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "budget must be positive, got {budget}"
            )));
        }
        let mut names = std::collections::HashSet::new();
        for inst in &instruments {
            if inst.name.is_empty() {
                return Err(Error::InvalidArgument("instrument name is empty".into()));
            }
            if !names.insert(inst.name.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate instrument {:?}",
                    inst.name
                )));
            }
            if !inst.eps.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{}: eps is not finite",
                    inst.name
                )));
            }
            if !(inst.price.is_finite() && inst.price > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{}: price must be positive, got {}",
                    inst.name, inst.price
                )));
            }
        }
        Ok(Self {
            instruments,
            budget,
        })
    }

    pub fn instruments(&self) -> &[Instrument] {
        &self.instruments
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.instruments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instruments.is_empty()
    }

    pub fn with_budget(&self, budget: f64) -> Result<Self> {
        Self::new(self.instruments.clone(), budget)
    }
}

/// Which instruments are bought.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Selection(Vec<bool>);

impl Selection {
    pub fn new(chosen: Vec<bool>) -> Self {
        Self(chosen)
    }

    pub fn empty(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn chosen(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&c| c).count()
    }

    /// Indices of the selected instruments, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
    }

    /// The corner of the unit box that decodes back to this selection.
    pub fn to_habitat(&self) -> Vec<f64> {
        self.0.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// `value * (1 - alpha * violation)`: overspending lowers fitness.
    #[default]
    Penalizing,
    /// `value * (1 + alpha * violation)`, the sign as originally printed.
    /// Overspending raises fitness; kept for fidelity experiments.
    Literal,
}

impl PenaltyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PenaltyMode::Penalizing => "penalizing",
            PenaltyMode::Literal => "literal",
        }
    }
}

impl fmt::Display for PenaltyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PenaltyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "penalizing" => Ok(PenaltyMode::Penalizing),
            "literal" => Ok(PenaltyMode::Literal),
            other => Err(Error::InvalidArgument(format!(
                "unknown penalty mode {other:?} (expected penalizing or literal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedPortfolio {
    pub selection: Selection,
    pub total_value: f64,
    pub total_weight: f64,
    pub violation: f64,
    pub penalized_fitness: f64,
    pub feasible: bool,
}

/// Relative budget overrun, `max(weight / budget - 1, 0)`, rounded once.
pub fn violation(total_weight: f64, budget: f64) -> f64 {
    if total_weight <= budget {
        0.0
    } else {
        div_dd(two_sum(total_weight, -budget), budget)
    }
}

/// Fitness of a portfolio with the given totals.
///
/// `Penalizing` is `value * (1 - alpha * violation)` and `Literal` is
/// `value * (1 + alpha * violation)`. Feasible portfolios score their raw
/// value in both modes. The product is carried in double-double arithmetic
/// as `value * (budget -/+ alpha * overrun) / budget` so the result is within
/// one ulp of the exact value even when the penalty nearly cancels the value.
pub fn penalized(
    total_value: f64,
    total_weight: f64,
    budget: f64,
    alpha: f64,
    mode: PenaltyMode,
) -> f64 {
    if total_weight <= budget {
        return total_value;
    }
    let t = match mode {
        PenaltyMode::Penalizing => -alpha,
        PenaltyMode::Literal => alpha,
    };
    let (dh, dl) = two_sum(total_weight, -budget);
    let (ph, pe) = two_prod(t, dh);
    let (nh, ne) = two_sum(budget, ph);
    let scale = two_sum(nh, ne + pe + t * dl);
    let (mh, me) = two_prod(total_value, scale.0);
    div_dd((mh, me + total_value * scale.1), budget)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn div_dd((hi, lo): (f64, f64), d: f64) -> f64 {
    let q = hi / d;
    let r = (-q).mul_add(d, hi);
    q + (r + lo) / d
}

/// Threshold decoding: coordinate `i` selects instrument `i` iff it is at
/// least 0.5.
pub fn decode_habitat(habitat: &[f64]) -> Result<Selection> {
    habitat
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if (0.0..=1.0).contains(&x) {
                Ok(x >= 0.5)
            } else {
                Err(Error::InvalidArgument(format!(
                    "habitat coordinate {i} = {x} lies outside [0, 1]"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(Selection)
}

pub fn evaluate(
    instance: &PortfolioInstance,
    selection: &Selection,
    alpha: f64,
    mode: PenaltyMode,
) -> Result<EvaluatedPortfolio> {
    if selection.len() != instance.len() {
        return Err(Error::InvalidArgument(format!(
            "selection has {} entries, instance has {} instruments",
            selection.len(),
            instance.len()
        )));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be non-negative, got {alpha}"
        )));
    }
    Ok(evaluate_unchecked(instance, selection, alpha, mode))
}

fn evaluate_unchecked(
    instance: &PortfolioInstance,
    selection: &Selection,
    alpha: f64,
    mode: PenaltyMode,
) -> EvaluatedPortfolio {
    let mut total_value = 0.0;
    let mut total_weight = 0.0;
    for i in selection.indices() {
        let inst = &instance.instruments[i];
        total_value += inst.eps;
        total_weight += inst.price;
    }
    let violation = violation(total_weight, instance.budget);
    EvaluatedPortfolio {
        selection: selection.clone(),
        total_value,
        total_weight,
        violation,
        penalized_fitness: penalized(total_value, total_weight, instance.budget, alpha, mode),
        feasible: violation == 0.0,
    }
}

/// Best feasible portfolio among everything offered so far.
///
/// Starts from the empty portfolio, which is always affordable. Later
/// offers replace it only with a strictly larger value.
#[derive(Debug, Clone, PartialEq)]
pub struct BestFeasible {
    best: EvaluatedPortfolio,
}

impl BestFeasible {
    pub fn new(instance: &PortfolioInstance) -> Self {
        Self {
            best: evaluate_unchecked(
                instance,
                &Selection::empty(instance.len()),
                0.0,
                PenaltyMode::Penalizing,
            ),
        }
    }

    pub fn offer(&mut self, candidate: &EvaluatedPortfolio) {
        if candidate.feasible && candidate.total_value > self.best.total_value {
            self.best = candidate.clone();
        }
    }

    pub fn best(&self) -> &EvaluatedPortfolio {
        &self.best
    }

    pub fn into_best(self) -> EvaluatedPortfolio {
        self.best
    }
}

/// The penalized knapsack objective over habitats in `[0, 1]^N`.
#[derive(Debug, Clone, Copy)]
pub struct PortfolioObjective<'a> {
    instance: &'a PortfolioInstance,
    alpha: f64,
    mode: PenaltyMode,
}

pub fn make_objective(
    instance: &PortfolioInstance,
    alpha: f64,
    mode: PenaltyMode,
) -> Result<PortfolioObjective<'_>> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be non-negative, got {alpha}"
        )));
    }
    Ok(PortfolioObjective {
        instance,
        alpha,
        mode,
    })
}

impl<'a> PortfolioObjective<'a> {
    pub fn instance(&self) -> &'a PortfolioInstance {
        self.instance
    }

    pub fn evaluate_selection(&self, selection: &Selection) -> EvaluatedPortfolio {
        evaluate_unchecked(self.instance, selection, self.alpha, self.mode)
    }

    /// Full evaluation of a habitat. Coordinates outside the unit box or a
    /// wrong length yield `None`.
    pub fn evaluate_habitat(&self, habitat: &[f64]) -> Option<EvaluatedPortfolio> {
        if habitat.len() != self.instance.len() {
            return None;
        }
        decode_habitat(habitat)
            .ok()
            .map(|s| self.evaluate_selection(&s))
    }

    /// Penalized fitness; `-inf` for habitats that do not decode.
    pub fn fitness(&self, habitat: &[f64]) -> f64 {
        self.evaluate_habitat(habitat)
            .map_or(f64::NEG_INFINITY, |e| e.penalized_fitness)
    }

    /// A fitness closure that also feeds every evaluation to `best`.
    pub fn tracking<'b>(&'b self, best: &'b mut BestFeasible) -> impl FnMut(&[f64]) -> f64 + 'b {
        move |habitat| match self.evaluate_habitat(habitat) {
            Some(eval) => {
                best.offer(&eval);
                eval.penalized_fitness
            }
            None => f64::NEG_INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> PortfolioInstance {
        PortfolioInstance::new(
            vec![
                Instrument::new("Pars Daru", 3344.0, 21033.76),
                Instrument::new("Sina Daru", 2444.0, 21604.96),
            ],
            DEFAULT_BUDGET,
        )
        .unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(PortfolioInstance::new(vec![], 1.0).is_err());
        assert!(PortfolioInstance::new(vec![Instrument::new("a", 1.0, 1.0)], 0.0).is_err());
        assert!(PortfolioInstance::new(vec![Instrument::new("a", 1.0, 0.0)], 1.0).is_err());
        assert!(PortfolioInstance::new(vec![Instrument::new("", 1.0, 1.0)], 1.0).is_err());
        assert!(PortfolioInstance::new(
            vec![
                Instrument::new("a", 1.0, 1.0),
                Instrument::new("a", 2.0, 1.0)
            ],
            1.0
        )
        .is_err());
    }

    #[test]
    fn decode_thresholds() {
        assert_eq!(decode_habitat(&[0.0; 3]).unwrap().count(), 0);
        assert_eq!(decode_habitat(&[1.0; 3]).unwrap().count(), 3);
        assert_eq!(
            decode_habitat(&[0.5, 0.4999]).unwrap().chosen(),
            &[true, false]
        );
        assert!(decode_habitat(&[0.2, 1.01]).is_err());
        assert!(decode_habitat(&[-0.0001]).is_err());
    }

    #[test]
    fn empty_selection_evaluates_to_zero() {
        let e = evaluate(
            &pair(),
            &Selection::empty(2),
            DEFAULT_ALPHA,
            PenaltyMode::Penalizing,
        )
        .unwrap();
        assert_eq!(
            (
                e.total_value,
                e.total_weight,
                e.violation,
                e.penalized_fitness
            ),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert!(e.feasible);
    }

    #[test]
    fn two_table_rows_fit_the_budget() {
        let e = evaluate(
            &pair(),
            &Selection::new(vec![true, true]),
            DEFAULT_ALPHA,
            PenaltyMode::Penalizing,
        )
        .unwrap();
        assert_eq!(e.total_value, 5788.0);
        assert!((e.total_weight - 42638.72).abs() < 1e-9);
        assert_eq!(e.violation, 0.0);
        assert_eq!(e.penalized_fitness, 5788.0);
        assert!(e.feasible);
    }

    #[test]
    fn ten_percent_overrun_zeroes_penalized_fitness() {
        let inst = PortfolioInstance::new(
            vec![Instrument::new("x", 1000.0, 110_000.0)],
            DEFAULT_BUDGET,
        )
        .unwrap();
        let sel = Selection::new(vec![true]);
        let e = evaluate(&inst, &sel, 10.0, PenaltyMode::Penalizing).unwrap();
        assert_eq!(e.violation, 0.1);
        assert_eq!(e.penalized_fitness, 0.0);
        assert!(!e.feasible);
        let lit = evaluate(&inst, &sel, 10.0, PenaltyMode::Literal).unwrap();
        assert_eq!(lit.penalized_fitness, 2000.0);
    }

    #[test]
    fn evaluate_rejects_bad_arguments() {
        assert!(evaluate(&pair(), &Selection::empty(3), 10.0, PenaltyMode::Penalizing).is_err());
        assert!(evaluate(&pair(), &Selection::empty(2), -1.0, PenaltyMode::Penalizing).is_err());
    }

    #[test]
    fn objective_basics() {
        let inst = pair();
        let obj = make_objective(&inst, 10.0, PenaltyMode::Penalizing).unwrap();
        assert_eq!(obj.fitness(&[0.0, 0.0]), 0.0);
        assert_eq!(obj.fitness(&[0.9, 0.6]), 5788.0);
        assert_eq!(obj.fitness(&[0.5, 0.99]), obj.fitness(&[1.0, 0.5]));
        assert_eq!(obj.fitness(&[0.9]), f64::NEG_INFINITY);
        assert!(make_objective(&inst, -0.5, PenaltyMode::Literal).is_err());
    }

    #[test]
    fn tracking_keeps_best_feasible_only() {
        let inst = PortfolioInstance::new(
            vec![
                Instrument::new("cheap", 10.0, 40.0),
                Instrument::new("dear", 500.0, 90.0),
            ],
            100.0,
        )
        .unwrap();
        let obj = make_objective(&inst, 10.0, PenaltyMode::Literal).unwrap();
        let mut best = BestFeasible::new(&inst);
        {
            let mut f = obj.tracking(&mut best);
            f(&[1.0, 0.0]);
            // Infeasible (weight 130) and favoured by the literal sign.
            assert!(f(&[1.0, 1.0]) > 510.0);
        }
        assert_eq!(best.best().total_value, 10.0);
        {
            let mut f = obj.tracking(&mut best);
            f(&[0.0, 1.0]);
        }
        assert_eq!(best.best().selection.chosen(), &[false, true]);
    }

    #[test]
    fn penalty_mode_parses() {
        assert_eq!(
            "literal".parse::<PenaltyMode>().unwrap(),
            PenaltyMode::Literal
        );
        assert_eq!(
            "penalizing".parse::<PenaltyMode>().unwrap(),
            PenaltyMode::Penalizing
        );
        assert!("both".parse::<PenaltyMode>().is_err());
    }
}
