//! Exact 0/1 knapsack solvers used as ground truth.
//!
//! [`solve_dp`] runs the capacity-indexed dynamic program over prices scaled
//! to integer cents; [`brute_force`] enumerates every selection of a small
//! instance.

use crate::error::{Error, Result};
use crate::portfolio::{evaluate, EvaluatedPortfolio, PenaltyMode, PortfolioInstance, Selection};

/// Largest scaled capacity (in cents) the dynamic program accepts.
pub const MAX_SCALED_CAPACITY: u64 = 1 << 31;
pub const MAX_DP_ITEMS: usize = 10_000;
pub const MAX_ENUMERATION_ITEMS: usize = 20;
/// Upper bound on the take-table the dynamic program may allocate.
const MAX_TABLE_BYTES: u64 = 768 << 20;

/// Prices and budget in integer cents.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledInstance {
    pub weights: Vec<u64>,
    pub values: Vec<f64>,
    pub capacity: u64,
}

impl ScaledInstance {
    pub fn new(instance: &PortfolioInstance) -> Result<Self> {
        let capacity = (instance.budget() * 100.0).floor();
        if capacity > MAX_SCALED_CAPACITY as f64 {
            return Err(Error::CapacityTooLarge {
                capacity: capacity as u64,
                limit: MAX_SCALED_CAPACITY,
            });
        }
        let weights = instance
            .instruments()
            .iter()
            .map(|i| (i.price * 100.0).round())
            .map(|w| {
                if w > u64::MAX as f64 {
                    u64::MAX
                } else {
                    w as u64
                }
            })
            .collect();
        let values = instance.instruments().iter().map(|i| i.eps).collect();
        Ok(Self {
            weights,
            values,
            capacity: capacity as u64,
        })
    }
}

/// Exact optimum by dynamic programming over integer-cent capacity.
///
/// Instruments with non-positive earnings are left out up front; they can
/// never raise the value of a selection.
pub fn solve_dp(instance: &PortfolioInstance) -> Result<EvaluatedPortfolio> {
    solve_dp_with(instance, true)
}

/// [`solve_dp`] with the non-positive-earnings filter switchable.
pub fn solve_dp_with(
    instance: &PortfolioInstance,
    exclude_non_positive: bool,
) -> Result<EvaluatedPortfolio> {
    if instance.len() > MAX_DP_ITEMS {
        return Err(Error::InstanceTooLarge {
            items: instance.len(),
            limit: MAX_DP_ITEMS,
        });
    }
    let scaled = ScaledInstance::new(instance)?;
    let mut capacity = scaled.capacity;
    loop {
        let selection = dp_select(&scaled, capacity, exclude_non_positive)?;
        let eval = evaluate(instance, &selection, 0.0, PenaltyMode::Penalizing)?;
        if eval.feasible {
            return Ok(eval);
        }
        // Cent rounding let the selection overshoot in unscaled arithmetic;
        // tighten by one cent and solve again.
        capacity = capacity.checked_sub(1).ok_or_else(|| {
            Error::InvalidState("no feasible capacity left after rounding".into())
        })?;
    }
}

fn dp_select(
    scaled: &ScaledInstance,
    capacity: u64,
    exclude_non_positive: bool,
) -> Result<Selection> {
    let n = scaled.weights.len();
    let items: Vec<usize> = (0..n)
        .filter(|&i| scaled.weights[i] <= capacity)
        .filter(|&i| !exclude_non_positive || scaled.values[i] > 0.0)
        .collect();

    // Capacity beyond the combined weight of all candidates is never used.
    let total: u64 = items.iter().map(|&i| scaled.weights[i]).sum();
    let cap = capacity.min(total) as usize;
    let words = cap / 64 + 1;
    let table_bytes = (items.len() as u64) * (words as u64) * 8;
    if table_bytes > MAX_TABLE_BYTES {
        return Err(Error::CapacityTooLarge {
            capacity,
            limit: MAX_TABLE_BYTES * 8 / (items.len().max(1) as u64),
        });
    }

    // best[c] is the optimum with weight at most c over the rows so far;
    // reach[row] bounds the capacities where that row can change anything.
    let mut best = vec![0.0f64; cap + 1];
    let mut take = vec![0u64; items.len() * words];
    let mut reach = Vec::with_capacity(items.len());
    let mut covered = 0usize;
    for (row, &i) in items.iter().enumerate() {
        let w = scaled.weights[i] as usize;
        let v = scaled.values[i];
        let next = (covered + w).min(cap);
        let plateau = best[covered];
        best[covered + 1..=next].fill(plateau);
        covered = next;
        reach.push(covered);

        let bits = &mut take[row * words..(row + 1) * words];
        for c in (w..=covered).rev() {
            let with = best[c - w] + v;
            if with > best[c] {
                best[c] = with;
                bits[c / 64] |= 1 << (c % 64);
            }
        }
    }

    let mut chosen = vec![false; n];
    let mut c = cap;
    for (row, &i) in items.iter().enumerate().rev() {
        c = c.min(reach[row]);
        if take[row * words + c / 64] >> (c % 64) & 1 == 1 {
            chosen[i] = true;
            c -= scaled.weights[i] as usize;
        }
    }
    Ok(Selection::new(chosen))
}

/// Exhaustive search over all `2^N` selections, feasibility checked in
/// unscaled arithmetic. Ties go to the lexicographically smallest selection
/// (`false < true`, first instrument most significant).
pub fn brute_force(instance: &PortfolioInstance) -> Result<EvaluatedPortfolio> {
    let n = instance.len();
    if n > MAX_ENUMERATION_ITEMS {
        return Err(Error::InstanceTooLarge {
            items: n,
            limit: MAX_ENUMERATION_ITEMS,
        });
    }
    let budget = instance.budget();
    let inst = instance.instruments();
    let mut best_mask = 0u32;
    let mut best_value = 0.0;
    // Counting upward visits selections in lexicographic order because bit
    // n-1-i encodes instrument i.
    for mask in 0u32..(1 << n) {
        let mut value = 0.0;
        let mut weight = 0.0;
        for (i, item) in inst.iter().enumerate() {
            if mask >> (n - 1 - i) & 1 == 1 {
                value += item.eps;
                weight += item.price;
            }
        }
        if weight <= budget && value > best_value {
            best_value = value;
            best_mask = mask;
        }
    }
    let chosen = (0..n).map(|i| best_mask >> (n - 1 - i) & 1 == 1).collect();
    evaluate(
        instance,
        &Selection::new(chosen),
        0.0,
        PenaltyMode::Penalizing,
    )
}
