//! Knapsack portfolio selection with a Cuckoo Optimization Algorithm.
//!
//! The crate is split along the solver boundary:
//!
//! * [`coa`] is a generic continuous Cuckoo Optimization Algorithm over a
//!   bounded box. It knows nothing about portfolios.
//! * [`portfolio`] defines the knapsack instance, the habitat decoding and
//!   the penalized objective that steers the search.
//! * [`ga`] is a binary genetic algorithm baseline over the same objective.
//! * [`oracle`] holds exact solvers (dynamic programming and enumeration).
//! * [`data`] loads instrument CSVs and ships the bundled market dataset.
//! * [`solve`] wires the pieces together and always reports the best
//!   feasible portfolio seen during a run.

pub mod coa;
pub mod data;
pub mod error;
pub mod ga;
pub mod oracle;
pub mod portfolio;
pub mod solve;
pub mod trace;

pub use error::{Error, Result};
