//! Per-iteration convergence records shared by every stochastic solver.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// Header line of the convergence trace CSV.
pub const TRACE_CSV_HEADER: &str = "iteration,best_fitness,mean_fitness,population";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based index of the iteration (or generation) that produced the record.
    pub iteration: usize,
    /// Best fitness seen so far, including earlier iterations.
    pub best_fitness: f64,
    /// Mean fitness over the population alive at the end of the iteration.
    pub mean_fitness: f64,
    pub population: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
}

/// Outcome of one solver run.
///
/// `records` holds one entry per iteration actually executed; a run with zero
/// iterations has no records and reports the best member of its initial
/// population through `best_habitat` / `best_fitness`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    pub best_habitat: Vec<f64>,
    pub best_fitness: f64,
    pub termination: Termination,
    pub wall_seconds: f64,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// First iteration whose best-so-far fitness equals the final best.
    /// Zero when the initial population already held it.
    pub fn iterations_to_best(&self) -> usize {
        self.records
            .iter()
            .find(|r| r.best_fitness >= self.best_fitness)
            .map_or(0, |r| r.iteration)
    }

    /// Equality ignoring wall-clock time.
    pub fn same_run(&self, other: &RunTrace) -> bool {
        self.termination == other.termination
            && bits_eq(self.best_fitness, other.best_fitness)
            && self.best_habitat.len() == other.best_habitat.len()
            && self
                .best_habitat
                .iter()
                .zip(&other.best_habitat)
                .all(|(a, b)| bits_eq(*a, *b))
            && self.records.len() == other.records.len()
            && self.records.iter().zip(&other.records).all(|(a, b)| {
                a.iteration == b.iteration
                    && a.population == b.population
                    && bits_eq(a.best_fitness, b.best_fitness)
                    && bits_eq(a.mean_fitness, b.mean_fitness)
            })
    }

    /// Writes the trace as CSV with the [`TRACE_CSV_HEADER`] header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{TRACE_CSV_HEADER}")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{}",
                r.iteration, r.best_fitness, r.mean_fitness, r.population
            )?;
        }
        Ok(())
    }
}

fn bits_eq(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(bests: &[f64]) -> RunTrace {
        RunTrace {
            records: bests
                .iter()
                .enumerate()
                .map(|(i, &b)| IterationRecord {
                    iteration: i + 1,
                    best_fitness: b,
                    mean_fitness: b - 1.0,
                    population: 10,
                })
                .collect(),
            best_habitat: vec![0.0],
            best_fitness: *bests.last().unwrap_or(&0.0),
            termination: Termination::MaxIterations,
            wall_seconds: 0.0,
        }
    }

    #[test]
    fn iterations_to_best_finds_first_hit() {
        assert_eq!(trace(&[1.0, 3.0, 3.0, 3.0]).iterations_to_best(), 2);
        assert_eq!(trace(&[]).iterations_to_best(), 0);
    }

    #[test]
    fn csv_has_header_and_one_row_per_record() {
        let mut buf = Vec::new();
        trace(&[1.0, 2.5]).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], TRACE_CSV_HEADER);
        assert_eq!(lines[1], "1,1,0,10");
        assert_eq!(lines[2], "2,2.5,1.5,10");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn same_run_ignores_wall_time() {
        let a = trace(&[1.0, 2.0]);
        let mut b = a.clone();
        b.wall_seconds = 9.0;
        assert!(a.same_run(&b));
        b.records[0].mean_fitness = 7.0;
        assert!(!a.same_run(&b));
    }
}
