//! Binary genetic algorithm baseline.
//!
//! Chromosomes are selections. Each generation keeps one elite and fills
//! the rest with offspring from size-2 tournaments, single-point crossover
//! and bit-flip mutation on a fraction of the offspring.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::portfolio::{
    make_objective, BestFeasible, EvaluatedPortfolio, PenaltyMode, PortfolioInstance, Selection,
};
use crate::trace::{IterationRecord, RunTrace, Termination};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub population_size: usize,
    /// Probability that a parent pair is recombined.
    pub crossover_rate: f64,
    /// Fraction of offspring that go through mutation.
    pub mutation_fraction: f64,
    /// Flip probability per gene of a mutated offspring.
    pub per_gene_mutation_rate: f64,
    pub max_generations: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 150,
            crossover_rate: 0.9,
            mutation_fraction: 0.3,
            per_gene_mutation_rate: 0.02,
            max_generations: 200,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config(format!(
                "population_size must be at least 2, got {}",
                self.population_size
            )));
        }
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_fraction", self.mutation_fraction),
            ("per_gene_mutation_rate", self.per_gene_mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!(
                    "{name} must lie in [0, 1], got {rate}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub trace: RunTrace,
    pub best_feasible: EvaluatedPortfolio,
}

#[derive(Clone)]
struct Individual {
    genes: Vec<bool>,
    fitness: f64,
}

fn tournament<'a, R: Rng + ?Sized>(population: &'a [Individual], rng: &mut R) -> &'a Individual {
    let a = &population[rng.gen_range(0..population.len())];
    let b = &population[rng.gen_range(0..population.len())];
    if b.fitness > a.fitness {
        b
    } else {
        a
    }
}

fn crossover<R: Rng + ?Sized>(a: &[bool], b: &[bool], rng: &mut R) -> (Vec<bool>, Vec<bool>) {
    if a.len() < 2 {
        return (a.to_vec(), b.to_vec());
    }
    let cut = rng.gen_range(1..a.len());
    let mut x = a[..cut].to_vec();
    x.extend_from_slice(&b[cut..]);
    let mut y = b[..cut].to_vec();
    y.extend_from_slice(&a[cut..]);
    (x, y)
}

pub fn ga_run(
    instance: &PortfolioInstance,
    params: &GaParams,
    alpha: f64,
    mode: PenaltyMode,
) -> Result<GaOutcome> {
    params.validate()?;
    let objective = make_objective(instance, alpha, mode)?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut feasible = BestFeasible::new(instance);
    let n = instance.len();

    let evaluate = |genes: Vec<bool>, feasible: &mut BestFeasible| {
        let eval = objective.evaluate_selection(&Selection::new(genes));
        feasible.offer(&eval);
        let fitness = if eval.penalized_fitness.is_nan() {
            f64::NEG_INFINITY
        } else {
            eval.penalized_fitness
        };
        Individual {
            genes: eval.selection.chosen().to_vec(),
            fitness,
        }
    };

    let mut population: Vec<Individual> = (0..params.population_size)
        .map(|_| {
            let genes = (0..n).map(|_| rng.gen::<bool>()).collect();
            evaluate(genes, &mut feasible)
        })
        .collect();

    let fittest = |pop: &[Individual]| {
        pop.iter().enumerate().fold(0, |best, (i, ind)| {
            if ind.fitness > pop[best].fitness {
                i
            } else {
                best
            }
        })
    };
    let mut best = population[fittest(&population)].clone();
    let mut records = Vec::with_capacity(params.max_generations);

    for generation in 1..=params.max_generations {
        let mut next = Vec::with_capacity(params.population_size);
        next.push(best.clone());
        while next.len() < params.population_size {
            let mother = tournament(&population, &mut rng);
            let father = tournament(&population, &mut rng);
            let (mut x, mut y) = if rng.gen_bool(params.crossover_rate) {
                crossover(&mother.genes, &father.genes, &mut rng)
            } else {
                (mother.genes.clone(), father.genes.clone())
            };
            for child in [&mut x, &mut y] {
                if rng.gen_bool(params.mutation_fraction) {
                    for gene in child.iter_mut() {
                        if rng.gen_bool(params.per_gene_mutation_rate) {
                            *gene = !*gene;
                        }
                    }
                }
            }
            for child in [x, y] {
                if next.len() < params.population_size {
                    next.push(evaluate(child, &mut feasible));
                }
            }
        }
        // Keep the elite out of a fixed slot so tournaments see no ordering bias.
        next.shuffle(&mut rng);
        population = next;

        let lead = &population[fittest(&population)];
        if lead.fitness > best.fitness {
            best = lead.clone();
        }
        let mean = population.iter().map(|i| i.fitness).sum::<f64>() / population.len() as f64;
        records.push(IterationRecord {
            iteration: generation,
            best_fitness: best.fitness,
            mean_fitness: mean,
            population: population.len(),
        });
    }

    let trace = RunTrace {
        records,
        best_habitat: Selection::new(best.genes).to_habitat(),
        best_fitness: best.fitness,
        termination: Termination::MaxIterations,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(GaOutcome {
        trace,
        best_feasible: feasible.into_best(),
    })
}
