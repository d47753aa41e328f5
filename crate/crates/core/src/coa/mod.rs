//! Cuckoo Optimization Algorithm over a bounded continuous box.
//!
//! Each iteration runs the classic cycle:
//!
//! 1. every cuckoo lays its eggs inside its egg laying radius (ELR), which is
//!    proportional to its share of all eggs and to the variable range;
//! 2. the least profitable fraction of the new eggs is destroyed;
//! 3. surviving eggs grow into cuckoos and the population is cut back to the
//!    best `max_cuckoos_alive`;
//! 4. cuckoos are grouped with k-means; the group with the best mean fitness
//!    supplies the goal point, and every cuckoo migrates part of the way
//!    towards it with a random deflection;
//! 5. the run stops once most cuckoos sit on a single point.
//!
//! The objective is maximized. The engine is deterministic for a given
//! seed and holds no shared state, so independent runs can be spread
//! across threads freely.

mod kmeans;

use std::f64::consts::FRAC_PI_6;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{IterationRecord, RunTrace, Termination};

pub use kmeans::assign as kmeans_assign;

/// A point in the search box.
pub type Habitat = Vec<f64>;

/// Per-coordinate lower and upper limits of the search box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    low: Vec<f64>,
    high: Vec<f64>,
}

impl Bounds {
    pub fn new(low: Vec<f64>, high: Vec<f64>) -> Result<Self> {
        if low.is_empty() {
            return Err(Error::Config(
                "bounds must have at least one dimension".into(),
            ));
        }
        if low.len() != high.len() {
            return Err(Error::Config(format!(
                "bounds have {} lower and {} upper limits",
                low.len(),
                high.len()
            )));
        }
        for (i, (lo, hi)) in low.iter().zip(&high).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!(
                    "dimension {i} has malformed bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { low, high })
    }

    /// The same interval `[low, high]` in every one of `dim` dimensions.
    pub fn uniform(dim: usize, low: f64, high: f64) -> Result<Self> {
        Self::new(vec![low; dim], vec![high; dim])
    }

    /// The unit hypercube `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::uniform(dim, 0.0, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.low.len()
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    /// Length of the main diagonal of the box.
    pub fn diagonal(&self) -> f64 {
        self.low
            .iter()
            .zip(&self.high)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.low.iter().zip(&self.high))
                .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    pub fn clip(&self, point: &mut [f64]) {
        for (x, (lo, hi)) in point.iter_mut().zip(self.low.iter().zip(&self.high)) {
            *x = x.clamp(*lo, *hi);
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Habitat {
        self.low
            .iter()
            .zip(&self.high)
            .map(|(lo, hi)| rng.gen_range(*lo..=*hi))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoaParams {
    pub n_pop_initial: usize,
    pub min_eggs: usize,
    pub max_eggs: usize,
    pub max_iterations: usize,
    pub max_cuckoos_alive: usize,
    /// Scale `a` of the egg laying radius.
    pub elr_scale_a: f64,
    /// Fraction of newly laid eggs destroyed each iteration.
    pub cull_fraction_p: f64,
    pub kmeans_k: usize,
    /// Fraction of cuckoos that must gather around the best habitat to stop.
    pub convergence_fraction: f64,
    /// Gathering radius as a fraction of the box diagonal.
    pub convergence_radius_eps: f64,
    /// Apply the random deflection during migration. When false the move is
    /// a plain random fraction of the way to the goal.
    pub deflection: bool,
    pub seed: u64,
}

impl Default for CoaParams {
    fn default() -> Self {
        Self {
            n_pop_initial: 10,
            min_eggs: 2,
            max_eggs: 4,
            max_iterations: 200,
            max_cuckoos_alive: 10,
            elr_scale_a: 2.0,
            cull_fraction_p: 0.10,
            kmeans_k: 3,
            convergence_fraction: 0.95,
            convergence_radius_eps: 1e-9,
            deflection: true,
            seed: 0,
        }
    }
}

impl CoaParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_pop_initial < 2 {
            return fail(format!(
                "n_pop_initial must be at least 2, got {}",
                self.n_pop_initial
            ));
        }
        if self.min_eggs < 1 || self.min_eggs > self.max_eggs {
            return fail(format!(
                "egg range {}..={} must satisfy 1 <= min_eggs <= max_eggs",
                self.min_eggs, self.max_eggs
            ));
        }
        if self.max_cuckoos_alive < 1 {
            return fail("max_cuckoos_alive must be at least 1".into());
        }
        if !(self.elr_scale_a.is_finite() && self.elr_scale_a > 0.0) {
            return fail(format!(
                "elr_scale_a must be positive, got {}",
                self.elr_scale_a
            ));
        }
        if !(0.0..1.0).contains(&self.cull_fraction_p) {
            return fail(format!(
                "cull_fraction_p must lie in [0, 1), got {}",
                self.cull_fraction_p
            ));
        }
        if self.kmeans_k < 1 {
            return fail("kmeans_k must be at least 1".into());
        }
        if !(self.convergence_fraction > 0.0 && self.convergence_fraction <= 1.0) {
            return fail(format!(
                "convergence_fraction must lie in (0, 1], got {}",
                self.convergence_fraction
            ));
        }
        if !(self.convergence_radius_eps.is_finite() && self.convergence_radius_eps > 0.0) {
            return fail(format!(
                "convergence_radius_eps must be positive, got {}",
                self.convergence_radius_eps
            ));
        }
        Ok(())
    }
}

/// A cuckoo: where it lives, how many eggs it carries and how good the spot is.
#[derive(Debug, Clone, PartialEq)]
pub struct CuckooState {
    pub habitat: Habitat,
    pub num_eggs: usize,
    pub fitness: f64,
}

/// A laid egg together with the fitness of its nest.
#[derive(Debug, Clone, PartialEq)]
pub struct Egg {
    pub habitat: Habitat,
    pub fitness: f64,
}

// NaN would poison every ordering below.
fn sanitize(fitness: f64) -> f64 {
    if fitness.is_nan() {
        f64::NEG_INFINITY
    } else {
        fitness
    }
}

/// Samples `n_pop_initial` cuckoos uniformly in the box, each carrying a
/// uniform number of eggs in `min_eggs..=max_eggs`.
pub fn initialize_population<F, R>(
    params: &CoaParams,
    bounds: &Bounds,
    objective: &mut F,
    rng: &mut R,
) -> Result<Vec<CuckooState>>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    params.validate()?;
    Ok((0..params.n_pop_initial)
        .map(|_| {
            let habitat = bounds.sample(rng);
            let num_eggs = rng.gen_range(params.min_eggs..=params.max_eggs);
            let fitness = sanitize(objective(&habitat));
            CuckooState {
                habitat,
                num_eggs,
                fitness,
            }
        })
        .collect())
}

/// Egg laying radius: `a * own_eggs / total_eggs * (var_high - var_low)`.
pub fn compute_elr(
    own_eggs: usize,
    total_eggs: usize,
    var_low: f64,
    var_high: f64,
    a: f64,
) -> Result<f64> {
    if total_eggs == 0 {
        return Err(Error::InvalidState("total egg count is zero".into()));
    }
    if own_eggs == 0 || own_eggs > total_eggs {
        return Err(Error::InvalidArgument(format!(
            "own egg count {own_eggs} must lie in 1..={total_eggs}"
        )));
    }
    if var_high.is_nan() || var_low.is_nan() || var_high <= var_low {
        return Err(Error::InvalidArgument(format!(
            "variable range [{var_low}, {var_high}] is empty"
        )));
    }
    if a.is_nan() || a <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "ELR scale must be positive, got {a}"
        )));
    }
    Ok(a * (own_eggs as f64 / total_eggs as f64) * (var_high - var_low))
}

/// Lays `cuckoo.num_eggs` eggs, each coordinate displaced uniformly within
/// `[-elr[i], elr[i]]` and clipped back into the box.
pub fn lay_eggs<R: Rng + ?Sized>(
    cuckoo: &CuckooState,
    elr: &[f64],
    bounds: &Bounds,
    rng: &mut R,
) -> Vec<Habitat> {
    debug_assert_eq!(elr.len(), cuckoo.habitat.len());
    (0..cuckoo.num_eggs)
        .map(|_| {
            let mut egg: Habitat = cuckoo
                .habitat
                .iter()
                .zip(elr)
                .map(|(x, r)| x + rng.gen_range(-1.0..=1.0) * r)
                .collect();
            bounds.clip(&mut egg);
            egg
        })
        .collect()
}

/// Destroys the `floor(p * len)` least profitable eggs. Among equal fitness
/// the later egg goes first. Survivors keep their order.
pub fn cull_worst_eggs(eggs: Vec<Egg>, p: f64) -> Vec<Egg> {
    // The small offset keeps e.g. 0.29 * 100 from flooring to 28.
    let kill = ((p * eggs.len() as f64) + 1e-9).floor() as usize;
    if kill == 0 {
        return eggs;
    }
    let mut order: Vec<usize> = (0..eggs.len()).collect();
    order.sort_by(|&a, &b| {
        eggs[a]
            .fitness
            .total_cmp(&eggs[b].fitness)
            .then_with(|| b.cmp(&a))
    });
    let mut doomed = vec![false; eggs.len()];
    for &i in order.iter().take(kill) {
        doomed[i] = true;
    }
    eggs.into_iter()
        .zip(doomed)
        .filter_map(|(egg, dead)| (!dead).then_some(egg))
        .collect()
}

fn first_max_by_fitness<'a, I>(items: I) -> Option<usize>
where
    I: IntoIterator<Item = &'a CuckooState>,
{
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in items.into_iter().enumerate() {
        if best.is_none_or(|(_, f)| c.fitness > f) {
            best = Some((i, c.fitness));
        }
    }
    best.map(|(i, _)| i)
}

/// Groups the population with k-means and returns the best habitat of the
/// group with the highest mean fitness.
pub fn cluster_and_select_goal<R: Rng + ?Sized>(
    population: &[CuckooState],
    k: usize,
    rng: &mut R,
) -> Result<Habitat> {
    if population.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot cluster an empty population".into(),
        ));
    }
    let points: Vec<&[f64]> = population.iter().map(|c| c.habitat.as_slice()).collect();
    let labels = kmeans::assign(&points, k, rng);
    let groups = labels.iter().copied().max().unwrap_or(0) + 1;

    let mut sums = vec![0.0; groups];
    let mut counts = vec![0usize; groups];
    for (&label, c) in labels.iter().zip(population) {
        sums[label] += c.fitness;
        counts[label] += 1;
    }
    let mut best_group = None;
    let mut best_mean = f64::NEG_INFINITY;
    for g in 0..groups {
        if counts[g] == 0 {
            continue;
        }
        let mean = sums[g] / counts[g] as f64;
        if best_group.is_none() || mean > best_mean {
            best_group = Some(g);
            best_mean = mean;
        }
    }
    let best_group = best_group.expect("non-empty population has a non-empty group");

    let members = population
        .iter()
        .zip(&labels)
        .filter(|(_, &l)| l == best_group)
        .map(|(c, _)| c);
    let idx = first_max_by_fitness(members.clone()).expect("group is non-empty");
    Ok(members
        .clone()
        .nth(idx)
        .expect("index within group")
        .habitat
        .clone())
}

/// Moves `current` a fraction `lambda` of the way to `goal`, adds a deflection
/// of `|delta_i| * |tan(phi)|` with a random sign per coordinate, then clips
/// to the box.
pub fn migrate_with<R: Rng + ?Sized>(
    current: &[f64],
    goal: &[f64],
    bounds: &Bounds,
    lambda: f64,
    phi: f64,
    rng: &mut R,
) -> Result<Habitat> {
    if current.len() != goal.len() {
        return Err(Error::InvalidArgument(format!(
            "habitat length {} does not match goal length {}",
            current.len(),
            goal.len()
        )));
    }
    let jitter = phi.tan().abs();
    let mut next: Habitat = current
        .iter()
        .zip(goal)
        .map(|(x, g)| {
            let delta = g - x;
            let mut moved = x + lambda * delta;
            if jitter > 0.0 {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                moved += sign * delta.abs() * jitter;
            }
            moved
        })
        .collect();
    bounds.clip(&mut next);
    Ok(next)
}

/// Migration with `lambda ~ U[0, 1]` and, when `deflection` is on,
/// `phi ~ U[-pi/6, pi/6]`.
pub fn migrate<R: Rng + ?Sized>(
    current: &[f64],
    goal: &[f64],
    bounds: &Bounds,
    deflection: bool,
    rng: &mut R,
) -> Result<Habitat> {
    let lambda = rng.gen_range(0.0..=1.0);
    let phi = if deflection {
        rng.gen_range(-FRAC_PI_6..=FRAC_PI_6)
    } else {
        0.0
    };
    migrate_with(current, goal, bounds, lambda, phi, rng)
}

/// True when at least `fraction` of the population lies within
/// `eps * diagonal` of the population's best habitat.
pub fn check_convergence(
    population: &[CuckooState],
    fraction: f64,
    eps: f64,
    diagonal: f64,
) -> bool {
    let Some(best) = first_max_by_fitness(population) else {
        return false;
    };
    let center = &population[best].habitat;
    let radius = eps * diagonal;
    let radius_sq = radius * radius;
    let near = population
        .iter()
        .filter(|c| kmeans::squared_distance(&c.habitat, center) <= radius_sq)
        .count();
    near as f64 / population.len() as f64 >= fraction
}

/// Runs the algorithm to convergence or `max_iterations`, maximizing
/// `objective` over `bounds`.
///
/// The returned best habitat and fitness are the best ever evaluated,
/// not merely the best alive at the end.
pub fn run<F>(mut objective: F, params: &CoaParams, bounds: &Bounds) -> Result<RunTrace>
where
    F: FnMut(&[f64]) -> f64,
{
    params.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut eval = |h: &[f64]| sanitize(objective(h));

    let mut population = initialize_population(params, bounds, &mut eval, &mut rng)?;
    let lead = first_max_by_fitness(&population).expect("population is non-empty");
    let mut best = population[lead].clone();

    let diagonal = bounds.diagonal();
    let mut records = Vec::with_capacity(params.max_iterations);
    let mut termination = Termination::MaxIterations;

    for iteration in 1..=params.max_iterations {
        let total_eggs: usize = population.iter().map(|c| c.num_eggs).sum();
        let mut eggs = Vec::with_capacity(total_eggs);
        for cuckoo in &population {
            let elr = bounds
                .low()
                .iter()
                .zip(bounds.high())
                .map(|(lo, hi)| {
                    compute_elr(cuckoo.num_eggs, total_eggs, *lo, *hi, params.elr_scale_a)
                })
                .collect::<Result<Vec<_>>>()?;
            for habitat in lay_eggs(cuckoo, &elr, bounds, &mut rng) {
                let fitness = eval(&habitat);
                eggs.push(Egg { habitat, fitness });
            }
        }

        let survivors = cull_worst_eggs(eggs, params.cull_fraction_p);
        let mut grown: Vec<CuckooState> = survivors
            .into_iter()
            .map(|egg| CuckooState {
                habitat: egg.habitat,
                num_eggs: rng.gen_range(params.min_eggs..=params.max_eggs),
                fitness: egg.fitness,
            })
            .collect();
        // Young cuckoos go first so they win fitness ties against their parents.
        grown.append(&mut population);
        population = grown;
        population.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
        population.truncate(params.max_cuckoos_alive);
        if population[0].fitness > best.fitness {
            best = population[0].clone();
        }

        let goal = cluster_and_select_goal(&population, params.kmeans_k, &mut rng)?;
        for cuckoo in population.iter_mut() {
            let next = migrate(&cuckoo.habitat, &goal, bounds, params.deflection, &mut rng)?;
            if next != cuckoo.habitat {
                cuckoo.fitness = eval(&next);
                cuckoo.habitat = next;
            }
        }

        let lead = first_max_by_fitness(&population).expect("population is non-empty");
        if population[lead].fitness > best.fitness {
            best = population[lead].clone();
        } else if population[lead].fitness < best.fitness {
            // The best habitat ever found replaces the weakest cuckoo.
            let worst = population
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.fitness.total_cmp(&b.fitness))
                .map(|(i, _)| i)
                .expect("population is non-empty");
            population[worst] = best.clone();
        }

        let mean = population.iter().map(|c| c.fitness).sum::<f64>() / population.len() as f64;
        records.push(IterationRecord {
            iteration,
            best_fitness: best.fitness,
            mean_fitness: mean,
            population: population.len(),
        });

        if check_convergence(
            &population,
            params.convergence_fraction,
            params.convergence_radius_eps,
            diagonal,
        ) {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(RunTrace {
        records,
        best_habitat: best.habitat,
        best_fitness: best.fitness,
        termination,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn state(habitat: Vec<f64>, fitness: f64) -> CuckooState {
        CuckooState {
            habitat,
            num_eggs: 2,
            fitness,
        }
    }

    fn egg(fitness: f64) -> Egg {
        Egg {
            habitat: vec![fitness],
            fitness,
        }
    }

    #[test]
    fn bounds_reject_malformed_limits() {
        assert!(Bounds::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(Bounds::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
        assert!(Bounds::new(vec![f64::NAN], vec![1.0]).is_err());
        assert!((Bounds::unit(4).unwrap().diagonal() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn initial_population_matches_parameters() {
        let params = CoaParams::default();
        let bounds = Bounds::unit(81).unwrap();
        let mut objective = |h: &[f64]| h.iter().sum::<f64>();
        let pop = initialize_population(&params, &bounds, &mut objective, &mut rng(1)).unwrap();
        assert_eq!(pop.len(), 10);
        for c in &pop {
            assert!(bounds.contains(&c.habitat));
            assert!((2..=4).contains(&c.num_eggs));
            assert_eq!(c.fitness, c.habitat.iter().sum::<f64>());
        }
    }

    #[test]
    fn initial_population_rejects_single_cuckoo() {
        let params = CoaParams {
            n_pop_initial: 1,
            ..CoaParams::default()
        };
        let bounds = Bounds::unit(3).unwrap();
        let err = initialize_population(&params, &bounds, &mut |_: &[f64]| 0.0, &mut rng(0));
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn initial_population_is_seed_deterministic() {
        let params = CoaParams::default();
        let bounds = Bounds::unit(5).unwrap();
        let mut f = |h: &[f64]| h[0];
        let a = initialize_population(&params, &bounds, &mut f, &mut rng(42)).unwrap();
        let b = initialize_population(&params, &bounds, &mut f, &mut rng(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn elr_formula_values() {
        assert_eq!(compute_elr(2, 10, 0.0, 1.0, 1.0).unwrap(), 0.2);
        assert_eq!(compute_elr(4, 4, 0.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(compute_elr(3, 30, -5.0, 5.0, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn elr_errors() {
        assert!(matches!(
            compute_elr(0, 0, 0.0, 1.0, 1.0),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            compute_elr(5, 4, 0.0, 1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(compute_elr(1, 4, 1.0, 1.0, 1.0).is_err());
        assert!(compute_elr(1, 4, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn eggs_from_center_stay_inside() {
        let bounds = Bounds::unit(6).unwrap();
        let parent = CuckooState {
            habitat: vec![0.5; 6],
            num_eggs: 4,
            fitness: 0.0,
        };
        let eggs = lay_eggs(&parent, &[3.0; 6], &bounds, &mut rng(9));
        assert_eq!(eggs.len(), 4);
        assert!(eggs.iter().all(|e| bounds.contains(e)));
    }

    #[test]
    fn zero_radius_eggs_coincide_with_parent() {
        let bounds = Bounds::unit(3).unwrap();
        let parent = CuckooState {
            habitat: vec![0.1, 0.7, 0.3],
            num_eggs: 3,
            fitness: 0.0,
        };
        for e in lay_eggs(&parent, &[0.0; 3], &bounds, &mut rng(2)) {
            assert_eq!(e, parent.habitat);
        }
    }

    #[test]
    fn eggs_from_corner_are_clipped_at_lower_bound() {
        let bounds = Bounds::unit(5).unwrap();
        let parent = CuckooState {
            habitat: vec![0.0; 5],
            num_eggs: 4,
            fitness: 0.0,
        };
        for e in lay_eggs(&parent, &[0.2; 5], &bounds, &mut rng(5)) {
            assert!(e.iter().all(|x| (0.0..=0.2).contains(x)));
        }
    }

    #[test]
    fn cull_removes_worst_tenth() {
        let eggs: Vec<Egg> = [5.0, 3.0, 9.0, 1.0, 7.0, 2.0, 8.0, 4.0, 6.0, 10.0]
            .into_iter()
            .map(egg)
            .collect();
        let kept = cull_worst_eggs(eggs, 0.10);
        assert_eq!(kept.len(), 9);
        assert!(kept.iter().all(|e| e.fitness != 1.0));
        assert_eq!(kept[0].fitness, 5.0);
    }

    #[test]
    fn cull_floor_and_identity() {
        let five: Vec<Egg> = (0..5).map(|i| egg(i as f64)).collect();
        assert_eq!(cull_worst_eggs(five.clone(), 0.10), five);
        assert_eq!(cull_worst_eggs(five.clone(), 0.0), five);
    }

    #[test]
    fn cull_ties_keep_earlier_egg() {
        let eggs = vec![
            Egg {
                habitat: vec![0.0],
                fitness: 1.0,
            },
            Egg {
                habitat: vec![1.0],
                fitness: 1.0,
            },
            Egg {
                habitat: vec![2.0],
                fitness: 5.0,
            },
            Egg {
                habitat: vec![3.0],
                fitness: 5.0,
            },
        ];
        let kept = cull_worst_eggs(eggs, 0.25);
        let tags: Vec<f64> = kept.iter().map(|e| e.habitat[0]).collect();
        assert_eq!(tags, vec![0.0, 2.0, 3.0]);
    }

    #[test]
    fn goal_of_singleton_is_itself() {
        let pop = vec![state(vec![0.3, 0.4], 1.0)];
        assert_eq!(
            cluster_and_select_goal(&pop, 3, &mut rng(0)).unwrap(),
            vec![0.3, 0.4]
        );
    }

    #[test]
    fn goal_comes_from_the_fitter_cluster() {
        let pop = vec![
            state(vec![0.0, 0.0], 1.0),
            state(vec![0.01, 0.0], 2.0),
            state(vec![0.0, 0.01], 1.5),
            state(vec![0.9, 0.9], 10.0),
            state(vec![0.91, 0.9], 12.0),
            state(vec![0.9, 0.91], 11.0),
        ];
        for seed in 0..20 {
            let goal = cluster_and_select_goal(&pop, 2, &mut rng(seed)).unwrap();
            assert_eq!(goal, vec![0.91, 0.9]);
        }
    }

    #[test]
    fn identical_habitats_give_common_goal() {
        let pop: Vec<_> = (0..6).map(|i| state(vec![0.25, 0.75], i as f64)).collect();
        for k in 1..=5 {
            assert_eq!(
                cluster_and_select_goal(&pop, k, &mut rng(k as u64)).unwrap(),
                vec![0.25, 0.75]
            );
        }
    }

    #[test]
    fn empty_population_cannot_be_clustered() {
        assert!(cluster_and_select_goal(&[], 3, &mut rng(0)).is_err());
    }

    #[test]
    fn migration_with_fixed_draws() {
        let b = Bounds::unit(1).unwrap();
        let half = migrate_with(&[0.2], &[0.8], &b, 0.5, 0.0, &mut rng(0)).unwrap();
        assert!((half[0] - 0.5).abs() < 1e-15);
        let full = migrate_with(&[0.2], &[0.8], &b, 1.0, 0.0, &mut rng(0)).unwrap();
        assert_eq!(full, vec![0.8]);
    }

    #[test]
    fn migration_to_self_is_identity() {
        let b = Bounds::unit(3).unwrap();
        let x = vec![0.1, 0.5, 0.9];
        for seed in 0..10 {
            assert_eq!(migrate(&x, &x, &b, true, &mut rng(seed)).unwrap(), x);
        }
    }

    #[test]
    fn migration_rejects_length_mismatch() {
        let b = Bounds::unit(2).unwrap();
        let err = migrate(&[0.1, 0.2], &[0.3], &b, true, &mut rng(0));
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn convergence_counting() {
        let diag = 1.0;
        let same: Vec<_> = (0..5).map(|_| state(vec![0.5], 1.0)).collect();
        assert!(check_convergence(&same, 1.0, 1e-3, diag));

        let mut ten: Vec<_> = (0..9).map(|_| state(vec![0.5], 1.0)).collect();
        ten.push(state(vec![0.0], 0.0));
        assert!(!check_convergence(&ten, 0.95, 1e-3, diag));

        let mut twenty: Vec<_> = (0..19).map(|_| state(vec![0.5], 1.0)).collect();
        twenty.push(state(vec![0.0], 0.0));
        assert!(check_convergence(&twenty, 0.95, 1e-3, diag));
    }

    #[test]
    fn zero_iterations_reports_initial_best() {
        let params = CoaParams {
            max_iterations: 0,
            ..CoaParams::default().with_seed(3)
        };
        let bounds = Bounds::unit(4).unwrap();
        let trace = run(|h: &[f64]| h.iter().sum(), &params, &bounds).unwrap();
        assert!(trace.records.is_empty());
        assert_eq!(trace.termination, Termination::MaxIterations);

        let mut f = |h: &[f64]| h.iter().sum::<f64>();
        let init = initialize_population(&params, &bounds, &mut f, &mut rng(3)).unwrap();
        let expected = init
            .iter()
            .map(|c| c.fitness)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(trace.best_fitness, expected);
    }

    #[test]
    fn nan_objective_does_not_poison_the_run() {
        let params = CoaParams::default().with_seed(1);
        let bounds = Bounds::unit(2).unwrap();
        let trace = run(
            |h: &[f64]| if h[0] > 0.5 { f64::NAN } else { h[0] },
            &params,
            &bounds,
        )
        .unwrap();
        assert!(trace.best_fitness <= 0.5);
        assert!(trace.best_fitness.is_finite());
    }
}
