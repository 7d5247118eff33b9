//! Binary phase-mask optimization: the coherent-sum fitness, an exhaustive
//! small-instance oracle, and a seeded genetic algorithm with tournament
//! selection, single-point crossover, adaptive mutation, and elitism.
//!
//! All randomness is drawn sequentially from one seeded stream; fitness
//! evaluations within a generation are pure and may run concurrently, so
//! results do not depend on the worker count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::{Error, Result, Scenario, StateMask, StateSet};
use crate::synthesis::{ideal_continuous_mask, initial_phase_field, quantize_mask};

/// Genetic-algorithm hyperparameters.
///
/// `population_size` and `base_mutation_rate` default to values derived
/// from the chromosome length L: max(50, 2L) and 1/L respectively.
#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: Option<usize>,
    pub tournament_size: usize,
    pub crossover_probability: f64,
    pub base_mutation_rate: Option<f64>,
    pub mutation_boost_factor: f64,
    pub stagnation_boost_after: usize,
    pub elite_count: usize,
    pub max_generations: usize,
    pub stagnation_stop_after: usize,
    pub improvement_epsilon: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: None,
            tournament_size: 3,
            crossover_probability: 0.9,
            base_mutation_rate: None,
            mutation_boost_factor: 2.0,
            stagnation_boost_after: 20,
            elite_count: 2,
            max_generations: 2000,
            stagnation_stop_after: 100,
            improvement_epsilon: 1e-9,
            seed: 0,
        }
    }
}

impl GaConfig {
    /// Same defaults with a different seed.
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn resolve(&self, chromosome_len: usize) -> Result<ResolvedGa> {
        let population_size = self.population_size.unwrap_or_else(|| 50.max(2 * chromosome_len));
        if population_size < 2 {
            return Err(Error::Validation {
                field: "population_size",
                message: format!("must be >= 2, got {population_size}"),
            });
        }
        if self.elite_count >= population_size {
            return Err(Error::Validation {
                field: "elite_count",
                message: format!(
                    "must be < population_size ({population_size}), got {}",
                    self.elite_count
                ),
            });
        }
        if self.tournament_size < 2 {
            return Err(Error::Validation {
                field: "tournament_size",
                message: format!("must be >= 2, got {}", self.tournament_size),
            });
        }
        if !(0.0..=1.0).contains(&self.crossover_probability) {
            return Err(Error::Validation {
                field: "crossover_probability",
                message: format!("must be within [0, 1], got {}", self.crossover_probability),
            });
        }
        let base_mutation_rate =
            self.base_mutation_rate.unwrap_or(1.0 / chromosome_len as f64);
        if !(0.0..=1.0).contains(&base_mutation_rate) {
            return Err(Error::Validation {
                field: "base_mutation_rate",
                message: format!("must be within [0, 1], got {base_mutation_rate}"),
            });
        }
        if self.mutation_boost_factor < 1.0 || !self.mutation_boost_factor.is_finite() {
            return Err(Error::Validation {
                field: "mutation_boost_factor",
                message: format!("must be >= 1, got {}", self.mutation_boost_factor),
            });
        }
        if self.stagnation_boost_after == 0 || self.stagnation_stop_after == 0 {
            return Err(Error::Validation {
                field: "stagnation_boost_after",
                message: "stagnation windows must be >= 1".into(),
            });
        }
        if self.improvement_epsilon.is_nan() || self.improvement_epsilon < 0.0 {
            return Err(Error::Validation {
                field: "improvement_epsilon",
                message: format!("must be >= 0, got {}", self.improvement_epsilon),
            });
        }
        Ok(ResolvedGa {
            population_size,
            base_mutation_rate,
            mutation_cap: (10.0 / chromosome_len as f64).min(1.0),
        })
    }
}

struct ResolvedGa {
    population_size: usize,
    base_mutation_rate: f64,
    mutation_cap: f64,
}

/// Outcome of one GA run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best_mask: StateMask,
    pub best_fitness: f64,
    /// Fitness of the nearest-state quantized seed mask.
    pub baseline_fitness: f64,
    pub generations_run: usize,
    /// Best-ever fitness after the initial population and after each
    /// generation; non-decreasing.
    pub fitness_history: Vec<f64>,
    pub seed: u64,
}

/// Per-cell complex terms c_k·e^{jα*}: the fitness of a mask is the norm of
/// the sum of its selected terms.
fn cell_terms(scenario: &Scenario, states: &StateSet) -> Vec<Vec<Complex64>> {
    let alpha_star = initial_phase_field(scenario.geometry, scenario.incident, scenario.target);
    alpha_star
        .values()
        .iter()
        .map(|&a| {
            let rot = Complex64::from_polar(1.0, a);
            states.coefficients().iter().map(|c| c * rot).collect()
        })
        .collect()
}

fn fitness_of(terms: &[Vec<Complex64>], indices: &[usize]) -> f64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (t, &k) in terms.iter().zip(indices) {
        sum += t[k];
    }
    sum.norm()
}

/// |Σ c_Φ·e^{j(α* + arg c_Φ)}| for the scenario's target design.
pub fn fitness(mask: &StateMask, scenario: &Scenario, states: &StateSet) -> Result<f64> {
    if *mask.geometry() != scenario.geometry {
        return Err(Error::GeometryMismatch("mask geometry differs from the scenario".into()));
    }
    let terms = cell_terms(scenario, states);
    Ok(fitness_of(&terms, mask.states()))
}

/// Upper bound on the instance size accepted by [`exhaustive_optimize`].
pub const EXHAUSTIVE_LIMIT_LOG2: f64 = 24.0;

/// Globally optimal mask by full enumeration, for small instances.
/// Ties resolve toward the lexicographically smallest state-index sequence.
pub fn exhaustive_optimize(scenario: &Scenario, states: &StateSet) -> Result<(StateMask, f64)> {
    let cells = scenario.geometry.cells();
    let instance_log2 = cells as f64 * (states.len() as f64).log2();
    if instance_log2 > EXHAUSTIVE_LIMIT_LOG2 {
        return Err(Error::TooLarge(format!(
            "{} states over {cells} cells is ~2^{instance_log2:.1} configurations; \
             use the genetic optimizer instead",
            states.len()
        )));
    }
    let terms = cell_terms(scenario, states);
    let mut indices = vec![0usize; cells];
    // Incremental sum over the odometer enumeration; the drift over at most
    // 2^24 updates stays far below the tie tolerances used by callers.
    let mut sum: Complex64 = terms.iter().map(|t| t[0]).sum();
    let mut best_indices = indices.clone();
    let mut best_fitness = sum.norm();
    loop {
        // Advance the odometer (last cell fastest keeps lexicographic order).
        let mut pos = cells;
        loop {
            if pos == 0 {
                let mask = StateMask::new(scenario.geometry, best_indices, states)
                    .expect("indices valid by construction");
                return Ok((mask, best_fitness));
            }
            pos -= 1;
            if indices[pos] + 1 < states.len() {
                sum += terms[pos][indices[pos] + 1] - terms[pos][indices[pos]];
                indices[pos] += 1;
                break;
            }
            sum += terms[pos][0] - terms[pos][indices[pos]];
            indices[pos] = 0;
        }
        let f = sum.norm();
        if f > best_fitness {
            best_fitness = f;
            best_indices.copy_from_slice(&indices);
        }
    }
}

fn tournament(rng: &mut ChaCha8Rng, fitness: &[f64], size: usize) -> usize {
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..size {
        let candidate = rng.gen_range(0..fitness.len());
        if fitness[candidate] > fitness[best] {
            best = candidate;
        }
    }
    best
}

/// Maximizes the coherent-sum fitness over binary masks with a seeded,
/// generation-synchronous GA.
///
/// The initial population contains the nearest-state quantized mask and its
/// bitwise complement, so the result never falls below the quantized
/// baseline. Only two-state sets are supported.
pub fn ga_optimize(scenario: &Scenario, states: &StateSet, config: &GaConfig) -> Result<GaResult> {
    if states.len() != 2 {
        return Err(Error::Unsupported(format!(
            "the genetic optimizer works on binary chromosomes; got a {}-state set",
            states.len()
        )));
    }
    let cells = scenario.geometry.cells();
    let resolved = config.resolve(cells)?;
    let terms = cell_terms(scenario, states);

    let baseline = quantize_mask(&ideal_continuous_mask(scenario), states);
    let baseline_bits: Vec<usize> = baseline.states().to_vec();
    let baseline_fitness = fitness_of(&terms, &baseline_bits);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population: Vec<Vec<usize>> = Vec::with_capacity(resolved.population_size);
    population.push(baseline_bits.clone());
    population.push(baseline_bits.iter().map(|&b| 1 - b).collect());
    while population.len() < resolved.population_size {
        population.push((0..cells).map(|_| usize::from(rng.gen::<bool>())).collect());
    }
    population.truncate(resolved.population_size);

    let eval = |pop: &[Vec<usize>]| -> Vec<f64> {
        pop.par_iter().map(|bits| fitness_of(&terms, bits)).collect()
    };
    let mut scores = eval(&population);

    let mut best_idx = 0;
    for (i, &f) in scores.iter().enumerate() {
        if f > scores[best_idx] {
            best_idx = i;
        }
    }
    let mut best_bits = population[best_idx].clone();
    let mut best_fitness = scores[best_idx];
    let mut fitness_history = vec![best_fitness];

    let mut mutation_rate = resolved.base_mutation_rate;
    let mut stagnant = 0usize;
    let mut generations_run = 0usize;

    for _ in 0..config.max_generations {
        generations_run += 1;

        // Rank by fitness, stable on index, for elitism.
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap().then(i.cmp(&j)));

        let mut next: Vec<Vec<usize>> =
            order.iter().take(config.elite_count).map(|&i| population[i].clone()).collect();

        while next.len() < resolved.population_size {
            let p1 = population[tournament(&mut rng, &scores, config.tournament_size)].clone();
            let p2 = population[tournament(&mut rng, &scores, config.tournament_size)].clone();
            let (mut c1, mut c2) =
                if cells >= 2 && rng.gen::<f64>() < config.crossover_probability {
                    let point = rng.gen_range(1..cells);
                    let mut a = p1.clone();
                    let mut b = p2.clone();
                    a[point..].copy_from_slice(&p2[point..]);
                    b[point..].copy_from_slice(&p1[point..]);
                    (a, b)
                } else {
                    (p1, p2)
                };
            for child in [&mut c1, &mut c2] {
                for gene in child.iter_mut() {
                    if rng.gen::<f64>() < mutation_rate {
                        *gene = 1 - *gene;
                    }
                }
            }
            next.push(c1);
            if next.len() < resolved.population_size {
                next.push(c2);
            }
        }

        population = next;
        scores = eval(&population);

        let mut gen_best = 0;
        for (i, &f) in scores.iter().enumerate() {
            if f > scores[gen_best] {
                gen_best = i;
            }
        }
        let improved = scores[gen_best] > best_fitness + config.improvement_epsilon;
        if scores[gen_best] > best_fitness {
            best_fitness = scores[gen_best];
            best_bits = population[gen_best].clone();
        }
        if improved {
            stagnant = 0;
            mutation_rate = resolved.base_mutation_rate;
        } else {
            stagnant += 1;
            if stagnant.is_multiple_of(config.stagnation_boost_after) {
                mutation_rate =
                    (mutation_rate * config.mutation_boost_factor).min(resolved.mutation_cap);
            }
        }
        fitness_history.push(best_fitness);

        if stagnant >= config.stagnation_stop_after {
            break;
        }
    }

    let best_mask = StateMask::new(scenario.geometry, best_bits, states)
        .expect("indices valid by construction");
    Ok(GaResult {
        best_mask,
        best_fitness,
        baseline_fitness,
        generations_run,
        fitness_history,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Direction, RisGeometry};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const C: f64 = 299_792_458.0;

    fn half_wave_geometry(qx: usize, qy: usize) -> RisGeometry {
        let lam = C / 28e9;
        RisGeometry::new(qx, qy, lam / 2.0, lam / 2.0, lam).unwrap()
    }

    fn deg(theta: f64, phi: f64) -> Direction {
        Direction::from_degrees(theta, phi).unwrap()
    }

    /// 2x1 half-wave array steered to 90 deg: alpha* = {0, pi}.
    fn destructive_pair() -> Scenario {
        Scenario::new(half_wave_geometry(2, 1), deg(0.0, 0.0), deg(90.0, 0.0))
    }

    #[test]
    fn fitness_aligned_phasors() {
        let scenario =
            Scenario::new(half_wave_geometry(3, 3), deg(0.0, 0.0), deg(0.0, 0.0));
        let set = crate::synthesis::two_state_set(0.0, PI, None).unwrap();
        let mask = StateMask::new(scenario.geometry, vec![0; 9], &set).unwrap();
        assert_relative_eq!(fitness(&mask, &scenario, &set).unwrap(), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn fitness_flip_cancels_pi_offset() {
        let scenario = destructive_pair();
        let set = crate::synthesis::two_state_set(0.0, PI, None).unwrap();
        let mask = StateMask::new(scenario.geometry, vec![0, 1], &set).unwrap();
        assert_relative_eq!(fitness(&mask, &scenario, &set).unwrap(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn fitness_best_quarter_turn_pair_is_sqrt2() {
        let scenario = destructive_pair();
        let set = crate::synthesis::two_state_set(0.0, PI / 2.0, None).unwrap();
        let mut best = 0.0f64;
        let mut best_masks = Vec::new();
        for bits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let mask = StateMask::new(scenario.geometry, bits.to_vec(), &set).unwrap();
            let f = fitness(&mask, &scenario, &set).unwrap();
            if f > best + 1e-12 {
                best = f;
                best_masks = vec![bits];
            } else if (f - best).abs() <= 1e-12 {
                best_masks.push(bits);
            }
        }
        assert_relative_eq!(best, 2f64.sqrt(), epsilon = 1e-9);
        assert!(best_masks.contains(&[0, 1]) && best_masks.contains(&[1, 0]));
    }

    #[test]
    fn fitness_rejects_geometry_mismatch() {
        let scenario = destructive_pair();
        let set = crate::synthesis::two_state_set(0.0, PI, None).unwrap();
        let other = half_wave_geometry(3, 1);
        let mask = StateMask::new(other, vec![0, 0, 0], &set).unwrap();
        assert!(fitness(&mask, &scenario, &set).is_err());
    }

    #[test]
    fn exhaustive_single_cell_prefers_state_zero() {
        let scenario =
            Scenario::new(half_wave_geometry(1, 1), deg(0.0, 0.0), deg(30.0, 0.0));
        let set = crate::synthesis::two_state_set(0.0, PI, None).unwrap();
        let (mask, f) = exhaustive_optimize(&scenario, &set).unwrap();
        assert_eq!(mask.states(), &[0]);
        assert_relative_eq!(f, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exhaustive_quarter_turn_pair() {
        let scenario = destructive_pair();
        let set = crate::synthesis::two_state_set(0.0, PI / 2.0, None).unwrap();
        let (mask, f) = exhaustive_optimize(&scenario, &set).unwrap();
        assert_relative_eq!(f, 2f64.sqrt(), epsilon = 1e-9);
        // The two optima {0,1} and {1,0} tie in exact arithmetic; either
        // may win by a rounding ulp in the incremental sum.
        assert!(mask.states() == [0, 1] || mask.states() == [1, 0]);
    }

    // Regression constant frozen from enumeration of all 512 masks.
    #[test]
    fn exhaustive_3x3_psi110_regression() {
        let scenario =
            Scenario::new(half_wave_geometry(3, 3), deg(0.0, 0.0), deg(60.0, 0.0));
        let set = crate::synthesis::two_state_set(0.0, 110f64.to_radians(), None).unwrap();
        let (_, f) = exhaustive_optimize(&scenario, &set).unwrap();
        assert_relative_eq!(f, 7.087205290007281, epsilon = 1e-9);
    }

    #[test]
    fn exhaustive_rejects_large_instances() {
        let scenario =
            Scenario::new(half_wave_geometry(5, 5), deg(0.0, 0.0), deg(60.0, 0.0));
        let set = crate::synthesis::two_state_set(0.0, PI, None).unwrap();
        assert!(matches!(exhaustive_optimize(&scenario, &set), Err(Error::TooLarge(_))));
    }

    #[test]
    fn ga_matches_exhaustive_on_3x3() {
        let scenario =
            Scenario::new(half_wave_geometry(3, 3), deg(0.0, 0.0), deg(60.0, 0.0));
        for psi_deg in [180.0f64, 110.0, 50.0] {
            let set = crate::synthesis::two_state_set(0.0, psi_deg.to_radians(), None).unwrap();
            let (_, exact) = exhaustive_optimize(&scenario, &set).unwrap();
            let result = ga_optimize(&scenario, &set, &GaConfig::with_seed(1)).unwrap();
            assert!(
                (result.best_fitness - exact).abs() <= 1e-9,
                "psi {psi_deg}: ga {} vs exhaustive {exact}",
                result.best_fitness
            );
        }
    }

    #[test]
    fn ga_rejects_non_binary_sets() {
        let scenario =
            Scenario::new(half_wave_geometry(2, 2), deg(0.0, 0.0), deg(60.0, 0.0));
        let set = crate::synthesis::uniform_state_set(2).unwrap();
        assert!(matches!(
            ga_optimize(&scenario, &set, &GaConfig::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn ga_rejects_invalid_config() {
        let scenario =
            Scenario::new(half_wave_geometry(2, 2), deg(0.0, 0.0), deg(60.0, 0.0));
        let set = crate::synthesis::two_state_set(0.0, PI, None).unwrap();
        let bad = GaConfig { tournament_size: 1, ..GaConfig::default() };
        assert!(ga_optimize(&scenario, &set, &bad).is_err());
        let bad = GaConfig { elite_count: 99, population_size: Some(10), ..GaConfig::default() };
        assert!(ga_optimize(&scenario, &set, &bad).is_err());
        let bad = GaConfig { crossover_probability: 1.5, ..GaConfig::default() };
        assert!(ga_optimize(&scenario, &set, &bad).is_err());
    }

    #[test]
    fn ga_is_deterministic_for_a_seed() {
        let scenario =
            Scenario::new(half_wave_geometry(3, 3), deg(0.0, 0.0), deg(60.0, 0.0));
        let set = crate::synthesis::two_state_set(0.0, 110f64.to_radians(), None).unwrap();
        let config = GaConfig::with_seed(42);
        let a = ga_optimize(&scenario, &set, &config).unwrap();
        let b = ga_optimize(&scenario, &set, &config).unwrap();
        assert_eq!(a, b);

        // Worker count must not influence the result.
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| ga_optimize(&scenario, &set, &config).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn ga_history_is_monotone_and_dominates_baseline() {
        let scenario =
            Scenario::new(half_wave_geometry(4, 3), deg(0.0, 0.0), deg(45.0, 0.0));
        let set = crate::synthesis::two_state_set(0.0, 130f64.to_radians(), None).unwrap();
        let result = ga_optimize(&scenario, &set, &GaConfig::with_seed(5)).unwrap();
        assert!(result.best_fitness >= result.baseline_fitness);
        assert!(result.fitness_history.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(result.fitness_history.len(), result.generations_run + 1);
    }

    #[test]
    fn complement_has_equal_fitness_at_psi_pi() {
        let scenario =
            Scenario::new(half_wave_geometry(3, 3), deg(0.0, 0.0), deg(60.0, 0.0));
        let set = crate::synthesis::two_state_set(0.0, PI, None).unwrap();
        let mask = quantize_mask(&ideal_continuous_mask(&scenario), &set);
        let f = fitness(&mask, &scenario, &set).unwrap();
        let fc = fitness(&mask.complement().unwrap(), &scenario, &set).unwrap();
        assert_relative_eq!(f, fc, max_relative = 1e-12);
    }
}
