use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OptimizerError;
use crate::seed::{derive_seed, rng_from_seed, SimRng};

/// Box-bounded real vector search space. Each `(lo, hi)` gene pair in
/// `ordered_pairs` is kept ordered by swapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub bounds: Vec<(f64, f64)>,
    pub ordered_pairs: Vec<(usize, usize)>,
}

impl SearchSpace {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self, OptimizerError> {
        if bounds
            .iter()
            .any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(OptimizerError::InvalidConfig(format!("bad gene bounds {bounds:?}")));
        }
        Ok(SearchSpace {
            bounds,
            ordered_pairs: Vec::new(),
        })
    }

    pub fn with_ordered_pairs(mut self, pairs: Vec<(usize, usize)>) -> Self {
        self.ordered_pairs = pairs;
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, genes: &[f64]) -> bool {
        genes.len() == self.dim()
            && genes
                .iter()
                .zip(&self.bounds)
                .all(|(g, &(lo, hi))| lo <= *g && *g <= hi)
    }

    fn clamp(&self, genes: &mut [f64]) {
        for (g, &(lo, hi)) in genes.iter_mut().zip(&self.bounds) {
            *g = g.clamp(lo, hi);
        }
    }

    fn repair(&self, genes: &mut [f64]) {
        self.clamp(genes);
        for &(lo, hi) in &self.ordered_pairs {
            if genes[lo] > genes[hi] {
                genes.swap(lo, hi);
            }
        }
        // a swap can cross bounds when the pair's ranges differ
        self.clamp(genes);
    }

    fn random(&self, rng: &mut SimRng) -> Genotype {
        let mut genes: Vec<f64> = self
            .bounds
            .iter()
            .map(|&(lo, hi)| lo + rng.random::<f64>() * (hi - lo))
            .collect();
        self.repair(&mut genes);
        Genotype { genes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genotype {
    pub genes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    /// Mutation standard deviation as a fraction of each gene's range.
    pub mutation_sigma_frac: f64,
    pub elitism: usize,
    /// Games averaged per fitness evaluation.
    pub fitness_reps: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 30,
            generations: 100,
            tournament_size: 2,
            crossover_prob: 0.7,
            mutation_sigma_frac: 0.05,
            elitism: 1,
            fitness_reps: 10,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), OptimizerError> {
        let bad = |m: &str| Err(OptimizerError::InvalidConfig(m.to_string()));
        if self.population < 2 {
            return bad("population must be at least 2");
        }
        if self.tournament_size < 1 {
            return bad("tournament_size must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return bad("crossover_prob must lie in [0, 1]");
        }
        if !(self.mutation_sigma_frac >= 0.0) || !self.mutation_sigma_frac.is_finite() {
            return bad("mutation_sigma_frac must be non-negative");
        }
        if self.elitism > self.population {
            return bad("elitism cannot exceed population");
        }
        if self.fitness_reps < 1 {
            return bad("fitness_reps must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_ever_fitness: f64,
    pub best_genes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub best: Genotype,
    pub best_fitness: f64,
    /// Entry 0 is the random initial population.
    pub trace: Vec<GenerationStats>,
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::NEG_INFINITY
    } else {
        f
    }
}

/// Tournament winner; ties go to the lower index.
fn tournament(fitness: &[f64], size: usize, rng: &mut SimRng) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.random_range(0..fitness.len());
        if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Generational GA maximising `fitness(genes, eval_seed)`.
///
/// Every individual of a generation is evaluated with the same seed so that
/// noisy fitness compares like with like. Elites carry their fitness over
/// unchanged.
pub fn ga_run<F>(cfg: &GaConfig, space: &SearchSpace, fitness: F, seed: u64) -> Result<GaResult, OptimizerError>
where
    F: Fn(&[f64], u64) -> f64 + Sync,
{
    cfg.validate()?;
    if space.dim() == 0 {
        return Err(OptimizerError::InvalidConfig("empty search space".into()));
    }
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let eval = |pop: &[Genotype], gen: usize| -> Vec<f64> {
        let s = derive_seed(seed, 1 + gen as u64);
        pop.par_iter().map(|g| sanitize(fitness(&g.genes, s))).collect()
    };

    let mut pop: Vec<Genotype> = (0..cfg.population).map(|_| space.random(&mut rng)).collect();
    let mut fit = eval(&pop, 0);
    let mut best_ever = (f64::NEG_INFINITY, pop[0].clone());
    let mut trace = Vec::with_capacity(cfg.generations + 1);
    let mut record = |gen: usize, pop: &[Genotype], fit: &[f64], best_ever: &mut (f64, Genotype)| {
        let b = order(fit)[0];
        if fit[b] > best_ever.0 {
            *best_ever = (fit[b], pop[b].clone());
        }
        trace.push(GenerationStats {
            generation: gen,
            best_fitness: fit[b],
            mean_fitness: fit.iter().sum::<f64>() / fit.len() as f64,
            best_ever_fitness: best_ever.0,
            best_genes: pop[b].genes.clone(),
        });
    };
    record(0, &pop, &fit, &mut best_ever);

    let sigmas: Vec<f64> = space
        .bounds
        .iter()
        .map(|&(lo, hi)| cfg.mutation_sigma_frac * (hi - lo))
        .collect();
    // each gene mutates with probability 1/dim: one gene per child on average
    let mutation_rate = 1.0 / space.dim() as f64;
    for gen in 1..=cfg.generations {
        let ranked = order(&fit);
        let mut next: Vec<Genotype> = ranked[..cfg.elitism].iter().map(|&i| pop[i].clone()).collect();
        let elite_fit: Vec<f64> = ranked[..cfg.elitism].iter().map(|&i| fit[i]).collect();
        while next.len() < cfg.population {
            let a = &pop[tournament(&fit, cfg.tournament_size, &mut rng)];
            let b = &pop[tournament(&fit, cfg.tournament_size, &mut rng)];
            let mut genes = if rng.random::<f64>() < cfg.crossover_prob {
                a.genes
                    .iter()
                    .zip(&b.genes)
                    .map(|(&x, &y)| if rng.random::<bool>() { x } else { y })
                    .collect()
            } else {
                a.genes.clone()
            };
            for (g, &sigma) in genes.iter_mut().zip(&sigmas) {
                if sigma > 0.0 && rng.random::<f64>() < mutation_rate {
                    *g += Normal::new(0.0, sigma).expect("finite sigma").sample(&mut rng);
                }
            }
            space.repair(&mut genes);
            next.push(Genotype { genes });
        }
        let mut next_fit = elite_fit;
        next_fit.extend(eval(&next[cfg.elitism..], gen));
        pop = next;
        fit = next_fit;
        record(gen, &pop, &fit, &mut best_ever);
    }
    Ok(GaResult {
        best_fitness: best_ever.0,
        best: best_ever.1,
        trace,
    })
}

/// Indices sorted by descending fitness, ties by index.
fn order(fit: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fit.len()).collect();
    idx.sort_by(|&a, &b| fit[b].total_cmp(&fit[a]).then(a.cmp(&b)));
    idx
}
