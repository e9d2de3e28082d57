//! Steady-state evolutionary search over fixed-length bit strings.

use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::rng;

use super::CogError;

#[derive(Debug, Clone, PartialEq)]
pub struct Genotype {
    pub bits: Vec<bool>,
    pub fitness: f64,
}

impl Genotype {
    pub fn evaluated<F: Fn(&[bool]) -> f64>(bits: Vec<bool>, fitness: &F) -> Self {
        let f = fitness(&bits);
        Self { bits, fitness: f }
    }
}

pub fn onemax(bits: &[bool]) -> f64 {
    bits.iter().filter(|b| **b).count() as f64
}

/// How offspring are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variation {
    /// Two fitness-proportional parents, uniform crossover with probability
    /// `crossover`, then independent bit flips with probability `mutation`.
    Ga { mutation: f64, crossover: f64 },
    /// Sample each bit from its frequency in the fitter half of the
    /// population, with marginals kept inside `[margin, 1 − margin]`.
    Umda { margin: f64 },
}

impl Variation {
    pub fn ga(mutation: f64, crossover: f64) -> Self {
        Variation::Ga { mutation, crossover }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOutcome {
    pub best: Genotype,
    /// Best-ever fitness after each evaluation.
    pub history: Vec<f64>,
    pub evaluations: usize,
    /// Evaluation count at which the best genotype was first seen; 0 when it
    /// came from the initial population.
    pub found_at: usize,
}

/// Random population of `size` bit strings of length `len`.
pub fn random_population<F: Fn(&[bool]) -> f64>(size: usize, len: usize, fitness: &F, seed: u64) -> Vec<Genotype> {
    let mut r = rng::seeded(seed);
    (0..size)
        .map(|_| Genotype::evaluated((0..len).map(|_| r.gen_bool(0.5)).collect(), fitness))
        .collect()
}

fn pick_parent<R: Rng>(pop: &[Genotype], r: &mut R) -> usize {
    let w: Vec<f64> = pop.iter().map(|g| g.fitness.max(0.0)).collect();
    match WeightedIndex::new(&w) {
        Ok(d) => d.sample(r),
        Err(_) => r.gen_range(0..pop.len()),
    }
}

/// Run for `budget` offspring evaluations. Each child replaces the
/// worst member when it is at least as fit. The best genotype only
/// changes on a strict improvement, so ties keep the earliest.
pub fn evolve<F: Fn(&[bool]) -> f64>(
    fitness: F,
    pop0: Vec<Genotype>,
    variation: Variation,
    budget: usize,
    seed: u64,
) -> Result<EvolveOutcome, CogError> {
    if pop0.is_empty() {
        return Err(CogError::Argument("initial population is empty".into()));
    }
    let mut pop = pop0;
    let mut best = pop[0].clone();
    for g in &pop[1..] {
        if g.fitness > best.fitness {
            best = g.clone();
        }
    }
    let mut found_at = 0;
    let mut r = rng::seeded(seed);
    let mut history = Vec::with_capacity(budget);
    let len = pop[0].bits.len();
    for e in 1..=budget {
        let bits: Vec<bool> = match variation {
            Variation::Ga { mutation, crossover } => {
                let a = pick_parent(&pop, &mut r);
                let mut child = pop[a].bits.clone();
                if r.gen_bool(crossover.clamp(0.0, 1.0)) {
                    let b = pick_parent(&pop, &mut r);
                    for (i, bit) in child.iter_mut().enumerate() {
                        if r.gen_bool(0.5) {
                            *bit = pop[b].bits[i];
                        }
                    }
                }
                let m = mutation.clamp(0.0, 1.0);
                for bit in child.iter_mut() {
                    if r.gen_bool(m) {
                        *bit = !*bit;
                    }
                }
                child
            }
            Variation::Umda { margin } => {
                let mut order: Vec<usize> = (0..pop.len()).collect();
                order.sort_by(|x, y| pop[*y].fitness.total_cmp(&pop[*x].fitness));
                let elite = &order[..pop.len().div_ceil(2)];
                let lo = margin.clamp(0.0, 0.5);
                (0..len)
                    .map(|i| {
                        let ones = elite.iter().filter(|j| pop[**j].bits[i]).count() as f64;
                        let p = (ones / elite.len() as f64).clamp(lo, 1.0 - lo);
                        r.gen_bool(p)
                    })
                    .collect()
            }
        };
        let child = Genotype::evaluated(bits, &fitness);
        if child.fitness > best.fitness {
            best = child.clone();
            found_at = e;
        }
        let worst = (0..pop.len())
            .min_by(|x, y| pop[*x].fitness.total_cmp(&pop[*y].fitness))
            .unwrap_or(0);
        if child.fitness >= pop[worst].fitness {
            pop[worst] = child;
        }
        history.push(best.fitness);
    }
    Ok(EvolveOutcome {
        best,
        history,
        evaluations: budget,
        found_at,
    })
}
