//! A COFO problem as a staged decision process: the state is the dataset,
//! an action applies a combinator to two promising points, and the reward is
//! the information gained by observing the result.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::{info_gain, promising_set, CofoError, CofoProblem, Dataset};
use crate::dds::Dds;
use crate::rng;

/// How candidate actions are generated in each state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// Every `(x, y, C)` with `x, y` in the promising set.
    Exhaustive,
    /// `draws` actions with `x` and `y` drawn by χ weight and `C` uniformly;
    /// duplicates collapse.
    ChiWeighted { draws: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofoAction {
    pub x: i64,
    pub y: i64,
    pub combinator: usize,
    pub result: i64,
    key: String,
}

impl CofoAction {
    pub fn key(&self) -> &str {
        &self.key
    }
}

#[derive(Debug, Clone)]
pub struct CofoDds {
    problem: CofoProblem,
    horizon: usize,
    sampler: Sampler,
    seed: u64,
    start: Dataset,
}

/// Build the decision process. The true objective must agree with at least
/// one candidate function, otherwise observations could leave no consistent
/// candidate.
pub fn make_cofo_dds(problem: &CofoProblem, horizon: usize, sampler: Sampler, seed: u64) -> Result<CofoDds, CofoError> {
    if horizon == 0 {
        return Err(CofoError::Horizon);
    }
    let everything = Dataset::from_pairs(problem.points().iter().filter_map(|x| problem.observe(*x)).collect());
    promising_set(problem, &everything)?;
    Ok(CofoDds {
        problem: problem.clone(),
        horizon,
        sampler,
        seed,
        start: Dataset::new(),
    })
}

impl CofoDds {
    /// Start from `d0` instead of the empty dataset.
    pub fn with_start(mut self, d0: Dataset) -> Result<Self, CofoError> {
        promising_set(&self.problem, &d0)?;
        self.start = d0;
        Ok(self)
    }

    pub fn problem(&self) -> &CofoProblem {
        &self.problem
    }

    pub fn start(&self) -> &Dataset {
        &self.start
    }

    fn action(&self, x: i64, y: i64, c: usize) -> Option<CofoAction> {
        let comb = &self.problem.combinators()[c];
        let z = comb.apply(x, y)?;
        self.problem.index_of(z)?;
        Some(CofoAction {
            x,
            y,
            combinator: c,
            result: z,
            key: format!("{}({x},{y})", comb.name()),
        })
    }

    fn after(&self, d: &Dataset, a: &CofoAction) -> Dataset {
        match self.problem.observe(a.result) {
            Some((z, v)) => d.with(z, v),
            None => d.clone(),
        }
    }
}

impl Dds for CofoDds {
    type State = Dataset;
    type Action = CofoAction;

    fn stages(&self) -> usize {
        self.horizon
    }

    fn initial_states(&self) -> Vec<Dataset> {
        alloc::vec![self.start.clone()]
    }

    fn actions(&self, t: usize, d: &Dataset) -> Vec<CofoAction> {
        let Ok(ps) = promising_set(&self.problem, d) else {
            return Vec::new();
        };
        let support: Vec<(i64, f64)> = ps
            .points
            .iter()
            .zip(&ps.chi)
            .filter(|(_, c)| **c > 0.0)
            .map(|(x, c)| (*x, *c))
            .collect();
        let ncomb = self.problem.combinators().len();
        if support.is_empty() || ncomb == 0 {
            return Vec::new();
        }
        let mut out: BTreeMap<String, CofoAction> = BTreeMap::new();
        match self.sampler {
            Sampler::Exhaustive => {
                for &(x, _) in &support {
                    for &(y, _) in &support {
                        for c in 0..ncomb {
                            if let Some(a) = self.action(x, y, c) {
                                out.insert(a.key.clone(), a);
                            }
                        }
                    }
                }
            }
            Sampler::ChiWeighted { draws } => {
                let mut r = rng::seeded(rng::derive_seed(self.seed, &format!("cofo/{t}/{}", d.key())));
                let dist = WeightedIndex::new(support.iter().map(|(_, c)| *c)).expect("support weights are positive");
                for _ in 0..draws {
                    let x = support[dist.sample(&mut r)].0;
                    let y = support[dist.sample(&mut r)].0;
                    let c = r.gen_range(0..ncomb);
                    if let Some(a) = self.action(x, y, c) {
                        out.insert(a.key.clone(), a);
                    }
                }
            }
        }
        out.into_values().collect()
    }

    fn reward(&self, _t: usize, d: &Dataset, a: &CofoAction) -> f64 {
        info_gain(&self.problem, d, &self.after(d, a)).map_or(0.0, |g| g.gain)
    }

    fn transition(&self, _t: usize, d: &Dataset, a: &CofoAction) -> Vec<(f64, Dataset)> {
        alloc::vec![(1.0, self.after(d, a))]
    }

    fn discount(&self) -> f64 {
        1.0
    }

    fn state_key(&self, d: &Dataset) -> String {
        d.key()
    }

    fn action_key(&self, a: &CofoAction) -> String {
        a.key.clone()
    }
}
