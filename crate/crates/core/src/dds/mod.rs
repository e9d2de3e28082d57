//! Discrete decision systems (finite-horizon, staged) and their solvers.
//!
//! Stages run `1..=n`. The value function obeys
//! `f_t(s) = max_x { r_t(s,x) + α·Σ Pr(s'|s,x)·f_{t+1}(s') }` with
//! `f_{n+1} = 0`; a state with no feasible action before the horizon is worth
//! `-∞`. Ties between actions are broken by lowest action key everywhere.

mod chrono;
mod search;
mod stochastic;
mod table;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::math;
use crate::morphisms::MorphError;
use crate::rng;

pub use chrono::{chrono_solve, chrono_solve_with, ChronoSolve};
pub use search::{exhaustive_max, greedy_fold_optimize, single_peak_audit, SearchOutcome};
pub use stochastic::{stochastic_dp, SdpConfig};
pub use table::{random_table, RandomTableSpec, TableDds, TableRow};

/// Default limit on `Σ_t Σ_s |actions(t,s)|` for the exact solvers.
pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

/// Tolerance used when comparing action values for ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DdsError {
    #[error("problem needs {cells} cells, budget is {limit}")]
    Budget { cells: usize, limit: usize },
    #[error("no feasible action at stage {stage} in state {state}")]
    DeadEnd { stage: usize, state: String },
    #[error("policy has no usable action at stage {stage} in state {state}")]
    PolicyGap { stage: usize, state: String },
    #[error("state {state} is not feasible at stage {stage}")]
    UnknownState { stage: usize, state: String },
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("rollouts must be at least 1")]
    Rollouts,
    #[error("start point has no candidates")]
    DegenerateStart,
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Metagraph(#[from] crate::metagraph::MgError),
}

/// A staged decision problem. States and actions are identified by the
/// caller-supplied keys, which must be canonical (equal states, equal keys).
pub trait Dds {
    type State: Clone;
    type Action: Clone;

    /// Number of stages `n`.
    fn stages(&self) -> usize;
    /// Feasible states at stage 1.
    fn initial_states(&self) -> Vec<Self::State>;
    /// Feasible states at stage `t`; `None` means "whatever is reachable
    /// from stage 1".
    fn states(&self, t: usize) -> Option<Vec<Self::State>> {
        let _ = t;
        None
    }
    fn actions(&self, t: usize, s: &Self::State) -> Vec<Self::Action>;
    /// Expected immediate reward.
    fn reward(&self, t: usize, s: &Self::State, x: &Self::Action) -> f64;
    /// Successor distribution as `(probability, state)` pairs. Only asked for
    /// `t < n`.
    fn transition(&self, t: usize, s: &Self::State, x: &Self::Action) -> Vec<(f64, Self::State)>;
    fn discount(&self) -> f64;
    fn state_key(&self, s: &Self::State) -> String;
    fn action_key(&self, x: &Self::Action) -> String;
}

/// One enumerated `(t, s)` with its actions sorted by key.
#[derive(Debug, Clone)]
pub struct Cell<S, A> {
    pub key: String,
    pub state: S,
    pub actions: Vec<(String, A)>,
}

/// Every stage's feasible states, `stages[t-1]`, sorted by key.
#[derive(Debug, Clone)]
pub struct Enumeration<S, A> {
    pub stages: Vec<Vec<Cell<S, A>>>,
    pub cells: usize,
}

impl<S, A> Enumeration<S, A> {
    pub fn cell(&self, t: usize, key: &str) -> Option<&Cell<S, A>> {
        let row = self.stages.get(t.checked_sub(1)?)?;
        row.binary_search_by(|c| c.key.as_str().cmp(key)).ok().map(|i| &row[i])
    }
}

fn sorted_cell<P: Dds>(p: &P, t: usize, s: P::State) -> Cell<P::State, P::Action> {
    let mut actions: Vec<(String, P::Action)> = p.actions(t, &s).into_iter().map(|x| (p.action_key(&x), x)).collect();
    actions.sort_by(|a, b| a.0.cmp(&b.0));
    actions.dedup_by(|a, b| a.0 == b.0);
    Cell {
        key: p.state_key(&s),
        state: s,
        actions,
    }
}

/// Enumerate feasible states and actions, stopping once `budget` cells are
/// exceeded.
pub fn enumerate<P: Dds>(p: &P, budget: usize) -> Result<Enumeration<P::State, P::Action>, DdsError> {
    let n = p.stages();
    let mut stages: Vec<Vec<Cell<P::State, P::Action>>> = Vec::with_capacity(n);
    let mut cells = 0usize;
    for t in 1..=n {
        let raw = match p.states(t) {
            Some(list) => list,
            None if t == 1 => p.initial_states(),
            None => {
                let mut next = Vec::new();
                for c in &stages[t - 2] {
                    for (_, x) in &c.actions {
                        next.extend(p.transition(t - 1, &c.state, x).into_iter().map(|(_, s)| s));
                    }
                }
                next
            }
        };
        let mut by_key: BTreeMap<String, P::State> = BTreeMap::new();
        for s in raw {
            by_key.entry(p.state_key(&s)).or_insert(s);
        }
        let mut row = Vec::with_capacity(by_key.len());
        for (_, s) in by_key {
            let cell = sorted_cell(p, t, s);
            cells += cell.actions.len().max(1);
            if cells > budget {
                return Err(DdsError::Budget { cells, limit: budget });
            }
            row.push(cell);
        }
        stages.push(row);
    }
    Ok(Enumeration { stages, cells })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueEntry {
    pub value: f64,
    /// Optimal action keys in ascending order; empty for dead ends.
    pub argmax: Vec<String>,
}

/// `f_t(s)` and the optimal actions for every enumerated `(t, s)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueFunction {
    pub stages: usize,
    pub table: BTreeMap<(usize, String), ValueEntry>,
}

impl ValueFunction {
    pub fn get(&self, t: usize, state: &str) -> Option<&ValueEntry> {
        self.table.get(&(t, String::from(state)))
    }

    pub fn value(&self, t: usize, state: &str) -> Option<f64> {
        self.get(t, state).map(|e| e.value)
    }

    /// Largest absolute difference between matching entries; `None` if the
    /// tables have different keys. Matching infinities count as equal.
    pub fn max_abs_diff(&self, other: &ValueFunction) -> Option<f64> {
        if self.table.len() != other.table.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (k, a) in &self.table {
            let b = other.table.get(k)?;
            if a.value == b.value {
                continue;
            }
            worst = worst.max((a.value - b.value).abs());
        }
        Some(worst)
    }

    /// Policy taking the lowest-key optimal action everywhere.
    pub fn policy(&self) -> Policy {
        Policy {
            choice: self
                .table
                .iter()
                .filter_map(|(k, e)| e.argmax.first().map(|a| (k.clone(), a.clone())))
                .collect(),
        }
    }
}

/// Deterministic policy: `(t, state key) ↦ action key`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Policy {
    pub choice: BTreeMap<(usize, String), String>,
}

impl Policy {
    pub fn action(&self, t: usize, state: &str) -> Option<&str> {
        self.choice.get(&(t, String::from(state))).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub stage: usize,
    pub state: String,
    pub action: String,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    /// `Σ α^(t-1)·r_t`.
    pub total: f64,
}

impl Trajectory {
    fn from_steps(steps: Vec<Step>, alpha: f64) -> Self {
        let total = discounted_total(steps.iter().map(|s| s.reward), alpha);
        Self { steps, total }
    }
}

pub(crate) fn discounted_total(rewards: impl Iterator<Item = f64>, alpha: f64) -> f64 {
    let mut total = 0.0;
    let mut weight = 1.0;
    for r in rewards {
        total += weight * r;
        weight *= alpha;
    }
    total
}

/// Value of taking `x` given the successor values; `None` successors (not
/// enumerated) are an error of the caller.
pub(crate) fn q_value(reward: f64, alpha: f64, successors: impl Iterator<Item = (f64, f64)>) -> f64 {
    if alpha == 0.0 {
        return reward;
    }
    let mut cont = 0.0;
    for (p, f) in successors {
        if p > 0.0 {
            cont += p * f;
        }
    }
    reward + alpha * cont
}

/// Max over `(action key, q)` pairs in key order, collecting ties.
pub(crate) fn best_of(qs: &[(String, f64)]) -> ValueEntry {
    let best = qs.iter().map(|(_, q)| *q).fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return ValueEntry {
            value: best,
            argmax: Vec::new(),
        };
    }
    ValueEntry {
        value: best,
        argmax: qs
            .iter()
            .filter(|(_, q)| *q == best || math::nearly_equal(*q, best, TIE_TOLERANCE))
            .map(|(k, _)| k.clone())
            .collect(),
    }
}

pub fn exact_dp<P: Dds>(p: &P) -> Result<ValueFunction, DdsError> {
    exact_dp_with(p, DEFAULT_CELL_BUDGET)
}

/// Backward induction over every enumerated state.
pub fn exact_dp_with<P: Dds>(p: &P, budget: usize) -> Result<ValueFunction, DdsError> {
    let en = enumerate(p, budget)?;
    let n = p.stages();
    let alpha = p.discount();
    let mut vf = ValueFunction {
        stages: n,
        table: BTreeMap::new(),
    };
    let mut next_row: BTreeMap<String, f64> = BTreeMap::new();
    for t in (1..=n).rev() {
        let mut row = BTreeMap::new();
        for cell in &en.stages[t - 1] {
            let qs: Vec<(String, f64)> = cell
                .actions
                .iter()
                .map(|(k, x)| {
                    let r = p.reward(t, &cell.state, x);
                    let q = if t == n {
                        r
                    } else {
                        let succ = p.transition(t, &cell.state, x);
                        q_value(
                            r,
                            alpha,
                            succ.iter().map(|(pr, s)| {
                                let f = next_row.get(&p.state_key(s)).copied().unwrap_or(f64::NEG_INFINITY);
                                (*pr, f)
                            }),
                        )
                    };
                    (k.clone(), q)
                })
                .collect();
            let entry = best_of(&qs);
            row.insert(cell.key.clone(), entry.value);
            vf.table.insert((t, cell.key.clone()), entry);
        }
        next_row = row;
    }
    Ok(vf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyMode {
    /// Highest immediate reward, lowest key on ties.
    Argmax,
    /// Sample with probability proportional to `max(reward, 0)`; uniform if
    /// every weight is zero.
    Proportional,
}

pub(crate) fn sample_successor<S: Clone, R: Rng>(dist: &[(f64, S)], r: &mut R) -> Option<S> {
    let total: f64 = dist.iter().map(|(p, _)| p.max(0.0)).sum();
    if dist.is_empty() || total <= 0.0 {
        return None;
    }
    let mut u = r.gen::<f64>() * total;
    for (p, s) in dist {
        let p = p.max(0.0);
        if u < p {
            return Some(s.clone());
        }
        u -= p;
    }
    dist.iter().rev().find(|(p, _)| *p > 0.0).map(|(_, s)| s.clone())
}

fn find_start<P: Dds>(p: &P, s0: &P::State) -> Result<(), DdsError> {
    let key = p.state_key(s0);
    let known = p.states(1).unwrap_or_else(|| p.initial_states());
    if known.iter().any(|s| p.state_key(s) == key) {
        Ok(())
    } else {
        Err(DdsError::UnknownState { stage: 1, state: key })
    }
}

/// Run the myopic policy from `s0`.
pub fn greedy_run<P: Dds>(p: &P, s0: &P::State, mode: GreedyMode, seed: u64) -> Result<Trajectory, DdsError> {
    find_start(p, s0)?;
    let mut r = rng::seeded(seed);
    let n = p.stages();
    let mut state = s0.clone();
    let mut steps = Vec::with_capacity(n);
    for t in 1..=n {
        let cell = sorted_cell(p, t, state);
        if cell.actions.is_empty() {
            return Err(DdsError::DeadEnd {
                stage: t,
                state: cell.key,
            });
        }
        let rewards: Vec<f64> = cell.actions.iter().map(|(_, x)| p.reward(t, &cell.state, x)).collect();
        let pick = match mode {
            GreedyMode::Argmax => {
                let mut best = 0;
                for (i, rw) in rewards.iter().enumerate() {
                    if *rw > rewards[best] && !math::nearly_equal(*rw, rewards[best], TIE_TOLERANCE) {
                        best = i;
                    }
                }
                best
            }
            GreedyMode::Proportional => {
                let w: Vec<f64> = rewards.iter().map(|x| x.max(0.0)).collect();
                let total: f64 = w.iter().sum();
                if total > 0.0 {
                    let mut u = r.gen::<f64>() * total;
                    let mut pick = w.len() - 1;
                    for (i, wi) in w.iter().enumerate() {
                        if *wi > 0.0 && u < *wi {
                            pick = i;
                            break;
                        }
                        u -= wi;
                    }
                    pick
                } else {
                    r.gen_range(0..w.len())
                }
            }
        };
        let (akey, x) = &cell.actions[pick];
        steps.push(Step {
            stage: t,
            state: cell.key.clone(),
            action: akey.clone(),
            reward: rewards[pick],
        });
        if t == n {
            break;
        }
        let dist = p.transition(t, &cell.state, x);
        state = sample_successor(&dist, &mut r).ok_or_else(|| {
            DdsError::Invalid(alloc::format!(
                "empty transition at stage {t} from {} via {akey}",
                cell.key
            ))
        })?;
    }
    Ok(Trajectory::from_steps(steps, p.discount()))
}

/// Myopic policy over every enumerated state.
pub fn greedy_policy<P: Dds>(p: &P) -> Result<Policy, DdsError> {
    let en = enumerate(p, DEFAULT_CELL_BUDGET)?;
    let mut choice = BTreeMap::new();
    for (i, row) in en.stages.iter().enumerate() {
        let t = i + 1;
        for cell in row {
            let mut best: Option<(f64, &String)> = None;
            for (k, x) in &cell.actions {
                let rw = p.reward(t, &cell.state, x);
                if best.is_none_or(|(b, _)| rw > b && !math::nearly_equal(rw, b, TIE_TOLERANCE)) {
                    best = Some((rw, k));
                }
            }
            if let Some((_, k)) = best {
                choice.insert((t, cell.key.clone()), k.clone());
            }
        }
    }
    Ok(Policy { choice })
}

/// Expected total of following `policy` from `s0`, computed exactly.
pub fn policy_value<P: Dds>(p: &P, policy: &Policy, s0: &P::State) -> Result<f64, DdsError> {
    fn go<P: Dds>(p: &P, policy: &Policy, t: usize, s: &P::State) -> Result<f64, DdsError> {
        let key = p.state_key(s);
        let cell = sorted_cell(p, t, s.clone());
        let chosen = policy
            .action(t, &key)
            .and_then(|a| cell.actions.iter().find(|(k, _)| k == a))
            .ok_or(DdsError::PolicyGap { stage: t, state: key })?;
        let r = p.reward(t, s, &chosen.1);
        if t == p.stages() || p.discount() == 0.0 {
            return Ok(r);
        }
        let mut cont = 0.0;
        for (pr, next) in p.transition(t, s, &chosen.1) {
            if pr > 0.0 {
                cont += pr * go(p, policy, t + 1, &next)?;
            }
        }
        Ok(r + p.discount() * cont)
    }
    find_start(p, s0)?;
    go(p, policy, 1, s0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyEvaluation {
    pub mean: f64,
    pub std_error: f64,
    pub episodes: usize,
}

/// Monte-Carlo evaluation of `policy` from `s0`.
pub fn evaluate_policy<P: Dds>(
    p: &P,
    policy: &Policy,
    s0: &P::State,
    episodes: usize,
    seed: u64,
) -> Result<PolicyEvaluation, DdsError> {
    find_start(p, s0)?;
    let mut r = rng::seeded(seed);
    let n = p.stages();
    let mut totals = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let mut state = s0.clone();
        let mut rewards = Vec::with_capacity(n);
        for t in 1..=n {
            let key = p.state_key(&state);
            let actions = p.actions(t, &state);
            let x = policy
                .action(t, &key)
                .and_then(|a| actions.iter().find(|x| p.action_key(x) == a))
                .ok_or(DdsError::PolicyGap {
                    stage: t,
                    state: key.clone(),
                })?;
            rewards.push(p.reward(t, &state, x));
            if t == n {
                break;
            }
            let dist = p.transition(t, &state, x);
            state = sample_successor(&dist, &mut r)
                .ok_or_else(|| DdsError::Invalid(alloc::format!("empty transition at stage {t} from {key}")))?;
        }
        totals.push(discounted_total(rewards.into_iter(), p.discount()));
    }
    let m = totals.len() as f64;
    let mean = if totals.is_empty() {
        0.0
    } else {
        totals.iter().sum::<f64>() / m
    };
    let std_error = if totals.len() < 2 {
        0.0
    } else {
        let var = totals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
        math::sqrt(var / m)
    };
    Ok(PolicyEvaluation {
        mean,
        std_error,
        episodes,
    })
}
