//! Monte-Carlo backward induction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;

use super::{best_of, enumerate, sample_successor, Dds, DdsError, ValueFunction, DEFAULT_CELL_BUDGET};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SdpConfig {
    /// Successor samples drawn per `(t, s, x)`.
    pub rollouts: usize,
    /// Evaluate only this many randomly chosen actions per state.
    pub action_sample: Option<usize>,
    pub cell_budget: usize,
}

impl SdpConfig {
    pub fn new(rollouts: usize) -> Self {
        Self {
            rollouts,
            action_sample: None,
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }
}

/// Backward induction where each continuation value is the mean of
/// `rollouts` sampled successors. Every `(t, s)` draws from its own stream
/// derived from `seed`, so the table does not depend on evaluation order.
pub fn stochastic_dp<P: Dds>(p: &P, cfg: &SdpConfig, seed: u64) -> Result<ValueFunction, DdsError> {
    if cfg.rollouts == 0 {
        return Err(DdsError::Rollouts);
    }
    let en = enumerate(p, cfg.cell_budget)?;
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
            let mut r = rng::seeded(rng::derive_seed(seed, &format!("sdp/{t}/{}", cell.key)));
            let chosen: Vec<usize> = match cfg.action_sample {
                Some(k) if k < cell.actions.len() => {
                    let mut idx = index::sample(&mut r, cell.actions.len(), k.max(1)).into_vec();
                    idx.sort_unstable();
                    idx
                }
                _ => (0..cell.actions.len()).collect(),
            };
            let mut qs = Vec::with_capacity(chosen.len());
            for i in chosen {
                let (key, x) = &cell.actions[i];
                let reward = p.reward(t, &cell.state, x);
                let q = if t == n || alpha == 0.0 {
                    reward
                } else {
                    let dist = p.transition(t, &cell.state, x);
                    let mut sum = 0.0;
                    for _ in 0..cfg.rollouts {
                        let f = sample_successor(&dist, &mut r)
                            .and_then(|s| next_row.get(&p.state_key(&s)).copied())
                            .unwrap_or(f64::NEG_INFINITY);
                        sum += f;
                    }
                    reward + alpha * (sum / cfg.rollouts as f64)
                };
                qs.push((key.clone(), q));
            }
            let entry = best_of(&qs);
            row.insert(cell.key.clone(), entry.value);
            vf.table.insert((t, cell.key.clone()), entry);
        }
        next_row = row;
    }
    Ok(vf)
}
