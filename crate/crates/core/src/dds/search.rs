//! Greedy pattern search over a metagraph view: hill climbing from a start
//! atom through caller-generated candidates.

use alloc::vec::Vec;

use super::DdsError;
use crate::metagraph::{AtomId, MgError, Snapshot, TypedMetagraph};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: AtomId,
    pub best_value: f64,
    /// Points moved through, starting with the start point.
    pub trail: Vec<AtomId>,
    pub evaluations: usize,
    /// Stopped because no candidate improved (rather than on budget).
    pub local_optimum: bool,
}

/// Move to the best candidate (lowest id on ties) while it strictly improves
/// the objective, spending at most `budget` objective evaluations.
pub fn greedy_fold_optimize<C, F>(
    view: &Snapshot,
    candidates: C,
    objective: F,
    start: AtomId,
    budget: usize,
) -> Result<SearchOutcome, DdsError>
where
    C: Fn(&TypedMetagraph, AtomId) -> Vec<AtomId>,
    F: Fn(&TypedMetagraph, AtomId) -> f64,
{
    let g = view.graph();
    if g.atom(start).is_none() {
        return Err(MgError::UnknownAtom(start).into());
    }
    if candidates(g, start).is_empty() {
        return Err(DdsError::DegenerateStart);
    }
    let mut current = start;
    let mut value = objective(g, start);
    let mut evaluations = 1;
    let mut trail = alloc::vec![start];
    loop {
        let mut next = candidates(g, current);
        next.sort();
        next.dedup();
        let mut best: Option<(AtomId, f64)> = None;
        let mut out_of_budget = false;
        for c in next {
            if evaluations >= budget {
                out_of_budget = true;
                break;
            }
            let v = objective(g, c);
            evaluations += 1;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((c, v));
            }
        }
        match best {
            Some((c, v)) if v > value => {
                current = c;
                value = v;
                trail.push(c);
                if out_of_budget {
                    return Ok(SearchOutcome {
                        best: current,
                        best_value: value,
                        trail,
                        evaluations,
                        local_optimum: false,
                    });
                }
            }
            _ => {
                return Ok(SearchOutcome {
                    best: current,
                    best_value: value,
                    trail,
                    evaluations,
                    local_optimum: !out_of_budget,
                })
            }
        }
    }
}

/// The maximum of `objective` over every atom (lowest id on ties), or
/// `None` for an empty view.
pub fn exhaustive_max<F>(view: &Snapshot, objective: F) -> Option<(AtomId, f64)>
where
    F: Fn(&TypedMetagraph, AtomId) -> f64,
{
    let g = view.graph();
    let mut best: Option<(AtomId, f64)> = None;
    for id in g.atom_ids() {
        let v = objective(g, id);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((id, v));
        }
    }
    best
}

/// True when every atom short of the global maximum value has a candidate
/// that strictly improves on it, so hill climbing cannot get stuck.
pub fn single_peak_audit<C, F>(view: &Snapshot, candidates: C, objective: F) -> bool
where
    C: Fn(&TypedMetagraph, AtomId) -> Vec<AtomId>,
    F: Fn(&TypedMetagraph, AtomId) -> f64,
{
    let g = view.graph();
    let Some((_, top)) = exhaustive_max(view, &objective) else {
        return true;
    };
    g.atom_ids().into_iter().all(|id| {
        let v = objective(g, id);
        v >= top || candidates(g, id).into_iter().any(|c| objective(g, c) > v)
    })
}
