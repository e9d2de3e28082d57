//! Short-term importance spreading.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};

use crate::metagraph::{AtomId, Snapshot, TypedMetagraph};
use crate::rng;

use super::CogError;

/// Per-step utilities: entry `t` maps atoms to the utility observed at step
/// `t`. Missing steps or atoms contribute 0.
pub type UtilityTrace = Vec<BTreeMap<AtomId, f64>>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transfer {
    pub step: usize,
    pub from: AtomId,
    pub to: AtomId,
}

#[derive(Debug, Clone)]
pub struct EcanOutcome {
    /// Copy of the input graph with the final STI values.
    pub graph: TypedMetagraph,
    pub sti: BTreeMap<AtomId, f64>,
    pub transfers: Vec<Transfer>,
    /// Reward of every executed transfer: utility of source plus target.
    pub rewards: Vec<f64>,
    /// Steps where no atom had positive STI or the chosen atom had no
    /// linked neighbor.
    pub skipped: Vec<usize>,
}

/// Each step draws `x` with probability proportional to positive STI, then
/// a neighbor `y` proportional to link weight, and moves `q` STI from `x` to
/// `y`. STI may go negative. Links are undirected `(a, b, weight)`.
pub fn ecan_run(
    kb: &Snapshot,
    links: &[(AtomId, AtomId, f64)],
    q: f64,
    steps: usize,
    utility: &UtilityTrace,
    seed: u64,
) -> Result<EcanOutcome, CogError> {
    if !q.is_finite() || q <= 0.0 {
        return Err(CogError::Argument("transfer amount must be positive".into()));
    }
    let mut sti: BTreeMap<AtomId, f64> = kb.atoms().map(|a| (a.id(), a.sti())).collect();
    let mut nbrs: BTreeMap<AtomId, Vec<(AtomId, f64)>> = BTreeMap::new();
    for &(a, b, w) in links {
        if !sti.contains_key(&a) || !sti.contains_key(&b) {
            return Err(CogError::Argument("link names an atom outside the graph".into()));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(CogError::Argument("link weights must be finite and nonnegative".into()));
        }
        if a == b || w == 0.0 {
            continue;
        }
        nbrs.entry(a).or_default().push((b, w));
        nbrs.entry(b).or_default().push((a, w));
    }
    let mut r = rng::seeded(seed);
    let mut transfers = Vec::new();
    let mut rewards = Vec::new();
    let mut skipped = Vec::new();
    for step in 0..steps {
        let ids: Vec<AtomId> = sti.keys().copied().collect();
        let w: Vec<f64> = ids.iter().map(|id| sti[id].max(0.0)).collect();
        let Ok(dx) = WeightedIndex::new(&w) else {
            skipped.push(step);
            continue;
        };
        let x = ids[dx.sample(&mut r)];
        let Some(ns) = nbrs.get(&x) else {
            skipped.push(step);
            continue;
        };
        let wy: Vec<f64> = ns.iter().map(|(_, w)| *w).collect();
        let Ok(dy) = WeightedIndex::new(&wy) else {
            skipped.push(step);
            continue;
        };
        let y = ns[dy.sample(&mut r)].0;
        if let Some(v) = sti.get_mut(&x) {
            *v -= q;
        }
        if let Some(v) = sti.get_mut(&y) {
            *v += q;
        }
        let u = utility.get(step);
        let rw = u.and_then(|m| m.get(&x)).copied().unwrap_or(0.0) + u.and_then(|m| m.get(&y)).copied().unwrap_or(0.0);
        transfers.push(Transfer { step, from: x, to: y });
        rewards.push(rw);
    }
    let mut graph = kb.graph().clone();
    for (id, v) in &sti {
        graph.set_sti(*id, *v)?;
    }
    Ok(EcanOutcome {
        graph,
        sti,
        transfers,
        rewards,
        skipped,
    })
}

/// Links for every binary edge of `mg`, weighted by the edge's strength
/// (1 when it has no truth value).
pub fn links_from_edges(mg: &TypedMetagraph) -> Vec<(AtomId, AtomId, f64)> {
    use crate::metagraph::Target;
    mg.atoms()
        .filter_map(|a| match a.targets() {
            [Target::Atom(x), Target::Atom(y)] => Some((*x, *y, a.tv().map_or(1.0, |t| t.strength()))),
            _ => None,
        })
        .collect()
}
