use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::dds::{Dds, ValueFunction};

use super::{SubError, SubpatternDag};

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub score: f64,
    pub edges: usize,
    pub aligned: usize,
    /// Per trace edge: whether its image is connected in the dag.
    pub verdicts: Vec<bool>,
}

/// Fraction of trace edges `(parent, child)` whose mapped images are joined
/// by a directed path in `spd` (or coincide). An empty trace scores 1.
/// Images that are not dag items count as unaligned.
pub fn alignment_score<V: Ord + Debug, T: Ord>(
    trace: &[(V, V)],
    spd: &SubpatternDag<T>,
    mapping: &BTreeMap<V, T>,
) -> Result<Alignment, SubError> {
    let mut verdicts = Vec::with_capacity(trace.len());
    for (p, c) in trace {
        let mp = mapping.get(p).ok_or_else(|| SubError::Unmapped(format!("{p:?}")))?;
        let mc = mapping.get(c).ok_or_else(|| SubError::Unmapped(format!("{c:?}")))?;
        let ok = match (spd.index_of(mp), spd.index_of(mc)) {
            (Some(a), Some(b)) => a == b || spd.reaches(a, b),
            _ => false,
        };
        verdicts.push(ok);
    }
    let aligned = verdicts.iter().filter(|v| **v).count();
    let score = if trace.is_empty() {
        1.0
    } else {
        aligned as f64 / trace.len() as f64
    };
    Ok(Alignment {
        score,
        edges: trace.len(),
        aligned,
        verdicts,
    })
}

/// Subproblem edges of a solved decision system: `(t, s) → (t+1, s')` for
/// every successor of the lowest-key optimal action.
pub fn subproblem_trace<P: Dds>(p: &P, vf: &ValueFunction) -> Vec<((usize, String), (usize, String))> {
    let mut out = Vec::new();
    let n = p.stages();
    for t in 1..n {
        let states = p.states(t).unwrap_or_else(|| reachable(p, vf, t));
        for s in states {
            let key = p.state_key(&s);
            let Some(entry) = vf.get(t, &key) else { continue };
            let Some(best) = entry.argmax.first() else { continue };
            let Some(x) = p.actions(t, &s).into_iter().find(|x| p.action_key(x) == *best) else {
                continue;
            };
            for (_, s2) in p.transition(t, &s, &x) {
                out.push(((t, key.clone()), (t + 1, p.state_key(&s2))));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn reachable<P: Dds>(p: &P, vf: &ValueFunction, t: usize) -> Vec<P::State> {
    let mut layer = p.initial_states();
    for u in 1..t {
        let mut next: BTreeMap<String, P::State> = BTreeMap::new();
        for s in &layer {
            for x in p.actions(u, s) {
                for (_, s2) in p.transition(u, s, &x) {
                    next.entry(p.state_key(&s2)).or_insert(s2);
                }
            }
        }
        layer = next.into_values().collect();
    }
    layer.retain(|s| vf.get(t, &p.state_key(s)).is_some());
    layer
}
