//! Canonical tokens for small metagraphs.
//!
//! Vertices are atoms plus dangling slots. Colors are refined from vertex
//! labels and ordered target positions, then ties are broken by
//! individualizing each member of the first non-trivial color class in turn
//! (skipping members related by a transposition automorphism). The token is
//! the lexicographically smallest encoding over all leaves of that search.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{MgError, Target, TypedMetagraph};

/// Largest atom count `canonical_form` accepts.
pub const CANONICAL_ATOM_LIMIT: usize = 12;

struct Graph {
    labels: Vec<String>,
    /// Ordered out-targets (vertex indices); empty for nodes and slots.
    out: Vec<Vec<usize>>,
    /// (position, source) pairs, sorted.
    inc: Vec<Vec<(usize, usize)>>,
    is_slot: Vec<bool>,
}

fn fmt_opt_tv(tv: Option<crate::tv::TruthValue>) -> String {
    match tv {
        Some(tv) => format!("{:?}/{:?}", tv.strength(), tv.confidence()),
        None => String::from("-"),
    }
}

fn build(mg: &TypedMetagraph) -> Graph {
    let mut index = BTreeMap::new();
    let mut labels = Vec::new();
    let mut is_slot = Vec::new();
    for a in mg.atoms() {
        index.insert(Target::Atom(a.id()), labels.len());
        labels.push(format!(
            "{}:{}:{}:{}:{:?}:{:?}:{}",
            a.kind().as_str(),
            a.type_label(),
            a.name().unwrap_or("-"),
            fmt_opt_tv(a.tv()),
            a.sti(),
            a.lti(),
            a.targets().len()
        ));
        is_slot.push(false);
    }
    for d in mg.dangling() {
        index.insert(Target::Slot(d.slot), labels.len());
        labels.push(format!("slot:{}", d.type_label));
        is_slot.push(true);
    }
    let n = labels.len();
    let mut out = alloc::vec![Vec::new(); n];
    let mut inc = alloc::vec![Vec::new(); n];
    for a in mg.atoms() {
        let v = index[&Target::Atom(a.id())];
        for (pos, t) in a.targets().iter().enumerate() {
            let w = index[t];
            out[v].push(w);
            inc[w].push((pos, v));
        }
    }
    for l in inc.iter_mut() {
        l.sort_unstable();
    }
    Graph {
        labels,
        out,
        inc,
        is_slot,
    }
}

/// Re-rank arbitrary ordered keys into dense colors 0..k.
fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap_or(0)).collect()
}

type RefineKey = (usize, Vec<usize>, Vec<(usize, usize)>);

fn refine(g: &Graph, mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let count = distinct(&colors);
        let keys: Vec<RefineKey> = (0..colors.len())
            .map(|v| {
                let outs = g.out[v].iter().map(|w| colors[*w]).collect();
                let mut ins: Vec<(usize, usize)> = g.inc[v].iter().map(|(p, s)| (*p, colors[*s])).collect();
                ins.sort_unstable();
                (colors[v], outs, ins)
            })
            .collect();
        let next = rank(&keys);
        if distinct(&next) == count {
            return next;
        }
        colors = next;
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn encode(g: &Graph, colors: &[usize]) -> String {
    let mut order: Vec<usize> = (0..colors.len()).collect();
    order.sort_by_key(|v| colors[*v]);
    let mut pos = alloc::vec![0usize; colors.len()];
    for (p, v) in order.iter().enumerate() {
        pos[*v] = p;
    }
    let mut s = String::from("MG(");
    for (i, v) in order.iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        s.push_str(&g.labels[*v]);
        if !g.is_slot[*v] {
            s.push('[');
            for (j, w) in g.out[*v].iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str(&format!("{}", pos[*w]));
            }
            s.push(']');
        }
    }
    s.push(')');
    s
}

fn transposition_is_automorphism(g: &Graph, u: usize, v: usize) -> bool {
    let swap = |x: usize| {
        if x == u {
            v
        } else if x == v {
            u
        } else {
            x
        }
    };
    if g.labels[u] != g.labels[v] {
        return false;
    }
    (0..g.labels.len()).all(|x| {
        let y = swap(x);
        g.out[x].len() == g.out[y].len() && g.out[x].iter().zip(&g.out[y]).all(|(a, b)| swap(*a) == *b)
    })
}

fn search(g: &Graph, colors: Vec<usize>, best: &mut Option<String>) {
    let n = colors.len();
    // first non-singleton class, by color
    let mut counts = alloc::vec![0usize; n];
    for c in &colors {
        counts[*c] += 1;
    }
    let target = (0..n).find(|c| counts[*c] > 1);
    let Some(cell) = target else {
        let enc = encode(g, &colors);
        if best.as_ref().is_none_or(|b| enc < *b) {
            *best = Some(enc);
        }
        return;
    };
    let members: Vec<usize> = (0..n).filter(|v| colors[*v] == cell).collect();
    let mut tried: Vec<usize> = Vec::new();
    for &v in &members {
        if tried.iter().any(|u| transposition_is_automorphism(g, *u, v)) {
            continue;
        }
        tried.push(v);
        let keys: Vec<(usize, usize)> = (0..n)
            .map(|x| (colors[x], usize::from(!(x == v) && colors[x] == cell)))
            .collect();
        let split = refine(g, rank(&keys));
        search(g, split, best);
    }
}

pub(super) fn canonical_form(mg: &TypedMetagraph) -> Result<String, MgError> {
    if mg.len() > CANONICAL_ATOM_LIMIT || mg.dangling().len() > CANONICAL_ATOM_LIMIT {
        return Err(MgError::TooLarge {
            atoms: mg.len().max(mg.dangling().len()),
            limit: CANONICAL_ATOM_LIMIT,
        });
    }
    if mg.is_empty() && mg.dangling().is_empty() {
        return Ok(String::from("MG()"));
    }
    let g = build(mg);
    let initial = rank(&g.labels);
    let colors = refine(&g, initial);
    let mut best = None;
    search(&g, colors, &mut best);
    Ok(best.unwrap_or_else(|| String::from("MG()")))
}

#[cfg(test)]
mod tests {
    use super::super::{AtomId, AtomSpec};
    use super::*;

    #[test]
    fn empty_token() {
        assert_eq!(TypedMetagraph::new().canonical_form().unwrap(), "MG()");
    }

    #[test]
    fn ordered_targets_matter() {
        let mut a = TypedMetagraph::new();
        let x = a.add_atom(AtomSpec::node("C").named("x")).unwrap();
        let y = a.add_atom(AtomSpec::node("C").named("y")).unwrap();
        let mut b = a.clone();
        a.add_atom(AtomSpec::link("Path", &[x, y])).unwrap();
        b.add_atom(AtomSpec::link("Path", &[y, x])).unwrap();
        assert_ne!(a.canonical_form().unwrap(), b.canonical_form().unwrap());
    }

    #[test]
    fn symmetric_nodes_do_not_explode() {
        let mut a = TypedMetagraph::new();
        for _ in 0..12 {
            a.add_atom(AtomSpec::node("C")).unwrap();
        }
        assert!(a.canonical_form().unwrap().starts_with("MG("));
        a.add_atom(AtomSpec::node("C")).unwrap();
        assert!(matches!(a.canonical_form(), Err(MgError::TooLarge { .. })));
    }

    #[test]
    fn anonymous_edges_on_shared_vs_separate_nodes() {
        // two edges on one node vs. one edge on each of two nodes
        let mut shared = TypedMetagraph::new();
        let n = shared.add_atom(AtomSpec::node("C")).unwrap();
        shared.add_atom(AtomSpec::node("C")).unwrap();
        shared.add_atom(AtomSpec::link("E", &[n])).unwrap();
        shared.add_atom(AtomSpec::link("E", &[n])).unwrap();
        let mut split = TypedMetagraph::new();
        split.add_atom(AtomSpec::node("C")).unwrap();
        split.add_atom(AtomSpec::node("C")).unwrap();
        split.add_atom(AtomSpec::link("E", &[AtomId(0)])).unwrap();
        split.add_atom(AtomSpec::link("E", &[AtomId(1)])).unwrap();
        assert_ne!(shared.canonical_form().unwrap(), split.canonical_form().unwrap());
    }
}
