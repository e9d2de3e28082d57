use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::{BinOp, SubError};

type Sigma<T> = dyn Fn(&T) -> f64 + Send + Sync;
type SigmaStar<T> = dyn Fn(&str, &T, &T) -> f64 + Send + Sync;

/// `σ` on items and `σ*` on `(operation, y, z)`.
#[derive(Clone)]
pub struct SimplicityMeasure<T> {
    sigma: Arc<Sigma<T>>,
    sigma_star: Arc<SigmaStar<T>>,
}

impl<T> fmt::Debug for SimplicityMeasure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SimplicityMeasure")
    }
}

impl<T> SimplicityMeasure<T> {
    pub fn new<S, R>(sigma: S, sigma_star: R) -> Self
    where
        S: Fn(&T) -> f64 + Send + Sync + 'static,
        R: Fn(&str, &T, &T) -> f64 + Send + Sync + 'static,
    {
        Self {
            sigma: Arc::new(sigma),
            sigma_star: Arc::new(sigma_star),
        }
    }

    pub fn sigma(&self, x: &T) -> f64 {
        (self.sigma)(x)
    }

    pub fn sigma_star(&self, op: &str, y: &T, z: &T) -> f64 {
        (self.sigma_star)(op, y, z)
    }
}

impl SimplicityMeasure<String> {
    /// `σ` = character count, constant `σ*`.
    pub fn length(star: f64) -> Self {
        Self::new(|s: &String| s.chars().count() as f64, move |_, _, _| star)
    }
}

impl SimplicityMeasure<BTreeSet<usize>> {
    /// `σ(B)` = number of unordered pairs inside `B`, constant `σ*`.
    pub fn pair_count(star: f64) -> Self {
        Self::new(
            |b: &BTreeSet<usize>| {
                let n = b.len() as f64;
                n * (n - 1.0) / 2.0
            },
            move |_, _, _| star,
        )
    }
}

/// `parent = op(child, other)` with `σ(child) + σ(other) + σ*(op, child,
/// other) < σ(parent)`. Indices refer to [`SubpatternDag::items`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DagEdge {
    pub parent: usize,
    pub child: usize,
    pub op: String,
    pub other: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubpatternDag<T> {
    pub items: Vec<T>,
    pub edges: Vec<DagEdge>,
}

impl<T: Ord> SubpatternDag<T> {
    pub fn index_of(&self, item: &T) -> Option<usize> {
        self.items.iter().position(|x| x == item)
    }

    /// Re-evaluate every stored witness.
    pub fn verify(&self, ops: &[BinOp<T>], sm: &SimplicityMeasure<T>) -> Result<(), SubError> {
        for e in &self.edges {
            let bad = |reason: String| SubError::BadEdge {
                parent: e.parent,
                child: e.child,
                op: e.op.clone(),
                reason,
            };
            let n = self.items.len();
            if e.parent >= n || e.child >= n || e.other >= n {
                return Err(bad(String::from("index out of range")));
            }
            let op = ops
                .iter()
                .find(|o| o.name() == e.op)
                .ok_or_else(|| SubError::UnknownOp(e.op.clone()))?;
            let (x, y, z) = (&self.items[e.parent], &self.items[e.child], &self.items[e.other]);
            match op.apply(y, z) {
                Some(v) if v == *x => {}
                _ => return Err(bad(String::from("operation does not rebuild the parent"))),
            }
            let lhs = sm.sigma(y) + sm.sigma(z) + sm.sigma_star(&e.op, y, z);
            if lhs.partial_cmp(&sm.sigma(x)) != Some(core::cmp::Ordering::Less) {
                return Err(bad(format!("{lhs} is not below {}", sm.sigma(x))));
            }
        }
        Ok(())
    }
}

impl<T> SubpatternDag<T> {
    fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = alloc::vec![BTreeSet::new(); self.items.len()];
        for e in &self.edges {
            adj[e.parent].insert(e.child);
        }
        adj
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm
        let adj = self.adjacency();
        let mut indeg = alloc::vec![0usize; self.items.len()];
        for outs in &adj {
            for c in outs {
                indeg[*c] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..indeg.len()).filter(|i| indeg[*i] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for c in &adj[v] {
                indeg[*c] -= 1;
                if indeg[*c] == 0 {
                    ready.push(*c);
                }
            }
        }
        seen == self.items.len()
    }

    /// True when a path of one or more edges leads from `from` to `to`.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let adj = self.adjacency();
        let mut stack: Vec<usize> = adj.get(from).map_or(Vec::new(), |s| s.iter().copied().collect());
        let mut seen = BTreeSet::new();
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if seen.insert(v) {
                stack.extend(adj[v].iter().copied());
            }
        }
        false
    }
}

/// Every edge whose witness satisfies both conditions, over all ordered
/// item pairs and operations. Duplicate items are merged.
pub fn build_subpattern_dag<T: Clone + Ord>(
    items: &[T],
    ops: &[BinOp<T>],
    sm: &SimplicityMeasure<T>,
) -> SubpatternDag<T> {
    let mut uniq: Vec<T> = Vec::new();
    let mut index: BTreeMap<T, usize> = BTreeMap::new();
    for it in items {
        if !index.contains_key(it) {
            index.insert(it.clone(), uniq.len());
            uniq.push(it.clone());
        }
    }
    let sig: Vec<f64> = uniq.iter().map(|x| sm.sigma(x)).collect();
    let mut edges = BTreeSet::new();
    for (yi, y) in uniq.iter().enumerate() {
        for (zi, z) in uniq.iter().enumerate() {
            for op in ops {
                let Some(x) = op.apply(y, z) else { continue };
                let Some(&xi) = index.get(&x) else { continue };
                if sig[yi] + sig[zi] + sm.sigma_star(op.name(), y, z) < sig[xi] {
                    edges.insert(DagEdge {
                        parent: xi,
                        child: yi,
                        op: String::from(op.name()),
                        other: zi,
                    });
                }
            }
        }
    }
    SubpatternDag {
        items: uniq,
        edges: edges.into_iter().collect(),
    }
}
