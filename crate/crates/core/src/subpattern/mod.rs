//! Simplicity measures, mutual-associativity audits, subpattern dags and
//! alignment between decision-process traces and those dags.
//!
//! Mutual associativity of a family of binary operations is checked as the
//! interchange identity `C_i(C_j(x, y), z) = C_j(x, C_i(y, z))` for every
//! ordered pair `(i, j)`, each operation paired with itself included.

mod align;
mod dag;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use thiserror::Error;

use crate::rng;

pub use align::{alignment_score, subproblem_trace, Alignment};
pub use dag::{build_subpattern_dag, DagEdge, SimplicityMeasure, SubpatternDag};

/// Domains up to this size are audited exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Counterexamples kept per operator pair.
pub const MAX_WITNESSES: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubError {
    #[error("trials must be at least 1")]
    Trials,
    #[error("domain is empty")]
    EmptyDomain,
    #[error("trace vertex {0} has no mapped item")]
    Unmapped(String),
    #[error("edge {parent} -> {child} via {op} fails: {reason}")]
    BadEdge {
        parent: usize,
        child: usize,
        op: String,
        reason: String,
    },
    #[error("unknown operation {0}")]
    UnknownOp(String),
}

type OpFn<T> = dyn Fn(&T, &T) -> Option<T> + Send + Sync;

/// A named, possibly partial, binary operation.
#[derive(Clone)]
pub struct BinOp<T> {
    name: String,
    f: Arc<OpFn<T>>,
}

impl<T> fmt::Debug for BinOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinOp({})", self.name)
    }
}

impl<T> BinOp<T> {
    pub fn new<F>(name: &str, f: F) -> Self
    where
        F: Fn(&T, &T) -> Option<T> + Send + Sync + 'static,
    {
        Self {
            name: String::from(name),
            f: Arc::new(f),
        }
    }

    pub fn total<F>(name: &str, f: F) -> Self
    where
        F: Fn(&T, &T) -> T + Send + Sync + 'static,
    {
        Self::new(name, move |a, b| Some(f(a, b)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, a: &T, b: &T) -> Option<T> {
        (self.f)(a, b)
    }
}

/// `x, y, z` with both sides of the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub lhs: T,
    pub rhs: T,
}

/// Result for one ordered pair: `outer` is `C_i`, `inner` is `C_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport<T> {
    pub outer: String,
    pub inner: String,
    pub checked: usize,
    /// Triples where some application was undefined; not failures.
    pub undefined: usize,
    pub failures: usize,
    pub witnesses: Vec<Witness<T>>,
}

impl<T> PairReport<T> {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport<T> {
    pub exhaustive: bool,
    pub pairs: Vec<PairReport<T>>,
}

impl<T> AuditReport<T> {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(PairReport::passed)
    }

    pub fn pair(&self, outer: &str, inner: &str) -> Option<&PairReport<T>> {
        self.pairs.iter().find(|p| p.outer == outer && p.inner == inner)
    }
}

fn check_triple<T: Clone, E: Fn(&T, &T) -> bool>(
    ci: &BinOp<T>,
    cj: &BinOp<T>,
    (x, y, z): (&T, &T, &T),
    eq: &E,
    rep: &mut PairReport<T>,
) {
    let lhs = cj.apply(x, y).and_then(|xy| ci.apply(&xy, z));
    let rhs = ci.apply(y, z).and_then(|yz| cj.apply(x, &yz));
    match (lhs, rhs) {
        (Some(l), Some(r)) => {
            rep.checked += 1;
            if !eq(&l, &r) {
                rep.failures += 1;
                if rep.witnesses.len() < MAX_WITNESSES {
                    rep.witnesses.push(Witness {
                        x: x.clone(),
                        y: y.clone(),
                        z: z.clone(),
                        lhs: l,
                        rhs: r,
                    });
                }
            }
        }
        _ => rep.undefined += 1,
    }
}

fn audit<T: Clone, E: Fn(&T, &T) -> bool>(
    ops: &[BinOp<T>],
    domain: &[T],
    trials: usize,
    seed: u64,
    eq: E,
    force_sampled: bool,
) -> Result<AuditReport<T>, SubError> {
    if trials == 0 {
        return Err(SubError::Trials);
    }
    if domain.is_empty() {
        return Err(SubError::EmptyDomain);
    }
    let exhaustive = !force_sampled && domain.len() <= EXHAUSTIVE_LIMIT;
    let mut pairs = Vec::new();
    for (i, ci) in ops.iter().enumerate() {
        for (j, cj) in ops.iter().enumerate() {
            let mut rep = PairReport {
                outer: String::from(ci.name()),
                inner: String::from(cj.name()),
                checked: 0,
                undefined: 0,
                failures: 0,
                witnesses: Vec::new(),
            };
            if exhaustive {
                for x in domain {
                    for y in domain {
                        for z in domain {
                            check_triple(ci, cj, (x, y, z), &eq, &mut rep);
                        }
                    }
                }
            } else {
                let mut r = rng::seeded(rng::derive_seed(seed, &alloc::format!("{i}/{j}")));
                for _ in 0..trials {
                    let x = &domain[r.gen_range(0..domain.len())];
                    let y = &domain[r.gen_range(0..domain.len())];
                    let z = &domain[r.gen_range(0..domain.len())];
                    check_triple(ci, cj, (x, y, z), &eq, &mut rep);
                }
            }
            pairs.push(rep);
        }
    }
    Ok(AuditReport { exhaustive, pairs })
}

/// Audit every ordered pair of `ops`. Domains of at most
/// [`EXHAUSTIVE_LIMIT`] elements are checked on every triple; larger ones
/// on `trials` seeded random triples per pair.
pub fn check_mutual_associativity<T: Clone + PartialEq>(
    ops: &[BinOp<T>],
    domain: &[T],
    trials: usize,
    seed: u64,
) -> Result<AuditReport<T>, SubError> {
    audit(ops, domain, trials, seed, |a: &T, b: &T| a == b, false)
}

/// As [`check_mutual_associativity`], comparing results with `eq`.
pub fn check_mutual_associativity_by<T: Clone, E: Fn(&T, &T) -> bool>(
    ops: &[BinOp<T>],
    domain: &[T],
    trials: usize,
    seed: u64,
    eq: E,
) -> Result<AuditReport<T>, SubError> {
    audit(ops, domain, trials, seed, eq, false)
}

/// Always samples, whatever the domain size.
pub fn check_mutual_associativity_sampled<T: Clone + PartialEq>(
    ops: &[BinOp<T>],
    domain: &[T],
    trials: usize,
    seed: u64,
) -> Result<AuditReport<T>, SubError> {
    audit(ops, domain, trials, seed, |a: &T, b: &T| a == b, true)
}

/// Union of two disjoint blocks; undefined when they overlap.
pub fn block_union() -> BinOp<BTreeSet<usize>> {
    BinOp::new("union", |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
        a.is_disjoint(b).then(|| a.union(b).copied().collect())
    })
}

/// Every nonempty subset of `0..n`.
pub fn nonempty_subsets(n: usize) -> Vec<BTreeSet<usize>> {
    (1u32..(1u32 << n))
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// String concatenation.
pub fn concat() -> BinOp<String> {
    BinOp::total("concat", |a: &String, b: &String| {
        let mut s = a.clone();
        s.push_str(b);
        s
    })
}

/// `double(y, unit) = y·y`, defined only when the second argument is the
/// empty string.
pub fn double() -> BinOp<String> {
    BinOp::new("double", |a: &String, b: &String| {
        b.is_empty().then(|| {
            let mut s = a.clone();
            s.push_str(a);
            s
        })
    })
}

/// Look up the built-in string operations by name.
pub fn string_op(name: &str) -> Result<BinOp<String>, SubError> {
    match name {
        "concat" => Ok(concat()),
        "double" => Ok(double()),
        _ => Err(SubError::UnknownOp(String::from(name))),
    }
}

#[cfg(test)]
mod tests;
