//! Finite relation algebra.
//!
//! A relation is stored as a set of `(source, target)` pairs between two
//! named carriers. Composition follows the point-free convention:
//! `compose(r, s)` is `r·s`, which applies `s` first. For an optimality
//! relation `R` on outputs, a pair `(x, y) ∈ R` reads "`y` is at least as
//! good as `x`", so `shrink(s, r)` keeps the outputs that are at least as
//! good as every alternative.

mod expr;
mod functor;
mod random;
mod theorems;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

pub use expr::{rel_eval, Env, Expr, Outcome};
pub use functor::{rel_fold, Field, FunctorSpec, Summand, DEFAULT_DEPTH};
pub use random::{
    coin_change_fixture, counterexample_search, dp_suite, greedy_suite, list_sum_fixture, random_dp_instance,
    random_greedy_instance, CoinChange, DpInstance, GreedyInstance, ListSum, SuiteReport,
};
pub use theorems::{lfp_dp, verify_dp_theorem, verify_greedy_theorem, DpReport, GreedyReport, Lfp, Reading};

/// Default iteration cap for saturation and Kleene iteration.
pub const DEFAULT_CAP: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelError {
    #[error("{op}: carrier {left} does not match {right}")]
    CarrierMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
    #[error("value {value} is not in carrier {carrier}")]
    NotInCarrier { value: String, carrier: String },
    #[error("unknown name {0}")]
    Unknown(String),
    #[error("no fixed point within {0} iterations")]
    Cap(usize),
    #[error("expected {expected}, got {found}")]
    Kind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("expression uses a functor but none is configured")]
    NoFunctor,
    #[error("invalid functor: {0}")]
    Functor(String),
}

/// Elements of carriers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Sym(String),
    /// A functor structure: summand index and field values.
    Tagged(u8, Vec<Value>),
}

impl Value {
    pub fn sym(s: &str) -> Self {
        Value::Sym(s.into())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => write!(f, "{s}"),
            Value::Tagged(k, fields) => {
                write!(f, "#{k}(")?;
                for (i, v) in fields.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Sym(s.into())
    }
}

/// A named finite set of values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier {
    name: String,
    elems: BTreeSet<Value>,
}

impl Carrier {
    pub fn new(name: &str, elems: impl IntoIterator<Item = Value>) -> Arc<Self> {
        Arc::new(Self {
            name: name.into(),
            elems: elems.into_iter().collect(),
        })
    }

    pub fn ints(name: &str, range: core::ops::Range<i64>) -> Arc<Self> {
        Self::new(name, range.map(Value::Int))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elems(&self) -> impl Iterator<Item = &Value> + '_ {
        self.elems.iter()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.elems.contains(v)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

fn same(a: &Arc<Carrier>, b: &Arc<Carrier>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check(op: &'static str, a: &Arc<Carrier>, b: &Arc<Carrier>) -> Result<(), RelError> {
    if same(a, b) {
        Ok(())
    } else {
        Err(RelError::CarrierMismatch {
            op,
            left: a.name.clone(),
            right: b.name.clone(),
        })
    }
}

/// A relation between two carriers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinRel {
    source: Arc<Carrier>,
    target: Arc<Carrier>,
    pairs: BTreeSet<(Value, Value)>,
}

impl FinRel {
    pub fn new(
        source: &Arc<Carrier>,
        target: &Arc<Carrier>,
        pairs: impl IntoIterator<Item = (Value, Value)>,
    ) -> Result<Self, RelError> {
        let pairs: BTreeSet<(Value, Value)> = pairs.into_iter().collect();
        for (a, b) in &pairs {
            if !source.contains(a) {
                return Err(RelError::NotInCarrier {
                    value: format!("{a}"),
                    carrier: source.name.clone(),
                });
            }
            if !target.contains(b) {
                return Err(RelError::NotInCarrier {
                    value: format!("{b}"),
                    carrier: target.name.clone(),
                });
            }
        }
        Ok(Self {
            source: Arc::clone(source),
            target: Arc::clone(target),
            pairs,
        })
    }

    pub(crate) fn raw(source: &Arc<Carrier>, target: &Arc<Carrier>, pairs: BTreeSet<(Value, Value)>) -> Self {
        Self {
            source: Arc::clone(source),
            target: Arc::clone(target),
            pairs,
        }
    }

    pub fn empty(source: &Arc<Carrier>, target: &Arc<Carrier>) -> Self {
        Self::raw(source, target, BTreeSet::new())
    }

    pub fn full(source: &Arc<Carrier>, target: &Arc<Carrier>) -> Self {
        let pairs = source
            .elems()
            .flat_map(|a| target.elems().map(move |b| (a.clone(), b.clone())))
            .collect();
        Self::raw(source, target, pairs)
    }

    pub fn identity(c: &Arc<Carrier>) -> Self {
        Self::raw(c, c, c.elems().map(|a| (a.clone(), a.clone())).collect())
    }

    pub fn source(&self) -> &Arc<Carrier> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Carrier> {
        &self.target
    }

    pub fn pairs(&self) -> &BTreeSet<(Value, Value)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: &Value, b: &Value) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    /// Targets related to `a`.
    pub fn image(&self, a: &Value) -> impl Iterator<Item = &Value> + '_ {
        let lo = (a.clone(), Value::Int(i64::MIN));
        let a = a.clone();
        self.pairs.range(lo..).take_while(move |(x, _)| *x == a).map(|(_, y)| y)
    }

    pub(crate) fn successors(&self) -> BTreeMap<&Value, Vec<&Value>> {
        let mut m: BTreeMap<&Value, Vec<&Value>> = BTreeMap::new();
        for (a, b) in &self.pairs {
            m.entry(a).or_default().push(b);
        }
        m
    }

    pub fn insert(&mut self, a: Value, b: Value) -> Result<bool, RelError> {
        if !self.source.contains(&a) || !self.target.contains(&b) {
            return Err(RelError::NotInCarrier {
                value: format!("({a}, {b})"),
                carrier: format!("{} × {}", self.source.name, self.target.name),
            });
        }
        Ok(self.pairs.insert((a, b)))
    }

    /// Every source has at most one target.
    pub fn is_simple(&self) -> bool {
        self.pairs
            .iter()
            .zip(self.pairs.iter().skip(1))
            .all(|(p, q)| p.0 != q.0)
    }

    pub fn is_transitive(&self) -> Result<bool, RelError> {
        compose(self, self)?.is_subset(self)
    }

    pub fn is_subset(&self, other: &FinRel) -> Result<bool, RelError> {
        check("subset", &self.source, &other.source)?;
        check("subset", &self.target, &other.target)?;
        Ok(self.pairs.is_subset(&other.pairs))
    }

    /// Some pair of `self` missing from `other`.
    pub fn witness_outside(&self, other: &FinRel) -> Option<(Value, Value)> {
        self.pairs.difference(&other.pairs).next().cloned()
    }
}

pub fn converse(r: &FinRel) -> FinRel {
    FinRel::raw(
        &r.target,
        &r.source,
        r.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
    )
}

/// `r·s`: first `s`, then `r`.
pub fn compose(r: &FinRel, s: &FinRel) -> Result<FinRel, RelError> {
    check("compose", &s.target, &r.source)?;
    let next = r.successors();
    let mut pairs = BTreeSet::new();
    for (a, b) in &s.pairs {
        if let Some(cs) = next.get(b) {
            for c in cs {
                pairs.insert((a.clone(), (*c).clone()));
            }
        }
    }
    Ok(FinRel::raw(&s.source, &r.target, pairs))
}

/// Diagrammatic composition: first `s`, then `r` (same as `compose(r, s)`).
pub fn then(s: &FinRel, r: &FinRel) -> Result<FinRel, RelError> {
    compose(r, s)
}

pub fn meet(r: &FinRel, s: &FinRel) -> Result<FinRel, RelError> {
    check("meet", &r.source, &s.source)?;
    check("meet", &r.target, &s.target)?;
    Ok(FinRel::raw(
        &r.source,
        &r.target,
        r.pairs.intersection(&s.pairs).cloned().collect(),
    ))
}

pub fn union(r: &FinRel, s: &FinRel) -> Result<FinRel, RelError> {
    check("union", &r.source, &s.source)?;
    check("union", &r.target, &s.target)?;
    Ok(FinRel::raw(
        &r.source,
        &r.target,
        r.pairs.union(&s.pairs).cloned().collect(),
    ))
}

/// `r / s`, the largest `x` with `x·s ⊆ r`: `(a, c)` belongs to it iff every
/// `b` with `(b, a) ∈ s` has `(b, c) ∈ r`.
pub fn residual(r: &FinRel, s: &FinRel) -> Result<FinRel, RelError> {
    check("residual", &r.source, &s.source)?;
    let mut pre: BTreeMap<&Value, Vec<&Value>> = BTreeMap::new();
    for (b, a) in &s.pairs {
        pre.entry(a).or_default().push(b);
    }
    let mut pairs = BTreeSet::new();
    for a in s.target.elems() {
        let bs = pre.get(a).map(Vec::as_slice).unwrap_or(&[]);
        for c in r.target.elems() {
            if bs.iter().all(|b| r.pairs.contains(&((*b).clone(), c.clone()))) {
                pairs.insert((a.clone(), c.clone()));
            }
        }
    }
    Ok(FinRel::raw(&s.target, &r.target, pairs))
}

/// `s ↾ r = s ∩ r / s°`.
pub fn shrink(s: &FinRel, r: &FinRel) -> Result<FinRel, RelError> {
    check("shrink", &r.source, &s.target)?;
    check("shrink", &r.target, &s.target)?;
    meet(s, &residual(r, &converse(s))?)
}

/// Domain of `r` as a coreflexive relation on its source carrier.
pub fn dom(r: &FinRel) -> FinRel {
    FinRel::raw(
        &r.source,
        &r.source,
        r.pairs.iter().map(|(a, _)| (a.clone(), a.clone())).collect(),
    )
}

#[cfg(test)]
mod tests;
