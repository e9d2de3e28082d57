//! Polynomial functors, their truncated initial algebras, and relational
//! folds.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{check, compose, Carrier, FinRel, RelError, Value};

/// Default truncation depth of `μF`.
pub const DEFAULT_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Field {
    /// A value from a fixed carrier.
    Const(Arc<Carrier>),
    /// A recursive position.
    Rec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub name: String,
    pub fields: Vec<Field>,
}

/// A sum of products of constants and recursive positions, e.g. lists
/// `F X = 1 + A × X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorSpec {
    name: String,
    summands: Vec<Summand>,
}

impl FunctorSpec {
    pub fn new(name: &str, summands: Vec<Summand>) -> Result<Self, RelError> {
        if summands.is_empty() || summands.len() > usize::from(u8::MAX) {
            return Err(RelError::Functor(format!("{name} needs 1..=255 summands")));
        }
        if summands.iter().all(|s| s.fields.contains(&Field::Rec)) {
            return Err(RelError::Functor(format!("{name} has no base summand")));
        }
        Ok(Self {
            name: name.into(),
            summands,
        })
    }

    /// `F X = Nil | Cons(A, X)`.
    pub fn list(elems: &Arc<Carrier>) -> Self {
        Self::new(
            "L",
            alloc::vec![
                Summand {
                    name: "nil".into(),
                    fields: Vec::new(),
                },
                Summand {
                    name: "cons".into(),
                    fields: alloc::vec![Field::Const(Arc::clone(elems)), Field::Rec],
                },
            ],
        )
        .expect("list functor is well formed")
    }

    /// `F X = Leaf(A) | Node(X, X)`.
    pub fn tree(leaves: &Arc<Carrier>) -> Self {
        Self::new(
            "T",
            alloc::vec![
                Summand {
                    name: "leaf".into(),
                    fields: alloc::vec![Field::Const(Arc::clone(leaves))],
                },
                Summand {
                    name: "node".into(),
                    fields: alloc::vec![Field::Rec, Field::Rec],
                },
            ],
        )
        .expect("tree functor is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// Build the structure `summand(fields)`.
    pub fn structure(&self, summand: usize, fields: Vec<Value>) -> Value {
        Value::Tagged(summand as u8, fields)
    }

    fn structures(&self, x: &[Value]) -> BTreeSet<Value> {
        let mut out = BTreeSet::new();
        for (k, s) in self.summands.iter().enumerate() {
            let mut partial: Vec<Vec<Value>> = alloc::vec![Vec::new()];
            for field in &s.fields {
                let choices: Vec<Value> = match field {
                    Field::Const(c) => c.elems().cloned().collect(),
                    Field::Rec => x.to_vec(),
                };
                let mut next = Vec::with_capacity(partial.len() * choices.len());
                for p in &partial {
                    for c in &choices {
                        let mut q = p.clone();
                        q.push(c.clone());
                        next.push(q);
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|f| Value::Tagged(k as u8, f)));
        }
        out
    }

    /// The carrier `F(x)`.
    pub fn apply(&self, x: &Arc<Carrier>) -> Arc<Carrier> {
        let elems: Vec<Value> = x.elems().cloned().collect();
        Carrier::new(&format!("{}({})", self.name, x.name()), self.structures(&elems))
    }

    /// Structures of depth at most `depth` (base summands have depth 1).
    pub fn mu(&self, depth: usize) -> Arc<Carrier> {
        let mut level: BTreeSet<Value> = BTreeSet::new();
        for _ in 0..depth {
            let elems: Vec<Value> = level.iter().cloned().collect();
            level = self.structures(&elems);
        }
        Carrier::new(&format!("mu{}@{depth}", self.name), level)
    }

    /// `F(r)`: relates structures of the same summand whose constant fields
    /// agree and whose recursive fields are related by `r`.
    pub fn lift(&self, r: &FinRel) -> FinRel {
        let src = self.apply(r.source());
        let tgt = self.apply(r.target());
        let next = r.successors();
        let mut pairs = BTreeSet::new();
        for u in src.elems() {
            let Value::Tagged(k, fields) = u else { continue };
            let mut partial: Vec<Vec<Value>> = alloc::vec![Vec::new()];
            for (field, v) in self.summands[usize::from(*k)].fields.iter().zip(fields) {
                let choices: Vec<Value> = match field {
                    Field::Const(_) => alloc::vec![v.clone()],
                    Field::Rec => next
                        .get(v)
                        .map(|ys| ys.iter().map(|y| (*y).clone()).collect())
                        .unwrap_or_default(),
                };
                let mut grown = Vec::new();
                for p in &partial {
                    for c in &choices {
                        let mut q = p.clone();
                        q.push(c.clone());
                        grown.push(q);
                    }
                }
                partial = grown;
            }
            for f in partial {
                pairs.insert((u.clone(), Value::Tagged(*k, f)));
            }
        }
        FinRel::raw(&src, &tgt, pairs)
    }

    /// `in°` on the depth-`depth` carrier: each structure to itself, viewed
    /// as an element of `F(μF)`.
    pub fn unwrap_rel(&self, depth: usize) -> FinRel {
        let mu = self.mu(depth);
        let fmu = self.apply(&mu);
        FinRel::raw(&mu, &fmu, mu.elems().map(|t| (t.clone(), t.clone())).collect())
    }
}

/// `⦇s⦈` over `μF` truncated at `depth`: the least `x` with
/// `x = s·F(x)·in°`, by saturation from the empty relation.
pub fn rel_fold(s: &FinRel, f: &FunctorSpec, depth: usize, cap: usize) -> Result<FinRel, RelError> {
    let fb = f.apply(s.target());
    check("fold", s.source(), &fb)?;
    let unwrap = f.unwrap_rel(depth);
    let mut x = FinRel::empty(unwrap.source(), s.target());
    for _ in 0..cap {
        let next = compose(&compose(s, &f.lift(&x))?, &unwrap)?;
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Err(RelError::Cap(cap))
}
