//! A small expression language over named relations.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;

use super::{
    compose, converse, dom, functor::FunctorSpec, meet, rel_fold, residual, shrink, union, Carrier, FinRel, RelError,
    DEFAULT_CAP,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Rel(String),
    /// Identity on a named carrier.
    Id(String),
    Converse(Box<Expr>),
    /// `a·b` (apply `b` first).
    Compose(Box<Expr>, Box<Expr>),
    Meet(Box<Expr>, Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    /// `F(a)` for the environment's functor.
    Lift(Box<Expr>),
    Dom(Box<Expr>),
    Residual(Box<Expr>, Box<Expr>),
    Shrink(Box<Expr>, Box<Expr>),
    /// `⦇a⦈` over the environment's truncated `μF`.
    Fold(Box<Expr>),
    Subset(Box<Expr>, Box<Expr>),
    Equal(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn rel(name: &str) -> Self {
        Expr::Rel(name.into())
    }
    pub fn id(carrier: &str) -> Self {
        Expr::Id(carrier.into())
    }
    pub fn converse(self) -> Self {
        Expr::Converse(Box::new(self))
    }
    pub fn compose(self, other: Expr) -> Self {
        Expr::Compose(Box::new(self), Box::new(other))
    }
    pub fn meet(self, other: Expr) -> Self {
        Expr::Meet(Box::new(self), Box::new(other))
    }
    pub fn union(self, other: Expr) -> Self {
        Expr::Union(Box::new(self), Box::new(other))
    }
    pub fn lift(self) -> Self {
        Expr::Lift(Box::new(self))
    }
    pub fn dom(self) -> Self {
        Expr::Dom(Box::new(self))
    }
    pub fn residual(self, other: Expr) -> Self {
        Expr::Residual(Box::new(self), Box::new(other))
    }
    pub fn shrink(self, other: Expr) -> Self {
        Expr::Shrink(Box::new(self), Box::new(other))
    }
    pub fn fold(self) -> Self {
        Expr::Fold(Box::new(self))
    }
    pub fn subset(self, other: Expr) -> Self {
        Expr::Subset(Box::new(self), Box::new(other))
    }
    pub fn equal(self, other: Expr) -> Self {
        Expr::Equal(Box::new(self), Box::new(other))
    }
}

/// Named carriers and relations, plus an optional functor for `Lift` and
/// `Fold`.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub carriers: BTreeMap<String, Arc<Carrier>>,
    pub relations: BTreeMap<String, FinRel>,
    pub functor: Option<(FunctorSpec, usize)>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_carrier(mut self, c: &Arc<Carrier>) -> Self {
        self.carriers.insert(c.name().into(), Arc::clone(c));
        self
    }

    pub fn with_relation(mut self, name: &str, r: FinRel) -> Self {
        self.relations.insert(name.into(), r);
        self
    }

    pub fn with_functor(mut self, f: FunctorSpec, depth: usize) -> Self {
        self.functor = Some((f, depth));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Rel(FinRel),
    Bool(bool),
}

impl Outcome {
    pub fn into_rel(self) -> Result<FinRel, RelError> {
        match self {
            Outcome::Rel(r) => Ok(r),
            Outcome::Bool(_) => Err(RelError::Kind {
                expected: "relation",
                found: "boolean",
            }),
        }
    }

    pub fn as_bool(&self) -> Result<bool, RelError> {
        match self {
            Outcome::Bool(b) => Ok(*b),
            Outcome::Rel(_) => Err(RelError::Kind {
                expected: "boolean",
                found: "relation",
            }),
        }
    }
}

fn rel(e: &Expr, env: &Env) -> Result<FinRel, RelError> {
    rel_eval(e, env)?.into_rel()
}

pub fn rel_eval(e: &Expr, env: &Env) -> Result<Outcome, RelError> {
    let functor = || env.functor.as_ref().ok_or(RelError::NoFunctor);
    Ok(Outcome::Rel(match e {
        Expr::Rel(name) => env
            .relations
            .get(name)
            .cloned()
            .ok_or_else(|| RelError::Unknown(name.clone()))?,
        Expr::Id(name) => FinRel::identity(env.carriers.get(name).ok_or_else(|| RelError::Unknown(name.clone()))?),
        Expr::Converse(a) => converse(&rel(a, env)?),
        Expr::Compose(a, b) => compose(&rel(a, env)?, &rel(b, env)?)?,
        Expr::Meet(a, b) => meet(&rel(a, env)?, &rel(b, env)?)?,
        Expr::Union(a, b) => union(&rel(a, env)?, &rel(b, env)?)?,
        Expr::Lift(a) => functor()?.0.lift(&rel(a, env)?),
        Expr::Dom(a) => dom(&rel(a, env)?),
        Expr::Residual(a, b) => residual(&rel(a, env)?, &rel(b, env)?)?,
        Expr::Shrink(a, b) => shrink(&rel(a, env)?, &rel(b, env)?)?,
        Expr::Fold(a) => {
            let (f, depth) = functor()?;
            rel_fold(&rel(a, env)?, f, *depth, DEFAULT_CAP)?
        }
        Expr::Subset(a, b) => return Ok(Outcome::Bool(rel(a, env)?.is_subset(&rel(b, env)?)?)),
        Expr::Equal(a, b) => {
            let (x, y) = (rel(a, env)?, rel(b, env)?);
            x.is_subset(&y)?;
            return Ok(Outcome::Bool(x == y));
        }
    }))
}
