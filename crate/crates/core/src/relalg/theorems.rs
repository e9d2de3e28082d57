//! Executable checks of the greedy and dynamic-programming inclusion
//! theorems over finite relations.

use super::{compose, converse, dom, functor::FunctorSpec, rel_fold, shrink, FinRel, RelError, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyReport {
    pub transitive: bool,
    /// `s·F(r°) ⊆ r°·s`.
    pub monotone: bool,
    /// `⦇s↾r⦈ ⊆ ⦇s⦈↾r`.
    pub inclusion: bool,
    /// A pair of the left side missing from the right side.
    pub violation: Option<(Value, Value)>,
    pub lhs: FinRel,
    pub rhs: FinRel,
}

impl GreedyReport {
    pub fn preconditions(&self) -> bool {
        self.transitive && self.monotone
    }

    /// The inclusion failed although the preconditions held.
    pub fn violated(&self) -> bool {
        self.preconditions() && !self.inclusion
    }
}

pub fn verify_greedy_theorem(s: &FinRel, r: &FinRel, f: &FunctorSpec, depth: usize) -> Result<GreedyReport, RelError> {
    let cap = super::DEFAULT_CAP;
    let transitive = r.is_transitive()?;
    let rc = converse(r);
    let monotone = compose(s, &f.lift(&rc))?.is_subset(&compose(&rc, s)?)?;
    let lhs = rel_fold(&shrink(s, r)?, f, depth, cap)?;
    let rhs = shrink(&rel_fold(s, f, depth, cap)?, r)?;
    let inclusion = lhs.is_subset(&rhs)?;
    Ok(GreedyReport {
        transitive,
        monotone,
        inclusion,
        violation: lhs.witness_outside(&rhs),
        lhs,
        rhs,
    })
}

/// Result of Kleene iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Lfp {
    pub relation: FinRel,
    pub iterations: usize,
    pub converged: bool,
}

/// `X₀ = ∅`, `X_{k+1} = (s·F(X_k)·t°)↾r`, stopping at the first repeat or
/// after `cap` steps.
pub fn lfp_dp(s: &FinRel, t: &FinRel, r: &FinRel, f: &FunctorSpec, cap: usize) -> Result<Lfp, RelError> {
    super::check("lfp", t.source(), &f.apply(t.target()))?;
    let tc = converse(t);
    let mut x = FinRel::empty(t.target(), s.target());
    for k in 0..cap {
        let next = shrink(&compose(&compose(s, &f.lift(&x))?, &tc)?, r)?;
        if next == x {
            return Ok(Lfp {
                relation: x,
                iterations: k + 1,
                converged: true,
            });
        }
        x = next;
    }
    Ok(Lfp {
        relation: x,
        iterations: cap,
        converged: false,
    })
}

/// Which monotonicity condition gates the dynamic-programming check.
///
/// With pairs read as "target at least as good as source", the inclusion
/// follows from `s·F(r°) ⊆ r°·s` (the same form the greedy check uses).
/// The condition as usually quoted for this theorem, `s·F(r) ⊆ r·s`, does
/// not imply it; random instances satisfying only that form do violate the
/// inclusion. Both are computed; the reading picks the gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reading {
    #[default]
    Converse,
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpReport {
    pub reading: Reading,
    pub transitive: bool,
    /// `s·F(r°) ⊆ r°·s`.
    pub monotone_converse: bool,
    /// `s·F(r) ⊆ r·s`.
    pub monotone_literal: bool,
    /// `dom(t) ⊆ dom(s·F(m))`.
    pub domain: bool,
    /// `m` is unchanged one truncation level deeper.
    pub depth_stable: bool,
    pub m: FinRel,
    pub lfp: Lfp,
    /// `lfp ⊆ m`; meaningful only when the iteration converged.
    pub inclusion: bool,
    pub violation: Option<(Value, Value)>,
}

impl DpReport {
    pub fn monotone(&self) -> bool {
        match self.reading {
            Reading::Converse => self.monotone_converse,
            Reading::Literal => self.monotone_literal,
        }
    }

    pub fn preconditions(&self) -> bool {
        self.monotone() && self.domain
    }

    /// The verdict cannot be trusted: a precondition failed, the iteration
    /// did not converge, or the truncation was too shallow.
    pub fn inconclusive(&self) -> bool {
        !self.preconditions() || !self.lfp.converged || !self.depth_stable
    }

    pub fn violated(&self) -> bool {
        !self.inconclusive() && !self.inclusion
    }
}

fn m_at(s: &FinRel, t: &FinRel, r: &FinRel, f: &FunctorSpec, depth: usize) -> Result<FinRel, RelError> {
    let cap = super::DEFAULT_CAP;
    let fs = rel_fold(s, f, depth, cap)?;
    let ft = rel_fold(t, f, depth, cap)?;
    shrink(&compose(&fs, &converse(&ft))?, r)
}

pub fn verify_dp_theorem(
    s: &FinRel,
    t: &FinRel,
    r: &FinRel,
    f: &FunctorSpec,
    depth: usize,
    cap: usize,
    reading: Reading,
) -> Result<DpReport, RelError> {
    let transitive = r.is_transitive()?;
    let monotone_literal = compose(s, &f.lift(r))?.is_subset(&compose(r, s)?)?;
    let rc = converse(r);
    let monotone_converse = compose(s, &f.lift(&rc))?.is_subset(&compose(&rc, s)?)?;
    let m = m_at(s, t, r, f, depth)?;
    let depth_stable = m == m_at(s, t, r, f, depth + 1)?;
    let domain = dom(t).is_subset(&dom(&compose(s, &f.lift(&m))?))?;
    let lfp = lfp_dp(s, t, r, f, cap)?;
    let inclusion = lfp.relation.is_subset(&m)?;
    let violation = lfp.relation.witness_outside(&m);
    Ok(DpReport {
        reading,
        transitive,
        monotone_converse,
        monotone_literal,
        domain,
        depth_stable,
        m,
        lfp,
        inclusion,
        violation,
    })
}
