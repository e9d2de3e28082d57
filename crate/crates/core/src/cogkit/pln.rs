//! Truth-value formulas, statements, and the rule set used by the chainers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::metagraph::{AtomSpec, Target, TypedMetagraph};
use crate::tv::{TruthValue, DEFAULT_K};

use super::CogError;

pub const IMPLICATION: &str = "Implication";
pub const EQUIVALENCE: &str = "Equivalence";

/// Strength assumed for a term with no truth value of its own.
pub const DEFAULT_PRIOR: f64 = 0.5;

/// Quadrature nodes used by [`cwig`].
pub const CWIG_PANELS: usize = 2048;

/// A term or a binary link between two terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    Term(String),
    Link { label: String, from: String, to: String },
}

impl Statement {
    pub fn term(name: &str) -> Self {
        Statement::Term(String::from(name))
    }

    pub fn implication(from: &str, to: &str) -> Self {
        Statement::Link {
            label: String::from(IMPLICATION),
            from: String::from(from),
            to: String::from(to),
        }
    }

    pub fn equivalence(a: &str, b: &str) -> Self {
        Statement::Link {
            label: String::from(EQUIVALENCE),
            from: String::from(a),
            to: String::from(b),
        }
    }

    fn as_implication(&self) -> Option<(&str, &str)> {
        match self {
            Statement::Link { label, from, to } if label == IMPLICATION => Some((from, to)),
            _ => None,
        }
    }

    fn terms(&self) -> Vec<&str> {
        match self {
            Statement::Term(t) => alloc::vec![t.as_str()],
            Statement::Link { from, to, .. } => alloc::vec![from.as_str(), to.as_str()],
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Term(t) => write!(f, "{t}"),
            Statement::Link { label, from, to } => write!(f, "{label}({from},{to})"),
        }
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

// Confidence is monotone in the count, so the smaller count is the
// smaller confidence; working in confidence avoids a lossy round trip.
fn with_conf(s: f64, c: f64) -> TruthValue {
    TruthValue::new(clamp01(s), c).unwrap_or(TruthValue::unknown())
}

fn min_conf(a: TruthValue, b: TruthValue) -> f64 {
    a.confidence().min(b.confidence())
}

/// `A→B, B→C ⊢ A→C` under independence. Strength is clamped to `[0,1]`;
/// count is the smaller premise count.
pub fn deduction(ab: TruthValue, bc: TruthValue, s_b: f64, s_c: f64) -> Result<TruthValue, CogError> {
    if s_b >= 1.0 {
        return Err(CogError::Singularity("deduction needs s_B < 1"));
    }
    let (sab, sbc) = (ab.strength(), bc.strength());
    let s = sab * sbc + (1.0 - sab) * (s_c - s_b * sbc) / (1.0 - s_b);
    Ok(with_conf(s, min_conf(ab, bc)))
}

/// `A→B ⊢ B→A` by Bayes' rule.
pub fn inversion(ab: TruthValue, s_a: f64, s_b: f64) -> Result<TruthValue, CogError> {
    if s_b <= 0.0 {
        return Err(CogError::Singularity("inversion needs s_B > 0"));
    }
    Ok(with_conf(ab.strength() * s_a / s_b, ab.confidence()))
}

/// `A→B, C→B ⊢ A→C`.
pub fn abduction(ab: TruthValue, cb: TruthValue, s_b: f64, s_c: f64) -> Result<TruthValue, CogError> {
    if s_b <= 0.0 || s_b >= 1.0 {
        return Err(CogError::Singularity("abduction needs 0 < s_B < 1"));
    }
    let (sab, scb) = (ab.strength(), cb.strength());
    let s = sab * scb * s_c / s_b + (1.0 - sab) * (1.0 - scb) * s_c / (1.0 - s_b);
    Ok(with_conf(s, min_conf(ab, cb)))
}

/// `B→A, B→C ⊢ A→C`.
pub fn induction(ba: TruthValue, bc: TruthValue, s_a: f64, s_b: f64, s_c: f64) -> Result<TruthValue, CogError> {
    if s_a <= 0.0 || s_b >= 1.0 {
        return Err(CogError::Singularity("induction needs s_A > 0 and s_B < 1"));
    }
    let (sba, sbc) = (ba.strength(), bc.strength());
    let s = sba * sbc * s_b / s_a + (1.0 - sba * s_b / s_a) * (s_c - s_b * sbc) / (1.0 - s_b);
    Ok(with_conf(s, min_conf(ba, bc)))
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(math::exp(-z))
    } else {
        libm::log1p(math::exp(z))
    }
}

/// KL divergence (nats) of `after`'s beta fit from `before`'s.
///
/// Numeric quadrature with the tanh-sinh substitution
/// `x = 1 / (1 + e^{-π sinh u})`, which absorbs the endpoint behavior of
/// beta densities with shape parameters close to 1.
pub fn cwig(before: TruthValue, after: TruthValue) -> f64 {
    cwig_with(before, after, DEFAULT_K, CWIG_PANELS)
}

/// [`cwig`] with an explicit evidence scale and node count.
pub fn cwig_with(before: TruthValue, after: TruthValue, k: f64, panels: usize) -> f64 {
    let (pa, pb) = after.beta_params(k);
    let (qa, qb) = before.beta_params(k);
    if pa == qa && pb == qb {
        return 0.0;
    }
    let pn = math::ln_beta(pa, pb);
    let qn = math::ln_beta(qa, qb);
    const RANGE: f64 = 4.0;
    let n = panels.max(8);
    let h = 2.0 * RANGE / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let u = -RANGE + i as f64 * h;
        let v = core::f64::consts::PI * libm::sinh(u);
        let ln_x = -softplus(-v);
        let ln_1mx = -softplus(v);
        let lp = (pa - 1.0) * ln_x + (pb - 1.0) * ln_1mx - pn;
        let lq = (qa - 1.0) * ln_x + (qb - 1.0) * ln_1mx - qn;
        // p(x)·dx/du, with dx/du = π cosh(u)·x(1−x)
        let w = math::exp(lp + ln_x + ln_1mx) * core::f64::consts::PI * libm::cosh(u);
        let f = w * (lp - lq);
        acc += if i == 0 || i == n { 0.5 * f } else { f };
    }
    (acc * h).max(0.0)
}

/// Statements with truth values, plus term priors and interestingness.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Kb {
    statements: BTreeMap<Statement, TruthValue>,
    interest: BTreeMap<Statement, f64>,
}

impl Kb {
    pub fn new() -> Self {
        Self::default()
    }

    /// Named nodes with a truth value become terms; binary edges over named
    /// nodes with a truth value become links labeled by the edge type. A
    /// positive STI adds to the statement's interestingness.
    pub fn from_metagraph(mg: &TypedMetagraph) -> Self {
        let mut kb = Kb::new();
        for a in mg.atoms() {
            let Some(tv) = a.tv() else { continue };
            let st = if a.is_node() {
                match a.name() {
                    Some(n) => Statement::Term(String::from(n)),
                    None => continue,
                }
            } else {
                let names: Vec<Option<&str>> = a
                    .targets()
                    .iter()
                    .map(|t| match t {
                        Target::Atom(id) => mg.atom(*id).filter(|x| x.is_node()).and_then(|x| x.name()),
                        Target::Slot(_) => None,
                    })
                    .collect();
                match names.as_slice() {
                    [Some(f), Some(t)] => Statement::Link {
                        label: String::from(a.type_label()),
                        from: String::from(*f),
                        to: String::from(*t),
                    },
                    _ => continue,
                }
            };
            kb.interest.insert(st.clone(), 1.0 + a.sti().max(0.0));
            kb.statements.insert(st, tv);
        }
        kb
    }

    pub fn insert(&mut self, st: Statement, tv: TruthValue) {
        self.interest.entry(st.clone()).or_insert(1.0);
        self.statements.insert(st, tv);
    }

    pub fn tv(&self, st: &Statement) -> Option<TruthValue> {
        self.statements.get(st).copied()
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn statements(&self) -> impl Iterator<Item = (&Statement, &TruthValue)> + '_ {
        self.statements.iter()
    }

    /// Sampling weight of a statement: `1 + max(sti, 0)` for statements read
    /// from a metagraph, 1 otherwise.
    pub fn interest(&self, st: &Statement) -> f64 {
        self.interest.get(st).copied().unwrap_or(1.0)
    }

    /// Term strength, or [`DEFAULT_PRIOR`].
    pub fn prior(&self, term: &str) -> f64 {
        self.statements
            .get(&Statement::Term(String::from(term)))
            .map_or(DEFAULT_PRIOR, |tv| tv.strength())
    }

    /// Every term mentioned anywhere, in name order.
    pub fn terms(&self) -> BTreeSet<String> {
        self.statements
            .keys()
            .flat_map(|s| s.terms().into_iter().map(String::from))
            .collect()
    }

    /// Write the statement into `mg`: set the truth value of an existing
    /// atom, or add the missing nodes and link.
    pub fn write_statement(mg: &mut TypedMetagraph, st: &Statement, tv: TruthValue) -> Result<(), CogError> {
        let find_node = |mg: &TypedMetagraph, name: &str| {
            mg.atoms()
                .find(|a| a.is_node() && a.name() == Some(name))
                .map(|a| a.id())
        };
        match st {
            Statement::Term(name) => match find_node(mg, name) {
                Some(id) => mg.set_tv(id, Some(tv))?,
                None => {
                    mg.add_atom(AtomSpec::node("Concept").named(name).with_tv(tv))?;
                }
            },
            Statement::Link { label, from, to } => {
                let mut ends = Vec::with_capacity(2);
                for name in [from, to] {
                    ends.push(match find_node(mg, name) {
                        Some(id) => id,
                        None => mg.add_atom(AtomSpec::node("Concept").named(name))?,
                    });
                }
                let (f, t) = (ends[0], ends[1]);
                let existing = mg
                    .atoms()
                    .find(|a| a.type_label() == label && a.targets() == [Target::Atom(f), Target::Atom(t)])
                    .map(|a| a.id());
                match existing {
                    Some(id) => mg.set_tv(id, Some(tv))?,
                    None => {
                        mg.add_atom(AtomSpec::link(label, &[f, t]).with_tv(tv))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// The built-in rules. Statements are matched structurally; priors come
/// from the knowledge base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Deduction,
    Inversion,
    Abduction,
    Induction,
    /// Crisp co-implication: from a term and a strength-1 equivalence
    /// mentioning it, conclude the other side with the same strength.
    EquivalenceTransfer,
}

impl Rule {
    pub const ALL: [Rule; 5] = [
        Rule::Deduction,
        Rule::Inversion,
        Rule::Abduction,
        Rule::Induction,
        Rule::EquivalenceTransfer,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Rule::Deduction => "deduction",
            Rule::Inversion => "inversion",
            Rule::Abduction => "abduction",
            Rule::Induction => "induction",
            Rule::EquivalenceTransfer => "equivalence",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    pub fn arity(&self) -> usize {
        match self {
            Rule::Inversion => 1,
            _ => 2,
        }
    }

    pub fn reversible(&self) -> bool {
        matches!(self, Rule::EquivalenceTransfer)
    }

    /// The rule undoing this one, for reversible rules.
    pub fn inverse(&self) -> Option<Rule> {
        self.reversible().then_some(*self)
    }

    /// Conclusion of the rule on the given premises, or `None` when the
    /// premises do not have the required shape. Singular priors are errors.
    pub fn apply(
        &self,
        kb: &Kb,
        premises: &[(&Statement, TruthValue)],
    ) -> Result<Option<(Statement, TruthValue)>, CogError> {
        if premises.len() != self.arity() {
            return Ok(None);
        }
        let out = match self {
            Rule::Inversion => {
                let (st, tv) = premises[0];
                let Some((a, b)) = st.as_implication() else {
                    return Ok(None);
                };
                if a == b {
                    return Ok(None);
                }
                (Statement::implication(b, a), inversion(tv, kb.prior(a), kb.prior(b))?)
            }
            Rule::Deduction | Rule::Abduction | Rule::Induction => {
                let (x, tx) = premises[0];
                let (y, ty) = premises[1];
                let (Some((x0, x1)), Some((y0, y1))) = (x.as_implication(), y.as_implication()) else {
                    return Ok(None);
                };
                let (a, b, c) = match self {
                    // A→B, B→C
                    Rule::Deduction if x1 == y0 => (x0, x1, y1),
                    // A→B, C→B
                    Rule::Abduction if x1 == y1 => (x0, x1, y0),
                    // B→A, B→C
                    Rule::Induction if x0 == y0 => (x1, x0, y1),
                    _ => return Ok(None),
                };
                if a == b || b == c || a == c {
                    return Ok(None);
                }
                let tv = match self {
                    Rule::Deduction => deduction(tx, ty, kb.prior(b), kb.prior(c))?,
                    Rule::Abduction => abduction(tx, ty, kb.prior(b), kb.prior(c))?,
                    _ => induction(tx, ty, kb.prior(a), kb.prior(b), kb.prior(c))?,
                };
                (Statement::implication(a, c), tv)
            }
            Rule::EquivalenceTransfer => {
                let (x, tx) = premises[0];
                let (e, te) = premises[1];
                let (Statement::Term(t), Statement::Link { label, from, to }) = (x, e) else {
                    return Ok(None);
                };
                if label != EQUIVALENCE || te.strength() != 1.0 || from == to {
                    return Ok(None);
                }
                let other = if t == from {
                    to
                } else if t == to {
                    from
                } else {
                    return Ok(None);
                };
                (
                    Statement::Term(other.clone()),
                    with_conf(tx.strength(), min_conf(tx, te)),
                )
            }
        };
        Ok(Some(out))
    }

    /// Premise shapes that would conclude `goal`, using `terms` for middle
    /// terms. Used by backward chaining.
    pub fn premises_for(&self, goal: &Statement, terms: &BTreeSet<String>) -> Vec<Vec<Statement>> {
        let mut out = Vec::new();
        match (self, goal) {
            (Rule::EquivalenceTransfer, Statement::Term(x)) => {
                for y in terms.iter().filter(|y| *y != x) {
                    out.push(alloc::vec![Statement::Term(y.clone()), Statement::equivalence(y, x)]);
                    out.push(alloc::vec![Statement::Term(y.clone()), Statement::equivalence(x, y)]);
                }
            }
            (Rule::Inversion, g) => {
                if let Some((a, c)) = g.as_implication() {
                    out.push(alloc::vec![Statement::implication(c, a)]);
                }
            }
            (Rule::Deduction | Rule::Abduction | Rule::Induction, g) => {
                let Some((a, c)) = g.as_implication() else {
                    return out;
                };
                for b in terms.iter().map(String::as_str).filter(|b| *b != a && *b != c) {
                    out.push(match self {
                        Rule::Deduction => alloc::vec![Statement::implication(a, b), Statement::implication(b, c)],
                        Rule::Abduction => alloc::vec![Statement::implication(a, b), Statement::implication(c, b)],
                        _ => alloc::vec![Statement::implication(b, a), Statement::implication(b, c)],
                    });
                }
            }
            _ => {}
        }
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of checking one reversible rule on one fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrip {
    pub rule: Rule,
    pub premise: Statement,
    pub recovered: bool,
    pub detail: String,
}

/// Apply each reversible rule to every crisp `(term, equivalence)` pair of
/// the knowledge base, then its inverse to the conclusion, and check the
/// original term and truth value come back.
pub fn reversible_audit(kb: &Kb, rules: &[Rule]) -> Result<Vec<RoundTrip>, CogError> {
    let mut out = Vec::new();
    let stmts: Vec<(&Statement, TruthValue)> = kb.statements().map(|(s, t)| (s, *t)).collect();
    for rule in rules.iter().filter(|r| r.reversible()) {
        let Some(inv) = rule.inverse() else { continue };
        for &(x, tx) in &stmts {
            for &(e, te) in &stmts {
                let Some((c, tc)) = rule.apply(kb, &[(x, tx), (e, te)])? else {
                    continue;
                };
                let back = inv.apply(kb, &[(&c, tc), (e, te)])?;
                let recovered = back.as_ref().is_some_and(|(s, t)| s == x && *t == tx);
                out.push(RoundTrip {
                    rule: *rule,
                    premise: x.clone(),
                    recovered,
                    detail: format!(
                        "{x} via {e} -> {c} -> {}",
                        back.map_or("none".to_string(), |b| b.0.to_string())
                    ),
                });
            }
        }
    }
    Ok(out)
}
