//! Combinatory-operation based function optimization.
//!
//! A problem carries a finite weighted domain, the true objective `F`, a
//! finite class of candidate functions with a prior, and a set of binary
//! combinators. A dataset of observed `(x, F(x))` pairs filters the
//! candidates; the union of the surviving candidates' top-ρ sets is the
//! promising set, and its entropy measures how much is still unknown.

mod decision;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use thiserror::Error;

use crate::math;
use crate::rng;

pub use decision::{make_cofo_dds, CofoAction, CofoDds, Sampler};

/// Slack for floating-point mass comparisons in [`top_set`].
const MASS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CofoError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("no candidate function is consistent once ({x}, {value}) is added")]
    Inconsistent { x: i64, value: f64 },
    #[error("earlier dataset is not contained in the later one")]
    NotSubset,
    #[error("promising set is empty")]
    EmptySupport,
    #[error("trials must be at least 1")]
    Trials,
    #[error("horizon must be at least 1")]
    Horizon,
}

/// How the promising set is turned into a distribution for [`quality`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QualityMode {
    /// Uniform over the support: `log2 |support|`. Monotone under
    /// narrowing.
    #[default]
    SupportUniform,
    /// The normalized membership weights χ. Not monotone in general.
    PriorMass,
}

/// A candidate function, tabulated over the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub name: String,
    pub values: Vec<f64>,
    pub prior: f64,
}

type CombFn = dyn Fn(i64, i64) -> Option<i64> + Send + Sync;

/// A named binary operation on domain points. Results outside the domain
/// count as "no result".
#[derive(Clone)]
pub struct Combinator {
    name: String,
    op: Arc<CombFn>,
}

impl fmt::Debug for Combinator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Combinator").field("name", &self.name).finish()
    }
}

impl Combinator {
    pub fn new<F>(name: &str, op: F) -> Self
    where
        F: Fn(i64, i64) -> Option<i64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            op: Arc::new(op),
        }
    }

    /// A combinator given by an explicit table; missing pairs have no
    /// result.
    pub fn table(name: &str, entries: Vec<((i64, i64), i64)>) -> Self {
        let map: alloc::collections::BTreeMap<(i64, i64), i64> = entries.into_iter().collect();
        Self::new(name, move |x, y| map.get(&(x, y)).copied())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, x: i64, y: i64) -> Option<i64> {
        (self.op)(x, y)
    }
}

#[derive(Debug, Clone)]
pub struct CofoProblem {
    points: Vec<i64>,
    weights: Vec<f64>,
    objective: Vec<f64>,
    hypotheses: Vec<Hypothesis>,
    rho: f64,
    combinators: Vec<Combinator>,
    tolerance: f64,
    mode: QualityMode,
}

impl CofoProblem {
    /// Domain weights are normalized; priors must already sum to 1.
    pub fn new(
        points: Vec<i64>,
        weights: Vec<f64>,
        objective: Vec<f64>,
        hypotheses: Vec<Hypothesis>,
        rho: f64,
        combinators: Vec<Combinator>,
    ) -> Result<Self, CofoError> {
        let n = points.len();
        if n == 0 {
            return Err(CofoError::Invalid("empty domain".into()));
        }
        if points.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(CofoError::Invalid("duplicate domain point".into()));
        }
        if weights.len() != n || objective.len() != n {
            return Err(CofoError::Invalid("weights and objective must cover the domain".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(CofoError::Invalid("domain weights must be positive".into()));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(CofoError::Invalid(format!("rho {rho} outside (0, 1)")));
        }
        if hypotheses.is_empty() {
            return Err(CofoError::Invalid("no candidate functions".into()));
        }
        for h in &hypotheses {
            if h.values.len() != n {
                return Err(CofoError::Invalid(format!("{} does not cover the domain", h.name)));
            }
            if !(h.prior.is_finite() && h.prior > 0.0) {
                return Err(CofoError::Invalid(format!("{} has a non-positive prior", h.name)));
            }
        }
        let prior_sum: f64 = hypotheses.iter().map(|h| h.prior).sum();
        if (prior_sum - 1.0).abs() > 1e-9 {
            return Err(CofoError::Invalid(format!("priors sum to {prior_sum}")));
        }
        let total: f64 = weights.iter().sum();
        Ok(Self {
            points,
            weights: weights.iter().map(|w| w / total).collect(),
            objective,
            hypotheses,
            rho,
            combinators,
            tolerance: 0.0,
            mode: QualityMode::default(),
        })
    }

    /// Uniform domain weights.
    pub fn uniform(
        points: Vec<i64>,
        objective: Vec<f64>,
        hypotheses: Vec<Hypothesis>,
        rho: f64,
        combinators: Vec<Combinator>,
    ) -> Result<Self, CofoError> {
        let w = alloc::vec![1.0; points.len()];
        Self::new(points, w, objective, hypotheses, rho, combinators)
    }

    /// Absolute tolerance for "hypothesis agrees with an observed value".
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance.max(0.0);
        self
    }

    pub fn with_quality_mode(mut self, mode: QualityMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }
    pub fn combinators(&self) -> &[Combinator] {
        &self.combinators
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn quality_mode(&self) -> QualityMode {
        self.mode
    }

    pub fn index_of(&self, x: i64) -> Option<usize> {
        self.points.iter().position(|p| *p == x)
    }

    /// `F(x)`, if `x` is in the domain.
    pub fn objective(&self, x: i64) -> Option<f64> {
        self.index_of(x).map(|i| self.objective[i])
    }

    /// The observation `(x, F(x))`.
    pub fn observe(&self, x: i64) -> Option<(i64, f64)> {
        self.objective(x).map(|v| (x, v))
    }

    /// Top-ρ set of candidate `h`, as domain points.
    pub fn top_set_of(&self, h: usize) -> Vec<i64> {
        top_set(&self.weights, &self.hypotheses[h].values, self.rho)
            .into_iter()
            .map(|i| self.points[i])
            .collect()
    }

    fn agrees(&self, h: &Hypothesis, x: i64, value: f64) -> bool {
        match self.index_of(x) {
            Some(i) => {
                let hv = h.values[i];
                hv == value || (hv - value).abs() <= self.tolerance
            }
            None => false,
        }
    }
}

/// Indices of the points in the top-ρ mass: `x` is kept when the weight of
/// the points strictly better than `x` is below ρ. Ties with a kept point
/// are therefore kept too.
pub fn top_set(weights: &[f64], values: &[f64], rho: f64) -> Vec<usize> {
    (0..values.len())
        .filter(|&i| {
            let above: f64 = values
                .iter()
                .zip(weights)
                .filter(|(v, _)| **v > values[i])
                .map(|(_, w)| *w)
                .sum();
            above < rho - MASS_EPS
        })
        .collect()
}

/// Observed pairs in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pairs: Vec<(i64, f64)>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: Vec<(i64, f64)>) -> Self {
        let mut d = Self::new();
        for (x, v) in pairs {
            d.insert(x, v);
        }
        d
    }

    /// Adds the pair unless that exact pair is already present.
    pub fn insert(&mut self, x: i64, value: f64) {
        if !self.contains(x, value) {
            self.pairs.push((x, value));
        }
    }

    pub fn with(&self, x: i64, value: f64) -> Self {
        let mut d = self.clone();
        d.insert(x, value);
        d
    }

    pub fn contains(&self, x: i64, value: f64) -> bool {
        self.pairs.iter().any(|(a, b)| *a == x && *b == value)
    }

    pub fn pairs(&self) -> &[(i64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset_of(&self, other: &Dataset) -> bool {
        self.pairs.iter().all(|(x, v)| other.contains(*x, *v))
    }

    /// Order-independent key: pairs sorted by point.
    pub fn key(&self) -> String {
        let mut ps = self.pairs.clone();
        ps.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let parts: Vec<String> = ps.iter().map(|(x, v)| format!("{x}={v}")).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// Membership weights χ over the domain (aligned with `points`).
#[derive(Debug, Clone, PartialEq)]
pub struct PromisingSet {
    pub points: Vec<i64>,
    pub chi: Vec<f64>,
    /// Indices of the candidate functions consistent with the dataset.
    pub consistent: Vec<usize>,
}

impl PromisingSet {
    pub fn support(&self) -> Vec<i64> {
        self.points
            .iter()
            .zip(&self.chi)
            .filter(|(_, c)| **c > 0.0)
            .map(|(x, _)| *x)
            .collect()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.points
            .iter()
            .position(|p| *p == x)
            .is_some_and(|i| self.chi[i] > 0.0)
    }

    pub fn chi_of(&self, x: i64) -> f64 {
        self.points.iter().position(|p| *p == x).map_or(0.0, |i| self.chi[i])
    }

    /// χ rescaled to sum to 1.
    pub fn distribution(&self) -> Vec<f64> {
        let total: f64 = self.chi.iter().sum();
        if total <= 0.0 {
            return alloc::vec![0.0; self.chi.len()];
        }
        self.chi.iter().map(|c| c / total).collect()
    }
}

pub fn promising_set(p: &CofoProblem, d: &Dataset) -> Result<PromisingSet, CofoError> {
    let mut alive: Vec<usize> = (0..p.hypotheses.len()).collect();
    for &(x, v) in d.pairs() {
        alive.retain(|&h| p.agrees(&p.hypotheses[h], x, v));
        if alive.is_empty() {
            return Err(CofoError::Inconsistent { x, value: v });
        }
    }
    let mass: f64 = alive.iter().map(|&h| p.hypotheses[h].prior).sum();
    let mut chi = alloc::vec![0.0; p.points.len()];
    for &h in &alive {
        for i in top_set(&p.weights, &p.hypotheses[h].values, p.rho) {
            chi[i] += p.hypotheses[h].prior;
        }
    }
    for c in chi.iter_mut() {
        *c = (*c / mass).min(1.0);
    }
    Ok(PromisingSet {
        points: p.points.clone(),
        chi,
        consistent: alive,
    })
}

/// Entropy in bits of the promising set under the problem's quality mode.
pub fn quality(p: &CofoProblem, d: &Dataset) -> Result<f64, CofoError> {
    let ps = promising_set(p, d)?;
    Ok(quality_of(&ps, p.mode))
}

pub fn quality_of(ps: &PromisingSet, mode: QualityMode) -> f64 {
    match mode {
        QualityMode::SupportUniform => {
            let n = ps.chi.iter().filter(|c| **c > 0.0).count();
            if n <= 1 {
                0.0
            } else {
                math::log2(n as f64)
            }
        }
        QualityMode::PriorMass => math::entropy_bits(&ps.chi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoGain {
    /// `quality(before) − quality(after)`.
    pub gain: f64,
    /// `KL(χ_after ‖ χ_before)` in bits; infinite if the support escapes.
    pub kl: f64,
}

pub fn info_gain(p: &CofoProblem, before: &Dataset, after: &Dataset) -> Result<InfoGain, CofoError> {
    if !before.is_subset_of(after) {
        return Err(CofoError::NotSubset);
    }
    let pb = promising_set(p, before)?;
    let pa = promising_set(p, after)?;
    let gain = quality_of(&pb, p.mode) - quality_of(&pa, p.mode);
    let (a, b) = (pa.distribution(), pb.distribution());
    let mut kl = 0.0;
    for (ai, bi) in a.iter().zip(&b) {
        if *ai > 0.0 {
            if *bi <= 0.0 {
                kl = f64::INFINITY;
                break;
            }
            kl += ai * math::log2(ai / bi);
        }
    }
    Ok(InfoGain { gain, kl: kl.max(0.0) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift {
    /// P(C(x,y) ∈ support | x, y ∈ support).
    pub p_cond: f64,
    /// Domain weight of the support.
    pub p_base: f64,
}

impl Lift {
    pub fn ratio(&self) -> f64 {
        if self.p_base > 0.0 {
            self.p_cond / self.p_base
        } else {
            0.0
        }
    }
}

fn support_indices(p: &CofoProblem, ps: &PromisingSet) -> Result<Vec<usize>, CofoError> {
    let s: Vec<usize> = (0..p.points.len()).filter(|&i| ps.chi[i] > 0.0).collect();
    if s.is_empty() {
        Err(CofoError::EmptySupport)
    } else {
        Ok(s)
    }
}

/// Monte-Carlo estimate: `x` and `y` are drawn from the support in
/// proportion to their domain weight.
pub fn combinator_lift(
    p: &CofoProblem,
    c: &Combinator,
    d: &Dataset,
    trials: usize,
    seed: u64,
) -> Result<Lift, CofoError> {
    if trials == 0 {
        return Err(CofoError::Trials);
    }
    let ps = promising_set(p, d)?;
    let s = support_indices(p, &ps)?;
    let dist = WeightedIndex::new(s.iter().map(|&i| p.weights[i])).map_err(|_| CofoError::EmptySupport)?;
    let mut r = rng::seeded(seed);
    let mut hits = 0usize;
    for _ in 0..trials {
        let x = p.points[s[dist.sample(&mut r)]];
        let y = p.points[s[dist.sample(&mut r)]];
        if c.apply(x, y).is_some_and(|z| ps.contains(z)) {
            hits += 1;
        }
    }
    Ok(Lift {
        p_cond: hits as f64 / trials as f64,
        p_base: s.iter().map(|&i| p.weights[i]).sum(),
    })
}

/// Exact version of [`combinator_lift`], summing over all support pairs.
pub fn combinator_lift_exact(p: &CofoProblem, c: &Combinator, d: &Dataset) -> Result<Lift, CofoError> {
    let ps = promising_set(p, d)?;
    let s = support_indices(p, &ps)?;
    let ws: f64 = s.iter().map(|&i| p.weights[i]).sum();
    let mut hit = 0.0;
    for &i in &s {
        for &j in &s {
            if c.apply(p.points[i], p.points[j]).is_some_and(|z| ps.contains(z)) {
                hit += p.weights[i] * p.weights[j];
            }
        }
    }
    Ok(Lift {
        p_cond: (hit / (ws * ws)).min(1.0),
        p_base: ws,
    })
}
