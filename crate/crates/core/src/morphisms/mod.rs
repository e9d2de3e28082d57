//! Recursion schemes over metagraph snapshots.
//!
//! A fold evaluates every atom bottom-up (an atom's value is computed from
//! the values of its targets) and then reduces the values of the root atoms
//! in a caller-chosen [`TraversalOrder`]. `histo_fold` is the same fold with
//! a memo table of sub-results. Unfolds grow a metagraph from a seed by
//! joining one emitted atom at a time; `futu_unfold` allows a step to emit
//! several generations at once. `chrono` fuses a futu-unfold with a
//! histo-fold without building the intermediate metagraph.
//!
//! All of them are driven by the step machines in [`run`], which can be
//! paused, resumed and interleaved.

pub mod run;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::metagraph::{AtomId, AtomKind, AtomSpec, MgError, Snapshot, Target, TypedMetagraph};
use crate::rng;
use crate::tv::TruthValue;

pub use run::{interleave, ChronoRun, FoldRun, MorphRun, RunKind, RunReport, RunStatus, UnfoldRun};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorphError {
    #[error("view stamp {stamp} is stale (live version {live})")]
    Stale { stamp: u64, live: u64 },
    #[error("run already finished")]
    Finished,
    #[error("cycle through atom or seed while folding")]
    Cyclic,
    #[error("emission failed after {expansions} expansions: {source}")]
    Emission {
        partial: alloc::boxed::Box<TypedMetagraph>,
        expansions: usize,
        source: MgError,
    },
    #[error("plain unfold coalgebra emitted a multi-generation layer")]
    MultiGeneration,
    #[error(transparent)]
    Metagraph(#[from] MgError),
}

/// The parts of an atom an algebra may look at. Ids are deliberately absent
/// so memoizing by isomorphism class is sound.
#[derive(Debug, Clone, Copy)]
pub struct AtomView<'a> {
    spec: &'a AtomSpec,
    arity: usize,
}

impl<'a> AtomView<'a> {
    pub fn new(spec: &'a AtomSpec, arity: usize) -> Self {
        Self { spec, arity }
    }
    pub fn kind(&self) -> AtomKind {
        if self.arity == 0 {
            AtomKind::Node
        } else {
            AtomKind::Edge
        }
    }
    pub fn type_label(&self) -> &'a str {
        &self.spec.type_label
    }
    pub fn name(&self) -> Option<&'a str> {
        self.spec.name.as_deref()
    }
    pub fn tv(&self) -> Option<TruthValue> {
        self.spec.tv
    }
    pub fn sti(&self) -> f64 {
        self.spec.sti
    }
    pub fn lti(&self) -> f64 {
        self.spec.lti
    }
    pub fn arity(&self) -> usize {
        self.arity
    }
}

type LiftFn<V> = dyn Fn(&AtomView<'_>, &[Option<V>]) -> V + Send + Sync;
type CombineFn<V> = dyn Fn(&V, &V) -> V + Send + Sync;

/// Fold algebra: a unit, a per-atom `lift` from target values, and a binary
/// `combine` used to reduce root values.
pub struct Algebra<V> {
    unit: V,
    lift: Arc<LiftFn<V>>,
    combine: Arc<CombineFn<V>>,
    declared_associative: bool,
}

impl<V: Clone> Clone for Algebra<V> {
    fn clone(&self) -> Self {
        Self {
            unit: self.unit.clone(),
            lift: Arc::clone(&self.lift),
            combine: Arc::clone(&self.combine),
            declared_associative: self.declared_associative,
        }
    }
}

impl<V> Algebra<V> {
    pub fn new<L, C>(unit: V, lift: L, combine: C) -> Self
    where
        L: Fn(&AtomView<'_>, &[Option<V>]) -> V + Send + Sync + 'static,
        C: Fn(&V, &V) -> V + Send + Sync + 'static,
    {
        Self {
            unit,
            lift: Arc::new(lift),
            combine: Arc::new(combine),
            declared_associative: false,
        }
    }

    pub fn declare_associative(mut self) -> Self {
        self.declared_associative = true;
        self
    }

    pub fn declared_associative(&self) -> bool {
        self.declared_associative
    }

    pub fn unit(&self) -> &V {
        &self.unit
    }

    pub fn lift(&self, atom: &AtomView<'_>, children: &[Option<V>]) -> V {
        (self.lift)(atom, children)
    }

    pub fn combine(&self, a: &V, b: &V) -> V {
        (self.combine)(a, b)
    }
}

/// Result of auditing `combine` on sampled triples.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraAudit<V> {
    pub trials: usize,
    pub associative: bool,
    pub commutative: bool,
    /// First triple breaking associativity, if any.
    pub witness: Option<(V, V, V)>,
}

impl<V> AlgebraAudit<V> {
    /// Both properties hold, so the fold value cannot depend on root order.
    pub fn order_free(&self) -> bool {
        self.associative && self.commutative
    }
}

/// Check `(a·b)·c = a·(b·c)` and `a·b = b·a` on `trials` triples drawn from
/// `samples`.
pub fn audit_algebra<V: Clone + PartialEq>(
    algebra: &Algebra<V>,
    samples: &[V],
    trials: usize,
    seed: u64,
) -> AlgebraAudit<V> {
    let mut audit = AlgebraAudit {
        trials,
        associative: true,
        commutative: true,
        witness: None,
    };
    if samples.is_empty() {
        return audit;
    }
    let mut r = rng::seeded(seed);
    for _ in 0..trials {
        let a = &samples[r.gen_range(0..samples.len())];
        let b = &samples[r.gen_range(0..samples.len())];
        let c = &samples[r.gen_range(0..samples.len())];
        let left = algebra.combine(&algebra.combine(a, b), c);
        let right = algebra.combine(a, &algebra.combine(b, c));
        if left != right && audit.associative {
            audit.associative = false;
            audit.witness = Some((a.clone(), b.clone(), c.clone()));
        }
        if algebra.combine(a, b) != algebra.combine(b, a) {
            audit.commutative = false;
        }
    }
    audit
}

/// Order in which root values are reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraversalOrder {
    /// Ascending atom id.
    Insertion,
    /// Targets before the atoms pointing at them, ties by id.
    Topological,
    /// A seeded shuffle of the insertion order.
    SeededRandom(u64),
    /// Caller-supplied order; atoms not listed follow in id order.
    Explicit(Vec<AtomId>),
}

impl TraversalOrder {
    pub fn arrange(&self, mg: &TypedMetagraph, ids: &[AtomId]) -> Vec<AtomId> {
        match self {
            TraversalOrder::Insertion => {
                let mut v = ids.to_vec();
                v.sort();
                v
            }
            TraversalOrder::Topological => {
                let topo = topological(mg);
                topo.into_iter().filter(|a| ids.contains(a)).collect()
            }
            TraversalOrder::SeededRandom(seed) => {
                let mut v = ids.to_vec();
                v.sort();
                v.shuffle(&mut rng::seeded(*seed));
                v
            }
            TraversalOrder::Explicit(order) => {
                let mut v: Vec<AtomId> = order.iter().filter(|a| ids.contains(a)).copied().collect();
                let mut rest: Vec<AtomId> = ids.iter().filter(|a| !v.contains(a)).copied().collect();
                rest.sort();
                v.extend(rest);
                v
            }
        }
    }
}

/// Kahn's algorithm with targets first; atoms on cycles are appended in id
/// order.
fn topological(mg: &TypedMetagraph) -> Vec<AtomId> {
    let mut pending: BTreeMap<AtomId, usize> = BTreeMap::new();
    let mut users: BTreeMap<AtomId, Vec<AtomId>> = BTreeMap::new();
    for a in mg.atoms() {
        let mut n = 0;
        for t in a.targets() {
            if let Target::Atom(x) = t {
                n += 1;
                users.entry(*x).or_default().push(a.id());
            }
        }
        pending.insert(a.id(), n);
    }
    let mut ready: alloc::collections::BTreeSet<AtomId> =
        pending.iter().filter(|(_, n)| **n == 0).map(|(a, _)| *a).collect();
    let mut out = Vec::new();
    while let Some(a) = ready.pop_first() {
        out.push(a);
        if let Some(us) = users.get(&a) {
            for u in us {
                let n = pending.get_mut(u).expect("user registered");
                *n -= 1;
                if *n == 0 {
                    ready.insert(*u);
                }
            }
        }
    }
    for a in mg.atom_ids() {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

type KeyFn = dyn Fn(&TypedMetagraph, AtomId) -> String + Send + Sync;

/// How memoized folds key their sub-results.
#[derive(Clone)]
pub enum MemoKeys {
    /// No memo: shared sub-structure is recomputed (the plain fold).
    Off,
    /// One entry per atom.
    ByAtom,
    /// Canonical form of the atom's rooted sub-metagraph, falling back to the
    /// atom id above the canonical-form size limit.
    Canonical,
    Custom(Arc<KeyFn>),
}

impl MemoKeys {
    pub(crate) fn key(&self, mg: &TypedMetagraph, id: AtomId) -> Option<String> {
        match self {
            MemoKeys::Off => None,
            MemoKeys::ByAtom => Some(alloc::format!("id:{}", id.0)),
            MemoKeys::Canonical => Some(
                mg.sub_metagraph(&[id])
                    .ok()
                    .and_then(|g| g.canonical_form().ok())
                    .unwrap_or_else(|| alloc::format!("id:{}", id.0)),
            ),
            MemoKeys::Custom(f) => Some(f(mg, id)),
        }
    }
}

/// A seed's expansion: one atom plus what hangs off its targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<S> {
    /// Atom to emit; its `kind` and `targets` are derived from `children`.
    pub atom: AtomSpec,
    pub children: Vec<Child<S>>,
}

impl<S> Layer<S> {
    pub fn leaf(atom: AtomSpec) -> Self {
        Self {
            atom,
            children: Vec::new(),
        }
    }

    pub fn with_children(atom: AtomSpec, children: Vec<Child<S>>) -> Self {
        Self { atom, children }
    }

    fn is_single_generation(&self) -> bool {
        self.children.iter().all(|c| matches!(c.next, Next::Seed(_)))
    }
}

/// One target position of a layer: its required type and what fills it.
#[derive(Debug, Clone, PartialEq)]
pub struct Child<S> {
    pub slot_type: String,
    pub next: Next<S>,
}

impl<S> Child<S> {
    pub fn seed(slot_type: &str, seed: S) -> Self {
        Self {
            slot_type: slot_type.into(),
            next: Next::Seed(seed),
        }
    }

    pub fn now(slot_type: &str, layer: Layer<S>) -> Self {
        Self {
            slot_type: slot_type.into(),
            next: Next::Now(alloc::boxed::Box::new(layer)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Next<S> {
    /// Expanded in a later step.
    Seed(S),
    /// Emitted in the same step (a further generation).
    Now(alloc::boxed::Box<Layer<S>>),
}

type ExpandFn<S> = dyn Fn(&S) -> Option<Layer<S>> + Send + Sync;

/// Unfold coalgebra. With `share_seeds`, a seed that was already expanded is
/// bound to its existing atom instead of being expanded again, so the
/// unfolded structure is a dag.
pub struct Coalgebra<S> {
    expand: Arc<ExpandFn<S>>,
    share_seeds: bool,
}

impl<S> Clone for Coalgebra<S> {
    fn clone(&self) -> Self {
        Self {
            expand: Arc::clone(&self.expand),
            share_seeds: self.share_seeds,
        }
    }
}

impl<S> Coalgebra<S> {
    pub fn new<F>(expand: F) -> Self
    where
        F: Fn(&S) -> Option<Layer<S>> + Send + Sync + 'static,
    {
        Self {
            expand: Arc::new(expand),
            share_seeds: false,
        }
    }

    pub fn sharing(mut self) -> Self {
        self.share_seeds = true;
        self
    }

    pub fn shares_seeds(&self) -> bool {
        self.share_seeds
    }

    pub fn expand(&self, seed: &S) -> Option<Layer<S>> {
        (self.expand)(seed)
    }
}

/// Result of reducing a fold with a per-order view of the values.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport<V> {
    pub values: Vec<V>,
    /// Some pair of orders produced different values.
    pub order_dependent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoOutcome<V> {
    pub value: V,
    pub memo_hits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldOutcome {
    pub graph: TypedMetagraph,
    pub root: Option<AtomId>,
    /// Atoms emitted (budget consumed).
    pub expansions: usize,
    /// Budget ran out with work still pending.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChronoOutcome<S: Ord, V> {
    pub value: V,
    pub memo_hits: u64,
    pub expansions: usize,
    pub truncated: bool,
    /// Value of every fully evaluated seed.
    pub memo: BTreeMap<S, V>,
}

/// Plain fold; shared sub-structure is re-evaluated.
pub fn fold<V: Clone>(view: &Snapshot, algebra: &Algebra<V>, order: &TraversalOrder) -> Result<V, MorphError> {
    let mut run = FoldRun::new(view.clone(), algebra.clone(), order, MemoKeys::Off);
    run.finish()?;
    Ok(run.result().cloned().expect("finished fold has a value"))
}

/// [`fold`] that first refuses a view whose metagraph has moved on.
pub fn fold_checked<V: Clone>(
    view: &Snapshot,
    live: &TypedMetagraph,
    algebra: &Algebra<V>,
    order: &TraversalOrder,
) -> Result<V, MorphError> {
    if view.is_stale(live) {
        return Err(MorphError::Stale {
            stamp: view.stamp(),
            live: live.version(),
        });
    }
    fold(view, algebra, order)
}

/// Fold with a memo table of sub-results; same value as [`fold`].
pub fn histo_fold<V: Clone>(
    view: &Snapshot,
    algebra: &Algebra<V>,
    order: &TraversalOrder,
    keys: MemoKeys,
) -> Result<HistoOutcome<V>, MorphError> {
    let mut run = FoldRun::new(view.clone(), algebra.clone(), order, keys);
    run.finish()?;
    Ok(HistoOutcome {
        value: run.result().cloned().expect("finished fold has a value"),
        memo_hits: run.memo_hits(),
    })
}

/// Evaluate the fold under several orders and flag any disagreement.
pub fn order_report<V: Clone + PartialEq>(
    view: &Snapshot,
    algebra: &Algebra<V>,
    orders: &[TraversalOrder],
) -> Result<OrderReport<V>, MorphError> {
    let values = orders
        .iter()
        .map(|o| fold(view, algebra, o))
        .collect::<Result<Vec<V>, _>>()?;
    let order_dependent = values.windows(2).any(|w| w[0] != w[1]);
    Ok(OrderReport {
        values,
        order_dependent,
    })
}

/// Grow a metagraph from `seed`, one generation per expansion.
pub fn unfold<S: Clone + Ord>(seed: S, coalgebra: &Coalgebra<S>, budget: usize) -> Result<UnfoldOutcome, MorphError> {
    let mut run = UnfoldRun::new(seed, coalgebra.clone(), budget, false);
    run.finish()?;
    Ok(run.into_outcome())
}

/// Like [`unfold`], but a layer may carry further generations (`Next::Now`);
/// every emitted atom costs one unit of budget.
pub fn futu_unfold<S: Clone + Ord>(
    seed: S,
    coalgebra: &Coalgebra<S>,
    budget: usize,
) -> Result<UnfoldOutcome, MorphError> {
    let mut run = UnfoldRun::new(seed, coalgebra.clone(), budget, true);
    run.finish()?;
    Ok(run.into_outcome())
}

/// Fused futu-unfold and histo-fold.
pub fn chrono<S: Clone + Ord, V: Clone>(
    seed: S,
    coalgebra: &Coalgebra<S>,
    algebra: &Algebra<V>,
    budget: usize,
) -> Result<ChronoOutcome<S, V>, MorphError> {
    let mut run = ChronoRun::new(seed, coalgebra.clone(), algebra.clone(), budget);
    run.finish()?;
    Ok(run.into_outcome())
}

/// The unfused pipeline `histo_fold(futu_unfold(..))`, kept for comparison
/// with [`chrono`].
pub fn chrono_unfused<S: Clone + Ord, V: Clone>(
    seed: S,
    coalgebra: &Coalgebra<S>,
    algebra: &Algebra<V>,
    budget: usize,
) -> Result<HistoOutcome<V>, MorphError> {
    let unfolded = futu_unfold(seed, coalgebra, budget)?;
    histo_fold(
        &Snapshot::from(unfolded.graph),
        algebra,
        &TraversalOrder::Insertion,
        MemoKeys::ByAtom,
    )
}

#[cfg(test)]
mod tests;
