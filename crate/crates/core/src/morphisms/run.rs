//! Step machines behind every recursion scheme.
//!
//! Each run keeps its own explicit frame stack, so it can stop after any
//! number of frames and resume later (possibly on another thread) with the
//! same final result as an uninterrupted run.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    Algebra, AtomView, ChronoOutcome, Coalgebra, Layer, MemoKeys, MorphError, Next, TraversalOrder, UnfoldOutcome,
};
use crate::metagraph::{AtomId, AtomKind, AtomSpec, SlotId, Snapshot, Target, TypedMetagraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Fold,
    Histo,
    Unfold,
    Futu,
    Chrono,
}

impl RunKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunKind::Fold => "fold",
            RunKind::Histo => "histo",
            RunKind::Unfold => "unfold",
            RunKind::Futu => "futu",
            RunKind::Chrono => "chrono",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Running,
    Paused,
    Done,
    Stale,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Running => "running",
            RunStatus::Paused => "paused",
            RunStatus::Done => "done",
            RunStatus::Stale => "stale",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunReport {
    pub kind: RunKind,
    pub frames_done: u64,
    pub memo_hits: u64,
    pub status: RunStatus,
}

/// Common driver interface of the step machines.
pub trait MorphRun {
    fn kind(&self) -> RunKind;
    fn status(&self) -> RunStatus;
    /// Version of the metagraph the run reads, if it reads one.
    fn stamp(&self) -> Option<u64>;
    fn frames_done(&self) -> u64;
    fn memo_hits(&self) -> u64;
    /// Process one frame. Returns `true` once nothing is left to do.
    fn step(&mut self) -> Result<bool, MorphError>;
    fn set_status(&mut self, status: RunStatus);

    /// Advance at most `k` frames. When `live` is given and has moved past
    /// the run's stamp, the run is marked stale and nothing is computed.
    fn run_steps(&mut self, k: usize, live: Option<&TypedMetagraph>) -> Result<RunStatus, MorphError> {
        match self.status() {
            RunStatus::Done => return Err(MorphError::Finished),
            RunStatus::Stale => {
                let stamp = self.stamp().unwrap_or_default();
                let live = live.map(|g| g.version()).unwrap_or(stamp);
                return Err(MorphError::Stale { stamp, live });
            }
            _ => {}
        }
        if let (Some(stamp), Some(live)) = (self.stamp(), live) {
            if live.version() != stamp {
                self.set_status(RunStatus::Stale);
                return Err(MorphError::Stale {
                    stamp,
                    live: live.version(),
                });
            }
        }
        self.set_status(RunStatus::Running);
        for _ in 0..k {
            match self.step() {
                Ok(true) => {
                    self.set_status(RunStatus::Done);
                    return Ok(RunStatus::Done);
                }
                Ok(false) => {}
                Err(e) => {
                    self.set_status(RunStatus::Done);
                    return Err(e);
                }
            }
        }
        self.set_status(RunStatus::Paused);
        Ok(RunStatus::Paused)
    }

    /// Run to completion.
    fn finish(&mut self) -> Result<(), MorphError> {
        while self.status() != RunStatus::Done {
            self.run_steps(usize::MAX, None)?;
        }
        Ok(())
    }

    fn report(&self) -> RunReport {
        RunReport {
            kind: self.kind(),
            frames_done: self.frames_done(),
            memo_hits: self.memo_hits(),
            status: self.status(),
        }
    }
}

/// Round-robin `slice` frames at a time over `runs` until all are done.
pub fn interleave(
    runs: &mut [&mut dyn MorphRun],
    slice: usize,
    live: Option<&TypedMetagraph>,
) -> Result<(), MorphError> {
    let slice = slice.max(1);
    loop {
        let mut pending = false;
        for run in runs.iter_mut() {
            if run.status() != RunStatus::Done {
                run.run_steps(slice, live)?;
                pending |= run.status() != RunStatus::Done;
            }
        }
        if !pending {
            return Ok(());
        }
    }
}

enum FoldFrame {
    Enter(Target),
    Exit { atom: AtomId, key: Option<String> },
    Reduce,
}

/// Fold (or histo-fold, when memo keys are on) over a snapshot.
pub struct FoldRun<V> {
    view: Snapshot,
    algebra: Algebra<V>,
    keys: MemoKeys,
    agenda: Vec<FoldFrame>,
    values: Vec<Option<V>>,
    on_path: BTreeSet<AtomId>,
    memo: BTreeMap<String, V>,
    acc: Option<V>,
    result: Option<V>,
    frames_done: u64,
    memo_hits: u64,
    status: RunStatus,
}

impl<V: Clone> FoldRun<V> {
    pub fn new(view: Snapshot, algebra: Algebra<V>, order: &TraversalOrder, keys: MemoKeys) -> Self {
        let mut roots = order.arrange(view.graph(), &view.roots());
        if roots.is_empty() {
            // Every atom is on a cycle; entering any of them reports it.
            roots.extend(view.atom_ids().first().copied());
        }
        let mut agenda = Vec::with_capacity(roots.len() * 2);
        for r in roots.into_iter().rev() {
            agenda.push(FoldFrame::Reduce);
            agenda.push(FoldFrame::Enter(Target::Atom(r)));
        }
        Self {
            view,
            algebra,
            keys,
            agenda,
            values: Vec::new(),
            on_path: BTreeSet::new(),
            memo: BTreeMap::new(),
            acc: None,
            result: None,
            frames_done: 0,
            memo_hits: 0,
            status: RunStatus::Paused,
        }
    }

    pub fn result(&self) -> Option<&V> {
        self.result.as_ref()
    }

    pub fn view(&self) -> &Snapshot {
        &self.view
    }
}

impl<V: Clone> MorphRun for FoldRun<V> {
    fn kind(&self) -> RunKind {
        if matches!(self.keys, MemoKeys::Off) {
            RunKind::Fold
        } else {
            RunKind::Histo
        }
    }
    fn status(&self) -> RunStatus {
        self.status
    }
    fn stamp(&self) -> Option<u64> {
        Some(self.view.stamp())
    }
    fn frames_done(&self) -> u64 {
        self.frames_done
    }
    fn memo_hits(&self) -> u64 {
        self.memo_hits
    }
    fn set_status(&mut self, status: RunStatus) {
        self.status = status;
    }

    fn step(&mut self) -> Result<bool, MorphError> {
        let Some(frame) = self.agenda.pop() else {
            let value = self.acc.take().unwrap_or_else(|| self.algebra.unit().clone());
            self.result = Some(value);
            return Ok(true);
        };
        self.frames_done += 1;
        match frame {
            FoldFrame::Enter(Target::Slot(_)) => self.values.push(None),
            FoldFrame::Enter(Target::Atom(a)) => {
                let key = self.keys.key(self.view.graph(), a);
                if let Some(v) = key.as_ref().and_then(|k| self.memo.get(k)) {
                    self.memo_hits += 1;
                    self.values.push(Some(v.clone()));
                } else {
                    if !self.on_path.insert(a) {
                        return Err(MorphError::Cyclic);
                    }
                    let atom = self.view.atom(a).ok_or(crate::metagraph::MgError::UnknownAtom(a))?;
                    self.agenda.push(FoldFrame::Exit { atom: a, key });
                    for t in atom.targets().iter().rev() {
                        self.agenda.push(FoldFrame::Enter(*t));
                    }
                }
            }
            FoldFrame::Exit { atom, key } => {
                let a = self.view.atom(atom).expect("entered atom exists");
                let arity = a.targets().len();
                let children = self.values.split_off(self.values.len() - arity);
                let v = self.algebra.lift(&AtomView::new(a.spec(), arity), &children);
                if let Some(k) = key {
                    self.memo.insert(k, v.clone());
                }
                self.on_path.remove(&atom);
                self.values.push(Some(v));
            }
            FoldFrame::Reduce => {
                let v = self.values.pop().flatten().expect("root value computed before reduce");
                self.acc = Some(match self.acc.take() {
                    None => v,
                    Some(acc) => self.algebra.combine(&acc, &v),
                });
            }
        }
        Ok(false)
    }
}

type Attach = Option<(AtomId, SlotId)>;

enum UnfoldFrame<S> {
    Expand { seed: S, attach: Attach },
    Emit { layer: Layer<S>, attach: Attach },
}

/// Unfold (or futu-unfold) of a seed into a fresh metagraph.
pub struct UnfoldRun<S> {
    coalgebra: Coalgebra<S>,
    budget: usize,
    multi: bool,
    graph: TypedMetagraph,
    agenda: Vec<UnfoldFrame<S>>,
    seen: BTreeMap<S, AtomId>,
    root: Option<AtomId>,
    expansions: usize,
    truncated: bool,
    frames_done: u64,
    memo_hits: u64,
    status: RunStatus,
}

impl<S: Clone + Ord> UnfoldRun<S> {
    /// `multi_generation` selects futu-unfold.
    pub fn new(seed: S, coalgebra: Coalgebra<S>, budget: usize, multi_generation: bool) -> Self {
        Self {
            coalgebra,
            budget,
            multi: multi_generation,
            graph: TypedMetagraph::new(),
            agenda: alloc::vec![UnfoldFrame::Expand { seed, attach: None }],
            seen: BTreeMap::new(),
            root: None,
            expansions: 0,
            truncated: false,
            frames_done: 0,
            memo_hits: 0,
            status: RunStatus::Paused,
        }
    }

    pub fn graph(&self) -> &TypedMetagraph {
        &self.graph
    }

    pub fn into_outcome(self) -> UnfoldOutcome {
        UnfoldOutcome {
            graph: self.graph,
            root: self.root,
            expansions: self.expansions,
            truncated: self.truncated,
        }
    }

    fn emission_error(&self, source: crate::metagraph::MgError) -> MorphError {
        MorphError::Emission {
            partial: alloc::boxed::Box::new(self.graph.clone()),
            expansions: self.expansions,
            source,
        }
    }

    fn emit(&mut self, layer: Layer<S>, attach: Attach, seed: Option<S>) -> Result<(), MorphError> {
        if let Some((_, slot)) = attach {
            let expected = self.graph.slot_type(slot).unwrap_or_default();
            if expected != layer.atom.type_label {
                return Err(self.emission_error(crate::metagraph::MgError::TypeMismatch {
                    slot,
                    expected: expected.into(),
                    found: layer.atom.type_label.clone(),
                }));
            }
        }
        let slots: Vec<SlotId> = layer
            .children
            .iter()
            .map(|c| self.graph.declare_dangling(&c.slot_type))
            .collect();
        let spec = AtomSpec {
            kind: if slots.is_empty() {
                AtomKind::Node
            } else {
                AtomKind::Edge
            },
            targets: slots.iter().map(|s| Target::Slot(*s)).collect(),
            ..layer.atom
        };
        let id = self.graph.add_atom(spec).map_err(|e| self.emission_error(e))?;
        self.expansions += 1;
        match attach {
            Some((owner, slot)) => self
                .graph
                .bind_slot_of(owner, slot, id)
                .map_err(|e| self.emission_error(e))?,
            None => self.root = Some(id),
        }
        if let Some(seed) = seed {
            if self.coalgebra.shares_seeds() {
                self.seen.insert(seed, id);
            }
        }
        for (child, slot) in layer.children.into_iter().zip(slots).rev() {
            let attach = Some((id, slot));
            self.agenda.push(match child.next {
                Next::Seed(seed) => UnfoldFrame::Expand { seed, attach },
                Next::Now(layer) => UnfoldFrame::Emit { layer: *layer, attach },
            });
        }
        Ok(())
    }
}

impl<S: Clone + Ord> MorphRun for UnfoldRun<S> {
    fn kind(&self) -> RunKind {
        if self.multi {
            RunKind::Futu
        } else {
            RunKind::Unfold
        }
    }
    fn status(&self) -> RunStatus {
        self.status
    }
    fn stamp(&self) -> Option<u64> {
        None
    }
    fn frames_done(&self) -> u64 {
        self.frames_done
    }
    fn memo_hits(&self) -> u64 {
        self.memo_hits
    }
    fn set_status(&mut self, status: RunStatus) {
        self.status = status;
    }

    fn step(&mut self) -> Result<bool, MorphError> {
        let Some(frame) = self.agenda.pop() else {
            return Ok(true);
        };
        self.frames_done += 1;
        match frame {
            UnfoldFrame::Expand { seed, attach } => {
                if let Some(&existing) = self.seen.get(&seed) {
                    self.memo_hits += 1;
                    if let Some((owner, slot)) = attach {
                        self.graph
                            .bind_slot_of(owner, slot, existing)
                            .map_err(|e| self.emission_error(e))?;
                    }
                } else if self.expansions >= self.budget {
                    self.truncated = true;
                } else if let Some(layer) = self.coalgebra.expand(&seed) {
                    if !self.multi && !layer.is_single_generation() {
                        return Err(MorphError::MultiGeneration);
                    }
                    self.emit(layer, attach, Some(seed))?;
                }
            }
            UnfoldFrame::Emit { layer, attach } => {
                if self.expansions >= self.budget {
                    self.truncated = true;
                } else {
                    self.emit(layer, attach, None)?;
                }
            }
        }
        Ok(false)
    }
}

enum ChronoFrame<S> {
    Eval(S),
    Layer(Layer<S>),
    Lift { atom: AtomSpec, arity: usize },
    Store(S),
}

/// Fused futu-unfold + histo-fold: evaluates what the unfold would build,
/// with the same budget accounting, without materializing it.
pub struct ChronoRun<S: Ord, V> {
    coalgebra: Coalgebra<S>,
    algebra: Algebra<V>,
    budget: usize,
    agenda: Vec<ChronoFrame<S>>,
    values: Vec<Option<V>>,
    memo: BTreeMap<S, V>,
    in_progress: BTreeSet<S>,
    expansions: usize,
    truncated: bool,
    result: Option<V>,
    frames_done: u64,
    memo_hits: u64,
    status: RunStatus,
}

impl<S: Clone + Ord, V: Clone> ChronoRun<S, V> {
    pub fn new(seed: S, coalgebra: Coalgebra<S>, algebra: Algebra<V>, budget: usize) -> Self {
        Self {
            coalgebra,
            algebra,
            budget,
            agenda: alloc::vec![ChronoFrame::Eval(seed)],
            values: Vec::new(),
            memo: BTreeMap::new(),
            in_progress: BTreeSet::new(),
            expansions: 0,
            truncated: false,
            result: None,
            frames_done: 0,
            memo_hits: 0,
            status: RunStatus::Paused,
        }
    }

    pub fn result(&self) -> Option<&V> {
        self.result.as_ref()
    }

    pub fn into_outcome(self) -> ChronoOutcome<S, V> {
        ChronoOutcome {
            value: self.result.unwrap_or_else(|| self.algebra.unit().clone()),
            memo_hits: self.memo_hits,
            expansions: self.expansions,
            truncated: self.truncated,
            memo: self.memo,
        }
    }

    fn open(&mut self, layer: Layer<S>) {
        self.expansions += 1;
        let arity = layer.children.len();
        self.agenda.push(ChronoFrame::Lift {
            atom: layer.atom,
            arity,
        });
        for child in layer.children.into_iter().rev() {
            self.agenda.push(match child.next {
                Next::Seed(s) => ChronoFrame::Eval(s),
                Next::Now(l) => ChronoFrame::Layer(*l),
            });
        }
    }
}

impl<S: Clone + Ord, V: Clone> MorphRun for ChronoRun<S, V> {
    fn kind(&self) -> RunKind {
        RunKind::Chrono
    }
    fn status(&self) -> RunStatus {
        self.status
    }
    fn stamp(&self) -> Option<u64> {
        None
    }
    fn frames_done(&self) -> u64 {
        self.frames_done
    }
    fn memo_hits(&self) -> u64 {
        self.memo_hits
    }
    fn set_status(&mut self, status: RunStatus) {
        self.status = status;
    }

    fn step(&mut self) -> Result<bool, MorphError> {
        let Some(frame) = self.agenda.pop() else {
            let top = self.values.pop().flatten();
            self.result = Some(top.unwrap_or_else(|| self.algebra.unit().clone()));
            return Ok(true);
        };
        self.frames_done += 1;
        let share = self.coalgebra.shares_seeds();
        match frame {
            ChronoFrame::Eval(seed) => {
                if let Some(v) = self.memo.get(&seed).filter(|_| share) {
                    self.memo_hits += 1;
                    self.values.push(Some(v.clone()));
                } else if share && self.in_progress.contains(&seed) {
                    return Err(MorphError::Cyclic);
                } else if self.expansions >= self.budget {
                    self.truncated = true;
                    self.values.push(None);
                } else if let Some(layer) = self.coalgebra.expand(&seed) {
                    if share {
                        self.in_progress.insert(seed.clone());
                        self.agenda.push(ChronoFrame::Store(seed));
                    }
                    self.open(layer);
                } else {
                    self.values.push(None);
                }
            }
            ChronoFrame::Layer(layer) => {
                if self.expansions >= self.budget {
                    self.truncated = true;
                    self.values.push(None);
                } else {
                    self.open(layer);
                }
            }
            ChronoFrame::Lift { atom, arity } => {
                let children = self.values.split_off(self.values.len() - arity);
                let v = self.algebra.lift(&AtomView::new(&atom, arity), &children);
                self.values.push(Some(v));
            }
            ChronoFrame::Store(seed) => {
                if let Some(Some(v)) = self.values.last() {
                    self.memo.insert(seed.clone(), v.clone());
                }
                self.in_progress.remove(&seed);
            }
        }
        Ok(false)
    }
}
