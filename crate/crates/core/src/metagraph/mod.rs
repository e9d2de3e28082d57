//! Typed metagraph storage.
//!
//! Atoms are nodes or edges. Edge targets are ordered and may point at nodes,
//! other edges, or declared dangling slots. Dangling slots are what
//! [`join`] binds when two metagraphs are glued together.

mod canonical;

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use thiserror::Error;

use crate::rng;
use crate::tv::TruthValue;

pub use canonical::CANONICAL_ATOM_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Node,
    Edge,
}

impl AtomKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AtomKind::Node => "node",
            AtomKind::Edge => "edge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Atom(AtomId),
    Slot(SlotId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MgError {
    #[error("atom {atom:?} targets {target:?}, which is neither an atom nor a declared dangling slot")]
    Integrity { atom: Option<AtomId>, target: Target },
    #[error("node atoms take no targets and edge atoms need at least one ({kind:?} with {arity} targets)")]
    Shape { kind: AtomKind, arity: usize },
    #[error("duplicate atom id {0}")]
    DuplicateId(AtomId),
    #[error("duplicate dangling slot {0:?}")]
    DuplicateSlot(SlotId),
    #[error("slot {slot:?} expects type {expected}, bound atom has type {found}")]
    TypeMismatch {
        slot: SlotId,
        expected: String,
        found: String,
    },
    #[error("binding refers to slot {slot:?} or atom {atom} that does not exist")]
    Binding { slot: SlotId, atom: AtomId },
    #[error("unknown atom {0}")]
    UnknownAtom(AtomId),
    #[error("every sampling weight is zero")]
    EmptySupport,
    #[error("invalid sampling weight {weight} for atom {atom}")]
    InvalidWeight { atom: AtomId, weight: f64 },
    #[error("canonical form is limited to {limit} atoms, got {atoms}")]
    TooLarge { atoms: usize, limit: usize },
}

/// What a caller supplies to create an atom.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpec {
    pub kind: AtomKind,
    pub type_label: String,
    pub name: Option<String>,
    pub targets: Vec<Target>,
    pub tv: Option<TruthValue>,
    pub sti: f64,
    pub lti: f64,
}

impl AtomSpec {
    pub fn node(type_label: &str) -> Self {
        Self {
            kind: AtomKind::Node,
            type_label: type_label.into(),
            name: None,
            targets: Vec::new(),
            tv: None,
            sti: 0.0,
            lti: 0.0,
        }
    }

    pub fn edge(type_label: &str, targets: Vec<Target>) -> Self {
        Self {
            kind: AtomKind::Edge,
            targets,
            ..Self::node(type_label)
        }
    }

    /// Edge over plain atom ids.
    pub fn link(type_label: &str, targets: &[AtomId]) -> Self {
        Self::edge(type_label, targets.iter().map(|a| Target::Atom(*a)).collect())
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_tv(mut self, tv: TruthValue) -> Self {
        self.tv = Some(tv);
        self
    }

    pub fn with_sti(mut self, sti: f64) -> Self {
        self.sti = sti;
        self
    }

    pub fn with_lti(mut self, lti: f64) -> Self {
        self.lti = lti;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    id: AtomId,
    spec: AtomSpec,
}

impl Atom {
    pub fn id(&self) -> AtomId {
        self.id
    }
    pub fn kind(&self) -> AtomKind {
        self.spec.kind
    }
    pub fn type_label(&self) -> &str {
        &self.spec.type_label
    }
    pub fn name(&self) -> Option<&str> {
        self.spec.name.as_deref()
    }
    pub fn targets(&self) -> &[Target] {
        &self.spec.targets
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
    pub fn spec(&self) -> &AtomSpec {
        &self.spec
    }
    pub fn is_node(&self) -> bool {
        self.spec.kind == AtomKind::Node
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DanglingSlot {
    pub slot: SlotId,
    pub type_label: String,
}

/// Slot bindings for [`join`]: left-operand slots to right-operand atoms and
/// the reverse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JoinBinding {
    pub left_to_right: Vec<(SlotId, AtomId)>,
    pub right_to_left: Vec<(SlotId, AtomId)>,
}

impl JoinBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind_left(mut self, slot: SlotId, right_atom: AtomId) -> Self {
        self.left_to_right.push((slot, right_atom));
        self
    }

    pub fn bind_right(mut self, slot: SlotId, left_atom: AtomId) -> Self {
        self.right_to_left.push((slot, left_atom));
        self
    }
}

/// How a join renumbered the right operand. Left ids are kept as they were.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JoinOffsets {
    pub atom_offset: u32,
    pub slot_offset: u32,
}

impl JoinOffsets {
    pub fn right_atom(&self, id: AtomId) -> AtomId {
        AtomId(id.0 + self.atom_offset)
    }
    pub fn right_slot(&self, slot: SlotId) -> SlotId {
        SlotId(slot.0 + self.slot_offset)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypedMetagraph {
    atoms: BTreeMap<AtomId, Atom>,
    dangling: Vec<DanglingSlot>,
    next_id: u32,
    next_slot: u32,
    version: u64,
}

impl TypedMetagraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuild a metagraph from stored parts (e.g. a fixture file).
    /// Validates ids, shapes and referential integrity. The version starts
    /// at zero.
    pub fn from_parts(atoms: Vec<(AtomId, AtomSpec)>, dangling: Vec<DanglingSlot>) -> Result<Self, MgError> {
        let mut mg = Self::new();
        for d in dangling {
            if mg.dangling.iter().any(|x| x.slot == d.slot) {
                return Err(MgError::DuplicateSlot(d.slot));
            }
            mg.next_slot = mg.next_slot.max(d.slot.0 + 1);
            mg.dangling.push(d);
        }
        for (id, spec) in atoms {
            check_shape(&spec)?;
            if mg.atoms.contains_key(&id) {
                return Err(MgError::DuplicateId(id));
            }
            mg.next_id = mg.next_id.max(id.0 + 1);
            mg.atoms.insert(id, Atom { id, spec });
        }
        mg.check_integrity()?;
        Ok(mg)
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, id: AtomId) -> Option<&Atom> {
        self.atoms.get(&id)
    }

    /// Atoms in id order.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.atoms.values()
    }

    pub fn atom_ids(&self) -> Vec<AtomId> {
        self.atoms.keys().copied().collect()
    }

    pub fn dangling(&self) -> &[DanglingSlot] {
        &self.dangling
    }

    pub fn slot_type(&self, slot: SlotId) -> Option<&str> {
        self.dangling
            .iter()
            .find(|d| d.slot == slot)
            .map(|d| d.type_label.as_str())
    }

    fn resolves(&self, target: &Target) -> bool {
        match target {
            Target::Atom(a) => self.atoms.contains_key(a),
            Target::Slot(s) => self.dangling.iter().any(|d| d.slot == *s),
        }
    }

    pub fn add_atom(&mut self, spec: AtomSpec) -> Result<AtomId, MgError> {
        check_shape(&spec)?;
        if let Some(bad) = spec.targets.iter().find(|t| !self.resolves(t)) {
            return Err(MgError::Integrity {
                atom: None,
                target: *bad,
            });
        }
        let id = AtomId(self.next_id);
        self.next_id += 1;
        self.atoms.insert(id, Atom { id, spec });
        self.version += 1;
        Ok(id)
    }

    pub fn declare_dangling(&mut self, type_label: &str) -> SlotId {
        let slot = SlotId(self.next_slot);
        self.next_slot += 1;
        self.dangling.push(DanglingSlot {
            slot,
            type_label: type_label.into(),
        });
        self.version += 1;
        slot
    }

    /// Bind a dangling slot of this metagraph to one of its own atoms.
    pub fn bind_slot(&mut self, slot: SlotId, atom: AtomId) -> Result<(), MgError> {
        let expected = self.slot_type(slot).ok_or(MgError::Binding { slot, atom })?.to_owned();
        let found = self
            .atoms
            .get(&atom)
            .ok_or(MgError::Binding { slot, atom })?
            .type_label()
            .to_owned();
        if expected != found {
            return Err(MgError::TypeMismatch { slot, expected, found });
        }
        for a in self.atoms.values_mut() {
            for t in a.spec.targets.iter_mut() {
                if *t == Target::Slot(slot) {
                    *t = Target::Atom(atom);
                }
            }
        }
        self.dangling.retain(|d| d.slot != slot);
        self.version += 1;
        Ok(())
    }

    /// [`bind_slot`](Self::bind_slot) when the only atom holding `slot` is
    /// known, avoiding a scan of the whole metagraph.
    pub(crate) fn bind_slot_of(&mut self, owner: AtomId, slot: SlotId, atom: AtomId) -> Result<(), MgError> {
        let expected = self.slot_type(slot).ok_or(MgError::Binding { slot, atom })?;
        let found = self
            .atoms
            .get(&atom)
            .ok_or(MgError::Binding { slot, atom })?
            .type_label();
        if expected != found {
            return Err(MgError::TypeMismatch {
                slot,
                expected: expected.into(),
                found: found.into(),
            });
        }
        let holder = self.atoms.get_mut(&owner).ok_or(MgError::UnknownAtom(owner))?;
        for t in holder.spec.targets.iter_mut() {
            if *t == Target::Slot(slot) {
                *t = Target::Atom(atom);
            }
        }
        self.dangling.retain(|d| d.slot != slot);
        self.version += 1;
        Ok(())
    }

    pub fn set_sti(&mut self, id: AtomId, sti: f64) -> Result<(), MgError> {
        let atom = self.atoms.get_mut(&id).ok_or(MgError::UnknownAtom(id))?;
        atom.spec.sti = sti;
        self.version += 1;
        Ok(())
    }

    pub fn set_tv(&mut self, id: AtomId, tv: Option<TruthValue>) -> Result<(), MgError> {
        let atom = self.atoms.get_mut(&id).ok_or(MgError::UnknownAtom(id))?;
        atom.spec.tv = tv;
        self.version += 1;
        Ok(())
    }

    pub fn check_integrity(&self) -> Result<(), MgError> {
        for a in self.atoms.values() {
            check_shape(&a.spec)?;
            if let Some(bad) = a.spec.targets.iter().find(|t| !self.resolves(t)) {
                return Err(MgError::Integrity {
                    atom: Some(a.id),
                    target: *bad,
                });
            }
        }
        Ok(())
    }

    /// Atoms no other atom points at, in id order.
    pub fn roots(&self) -> Vec<AtomId> {
        let targeted: BTreeSet<AtomId> = self
            .atoms
            .values()
            .flat_map(|a| a.targets())
            .filter_map(|t| match t {
                Target::Atom(id) => Some(*id),
                Target::Slot(_) => None,
            })
            .collect();
        self.atoms.keys().filter(|id| !targeted.contains(id)).copied().collect()
    }

    /// The sub-metagraph made of `roots` and everything reachable through
    /// targets. Ids are preserved; referenced dangling slots come along.
    pub fn sub_metagraph(&self, roots: &[AtomId]) -> Result<TypedMetagraph, MgError> {
        let mut keep = BTreeSet::new();
        let mut slots = BTreeSet::new();
        let mut stack: Vec<AtomId> = roots.to_vec();
        while let Some(id) = stack.pop() {
            let atom = self.atoms.get(&id).ok_or(MgError::UnknownAtom(id))?;
            if !keep.insert(id) {
                continue;
            }
            for t in atom.targets() {
                match t {
                    Target::Atom(a) => stack.push(*a),
                    Target::Slot(s) => {
                        slots.insert(*s);
                    }
                }
            }
        }
        let mut out = TypedMetagraph {
            next_id: self.next_id,
            next_slot: self.next_slot,
            ..Default::default()
        };
        for id in keep {
            out.atoms.insert(id, self.atoms[&id].clone());
        }
        out.dangling = self
            .dangling
            .iter()
            .filter(|d| slots.contains(&d.slot))
            .cloned()
            .collect();
        Ok(out)
    }

    /// Draw `k` atoms independently with probability proportional to
    /// `weight`. Atoms are considered in id order, so a fixed seed always
    /// produces the same draws.
    pub fn sample_atoms<W>(&self, weight: W, k: usize, seed: u64) -> Result<Vec<AtomId>, MgError>
    where
        W: Fn(&Atom) -> f64,
    {
        let mut ids = Vec::with_capacity(self.atoms.len());
        let mut weights = Vec::with_capacity(self.atoms.len());
        for a in self.atoms.values() {
            let w = weight(a);
            if !w.is_finite() || w < 0.0 {
                return Err(MgError::InvalidWeight { atom: a.id, weight: w });
            }
            ids.push(a.id);
            weights.push(w);
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(MgError::EmptySupport);
        }
        let dist = WeightedIndex::new(&weights).map_err(|_| MgError::EmptySupport)?;
        let mut r = rng::seeded(seed);
        Ok((0..k).map(|_| ids[dist.sample(&mut r)]).collect())
    }

    /// Isomorphism-stable text token; see [`CANONICAL_ATOM_LIMIT`].
    pub fn canonical_form(&self) -> Result<String, MgError> {
        canonical::canonical_form(self)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            graph: Arc::new(self.clone()),
            stamp: self.version,
        }
    }
}

fn check_shape(spec: &AtomSpec) -> Result<(), MgError> {
    let ok = match spec.kind {
        AtomKind::Node => spec.targets.is_empty(),
        AtomKind::Edge => !spec.targets.is_empty(),
    };
    if ok {
        Ok(())
    } else {
        Err(MgError::Shape {
            kind: spec.kind,
            arity: spec.targets.len(),
        })
    }
}

/// Join two metagraphs, binding dangling slots across them.
///
/// The left operand keeps its atom and slot ids; the right operand is shifted
/// by the left's id counters (see [`join_with_offsets`]). Slots left unbound
/// stay dangling in the result. Neither operand is modified.
pub fn join(left: &TypedMetagraph, right: &TypedMetagraph, binding: &JoinBinding) -> Result<TypedMetagraph, MgError> {
    join_with_offsets(left, right, binding).map(|(g, _)| g)
}

pub fn join_with_offsets(
    left: &TypedMetagraph,
    right: &TypedMetagraph,
    binding: &JoinBinding,
) -> Result<(TypedMetagraph, JoinOffsets), MgError> {
    let offsets = JoinOffsets {
        atom_offset: left.next_id,
        slot_offset: left.next_slot,
    };
    let left_map = validate_binding(left, right, &binding.left_to_right)?;
    let right_map = validate_binding(right, left, &binding.right_to_left)?;

    let mut out = TypedMetagraph {
        next_id: left.next_id + right.next_id,
        next_slot: left.next_slot + right.next_slot,
        version: left.version.max(right.version) + 1,
        ..Default::default()
    };
    for a in left.atoms.values() {
        let mut spec = a.spec.clone();
        for t in spec.targets.iter_mut() {
            if let Target::Slot(s) = t {
                if let Some(r) = left_map.get(s) {
                    *t = Target::Atom(offsets.right_atom(*r));
                }
            }
        }
        out.atoms.insert(a.id, Atom { id: a.id, spec });
    }
    for a in right.atoms.values() {
        let mut spec = a.spec.clone();
        for t in spec.targets.iter_mut() {
            *t = match *t {
                Target::Atom(x) => Target::Atom(offsets.right_atom(x)),
                Target::Slot(s) => match right_map.get(&s) {
                    Some(l) => Target::Atom(*l),
                    None => Target::Slot(offsets.right_slot(s)),
                },
            };
        }
        let id = offsets.right_atom(a.id);
        out.atoms.insert(id, Atom { id, spec });
    }
    out.dangling.extend(
        left.dangling
            .iter()
            .filter(|d| !left_map.contains_key(&d.slot))
            .cloned(),
    );
    out.dangling.extend(
        right
            .dangling
            .iter()
            .filter(|d| !right_map.contains_key(&d.slot))
            .map(|d| DanglingSlot {
                slot: offsets.right_slot(d.slot),
                type_label: d.type_label.clone(),
            }),
    );
    Ok((out, offsets))
}

fn validate_binding(
    slots_of: &TypedMetagraph,
    atoms_of: &TypedMetagraph,
    pairs: &[(SlotId, AtomId)],
) -> Result<BTreeMap<SlotId, AtomId>, MgError> {
    let mut map = BTreeMap::new();
    for &(slot, atom) in pairs {
        let expected = slots_of.slot_type(slot).ok_or(MgError::Binding { slot, atom })?;
        let found = atoms_of.atom(atom).ok_or(MgError::Binding { slot, atom })?.type_label();
        if expected != found {
            return Err(MgError::TypeMismatch {
                slot,
                expected: expected.into(),
                found: found.into(),
            });
        }
        if map.insert(slot, atom).is_some() {
            return Err(MgError::Binding { slot, atom });
        }
    }
    Ok(map)
}

/// Immutable view of a metagraph at a given version.
#[derive(Debug, Clone)]
pub struct Snapshot {
    graph: Arc<TypedMetagraph>,
    stamp: u64,
}

impl Snapshot {
    pub fn stamp(&self) -> u64 {
        self.stamp
    }

    pub fn graph(&self) -> &TypedMetagraph {
        &self.graph
    }

    /// A snapshot of a snapshot shares the same data and stamp.
    pub fn snapshot(&self) -> Snapshot {
        self.clone()
    }

    /// True once `live` has moved past the version this view captured.
    pub fn is_stale(&self, live: &TypedMetagraph) -> bool {
        live.version() != self.stamp
    }
}

impl Deref for Snapshot {
    type Target = TypedMetagraph;
    fn deref(&self) -> &TypedMetagraph {
        &self.graph
    }
}

impl From<TypedMetagraph> for Snapshot {
    fn from(g: TypedMetagraph) -> Self {
        let stamp = g.version;
        Snapshot {
            graph: Arc::new(g),
            stamp,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_nodes() -> TypedMetagraph {
        let mut mg = TypedMetagraph::new();
        mg.add_atom(AtomSpec::node("Concept").named("a")).unwrap();
        mg.add_atom(AtomSpec::node("Concept").named("b")).unwrap();
        mg
    }

    #[test]
    fn first_insertion_gets_id_zero() {
        let mut mg = TypedMetagraph::new();
        let id = mg.add_atom(AtomSpec::node("Concept").named("A")).unwrap();
        assert_eq!(id, AtomId(0));
        assert_eq!(mg.version(), 1);
    }

    #[test]
    fn well_formed_edge() {
        let mut mg = two_nodes();
        let e = mg
            .add_atom(AtomSpec::link("Inheritance", &[AtomId(0), AtomId(1)]))
            .unwrap();
        assert_eq!(e, AtomId(2));
    }

    #[test]
    fn broken_reference_is_integrity_error() {
        let mut mg = two_nodes();
        let err = mg
            .add_atom(AtomSpec::link("Inheritance", &[AtomId(0), AtomId(9)]))
            .unwrap_err();
        assert!(matches!(err, MgError::Integrity { .. }));
        assert_eq!(mg.len(), 2);
    }

    #[test]
    fn shape_rules() {
        let mut mg = two_nodes();
        let mut bad = AtomSpec::node("Concept");
        bad.targets.push(Target::Atom(AtomId(0)));
        assert!(matches!(mg.add_atom(bad), Err(MgError::Shape { .. })));
        assert!(matches!(
            mg.add_atom(AtomSpec::edge("List", Vec::new())),
            Err(MgError::Shape { .. })
        ));
    }

    #[test]
    fn full_binding_leaves_no_dangling() {
        let mut m1 = TypedMetagraph::new();
        let s = m1.declare_dangling("Concept");
        m1.add_atom(AtomSpec::edge("Eval", alloc::vec![Target::Slot(s)]))
            .unwrap();
        let mut m2 = TypedMetagraph::new();
        let n = m2.add_atom(AtomSpec::node("Concept").named("x")).unwrap();
        let joined = join(&m1, &m2, &JoinBinding::new().bind_left(s, n)).unwrap();
        assert!(joined.dangling().is_empty());
        assert_eq!(joined.len(), 2);
        joined.check_integrity().unwrap();
        // operands untouched
        assert_eq!(m1.dangling().len(), 1);
        assert_eq!(m2.len(), 1);
    }

    #[test]
    fn binding_type_mismatch() {
        let mut m1 = TypedMetagraph::new();
        let s = m1.declare_dangling("Number");
        m1.add_atom(AtomSpec::edge("Eval", alloc::vec![Target::Slot(s)]))
            .unwrap();
        let mut m2 = TypedMetagraph::new();
        let n = m2.add_atom(AtomSpec::node("Concept")).unwrap();
        let err = join(&m1, &m2, &JoinBinding::new().bind_left(s, n)).unwrap_err();
        assert!(matches!(err, MgError::TypeMismatch { .. }));
    }

    #[test]
    fn binding_missing_slot() {
        let m1 = TypedMetagraph::new();
        let m2 = two_nodes();
        let err = join(&m1, &m2, &JoinBinding::new().bind_left(SlotId(3), AtomId(0))).unwrap_err();
        assert!(matches!(err, MgError::Binding { .. }));
    }

    #[test]
    fn unbound_slots_stay_dangling_and_renumber() {
        let mut m1 = TypedMetagraph::new();
        m1.declare_dangling("Concept");
        let mut m2 = TypedMetagraph::new();
        let s = m2.declare_dangling("Concept");
        m2.add_atom(AtomSpec::edge("Eval", alloc::vec![Target::Slot(s)]))
            .unwrap();
        let (g, off) = join_with_offsets(&m1, &m2, &JoinBinding::new()).unwrap();
        assert_eq!(g.dangling().len(), 2);
        assert_eq!(off.right_slot(s), SlotId(1));
        g.check_integrity().unwrap();
    }

    #[test]
    fn sampling_unit_support_and_errors() {
        let mut mg = TypedMetagraph::new();
        mg.add_atom(AtomSpec::node("Concept")).unwrap();
        let draws = mg.sample_atoms(|_| 2.5, 20, 7).unwrap();
        assert!(draws.iter().all(|d| *d == AtomId(0)));
        assert_eq!(mg.sample_atoms(|_| 0.0, 3, 7), Err(MgError::EmptySupport));
        assert!(matches!(
            mg.sample_atoms(|_| -1.0, 3, 7),
            Err(MgError::InvalidWeight { .. })
        ));
    }

    #[test]
    fn snapshot_is_isolated_from_mutation() {
        let mut mg = two_nodes();
        let view = mg.snapshot();
        mg.add_atom(AtomSpec::node("Concept")).unwrap();
        assert_eq!(view.len(), 2);
        assert!(view.is_stale(&mg));
        assert!(view.stamp() < mg.version());
        assert_eq!(view.snapshot().stamp(), view.stamp());
        assert!(!mg.snapshot().is_stale(&mg));
    }

    #[test]
    fn roots_and_closure() {
        let mut mg = two_nodes();
        let e = mg
            .add_atom(AtomSpec::link("Inheritance", &[AtomId(0), AtomId(1)]))
            .unwrap();
        mg.add_atom(AtomSpec::node("Concept")).unwrap();
        assert_eq!(mg.roots(), alloc::vec![e, AtomId(3)]);
        let sub = mg.sub_metagraph(&[e]).unwrap();
        assert_eq!(sub.len(), 3);
    }
}
