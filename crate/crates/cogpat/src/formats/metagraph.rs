use cogpat_core::metagraph::{AtomKind, AtomSpec, DanglingSlot, MgError, SlotId, Target};
use cogpat_core::{AtomId, TruthValue, TypedMetagraph};
use serde::{Deserialize, Serialize};

use super::{is_zero, Fixture, Issue};

/// `{"atoms": [...], "dangling": [...]}`; atom targets are atom ids or
/// `{"slot": n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetagraphFile {
    pub atoms: Vec<AtomRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dangling: Vec<SlotRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindRecord {
    Node,
    Edge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomRecord {
    pub id: u32,
    pub kind: KindRecord,
    #[serde(rename = "type")]
    pub type_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<TargetRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tv: Option<TvRecord>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub sti: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub lti: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetRecord {
    Atom(u32),
    Slot { slot: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TvRecord {
    pub s: f64,
    pub c: f64,
}

impl TvRecord {
    pub fn of(tv: TruthValue) -> Self {
        Self {
            s: tv.strength(),
            c: tv.confidence(),
        }
    }

    pub fn to_tv(self) -> Result<TruthValue, cogpat_core::tv::TvError> {
        TruthValue::new(self.s, self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotRecord {
    pub slot: u32,
    #[serde(rename = "type")]
    pub type_label: String,
}

impl MetagraphFile {
    pub fn from_metagraph(mg: &TypedMetagraph) -> Self {
        let atoms = mg
            .atoms()
            .map(|a| AtomRecord {
                id: a.id().0,
                kind: match a.kind() {
                    AtomKind::Node => KindRecord::Node,
                    AtomKind::Edge => KindRecord::Edge,
                },
                type_label: a.type_label().to_string(),
                name: a.name().map(str::to_string),
                targets: a
                    .targets()
                    .iter()
                    .map(|t| match t {
                        Target::Atom(x) => TargetRecord::Atom(x.0),
                        Target::Slot(s) => TargetRecord::Slot { slot: s.0 },
                    })
                    .collect(),
                tv: a.tv().map(TvRecord::of),
                sti: a.sti(),
                lti: a.lti(),
            })
            .collect();
        let dangling = mg
            .dangling()
            .iter()
            .map(|d| SlotRecord {
                slot: d.slot.0,
                type_label: d.type_label.clone(),
            })
            .collect();
        Self { atoms, dangling }
    }

    fn atom_field(&self, id: Option<AtomId>) -> String {
        id.and_then(|id| self.atoms.iter().position(|a| a.id == id.0))
            .map_or_else(|| "atoms".into(), |i| format!("atoms[{i}]"))
    }
}

impl Fixture for MetagraphFile {
    type Value = TypedMetagraph;

    fn validate(&self) -> Result<TypedMetagraph, Issue> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (i, a) in self.atoms.iter().enumerate() {
            if !a.sti.is_finite() || !a.lti.is_finite() {
                return Err(Issue::new(format!("atoms[{i}]"), "importance values must be finite"));
            }
            let targets = a
                .targets
                .iter()
                .map(|t| match t {
                    TargetRecord::Atom(x) => Target::Atom(AtomId(*x)),
                    TargetRecord::Slot { slot } => Target::Slot(SlotId(*slot)),
                })
                .collect();
            let kind = match a.kind {
                KindRecord::Node => AtomKind::Node,
                KindRecord::Edge => AtomKind::Edge,
            };
            let tv =
                a.tv.map(|t| t.to_tv().map_err(|e| Issue::new(format!("atoms[{i}].tv"), e)))
                    .transpose()?;
            let spec = AtomSpec {
                kind,
                type_label: a.type_label.clone(),
                name: a.name.clone(),
                targets,
                tv,
                sti: a.sti,
                lti: a.lti,
            };
            atoms.push((AtomId(a.id), spec));
        }
        let dangling = self
            .dangling
            .iter()
            .map(|d| DanglingSlot {
                slot: SlotId(d.slot),
                type_label: d.type_label.clone(),
            })
            .collect();
        TypedMetagraph::from_parts(atoms, dangling).map_err(|e| {
            let field = match &e {
                MgError::Integrity { atom, .. } => format!("{}.targets", self.atom_field(*atom)),
                MgError::DuplicateId(id) => format!("{}.id", self.atom_field(Some(*id))),
                MgError::DuplicateSlot(_) => "dangling".into(),
                MgError::Shape { .. } => shape_field(self),
                _ => "atoms".into(),
            };
            Issue::new(field, e)
        })
    }
}

fn shape_field(f: &MetagraphFile) -> String {
    f.atoms
        .iter()
        .position(|a| match a.kind {
            KindRecord::Node => !a.targets.is_empty(),
            KindRecord::Edge => a.targets.is_empty(),
        })
        .map_or_else(|| "atoms".into(), |i| format!("atoms[{i}].targets"))
}
