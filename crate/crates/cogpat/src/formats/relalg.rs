use std::collections::BTreeMap;
use std::sync::Arc;

use cogpat_core::relalg::{Carrier, Field, FinRel, FunctorSpec, Reading, Summand, Value, DEFAULT_DEPTH};
use serde::{Deserialize, Serialize};

use super::{Fixture, Issue};

/// Carriers, a polynomial functor and the relations of an inclusion check.
/// Relation endpoints name a carrier (`"B"`) or the functor applied to one
/// (`"L(B)"` for a functor named `L`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelalgFile {
    pub carriers: Vec<CarrierRecord>,
    pub functor: FunctorRecord,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default, skip_serializing_if = "is_converse")]
    pub reading: ReadingRecord,
    pub s: RelationRecord,
    pub r: RelationRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<RelationRecord>,
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReadingRecord {
    #[default]
    Converse,
    Literal,
}

fn is_converse(r: &ReadingRecord) -> bool {
    *r == ReadingRecord::Converse
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierRecord {
    pub name: String,
    pub elems: Vec<ValueRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorRecord {
    pub name: String,
    pub summands: Vec<SummandRecord>,
}

/// Fields are `"rec"` or the name of a constant carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandRecord {
    pub name: String,
    pub fields: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationRecord {
    pub source: String,
    pub target: String,
    pub pairs: Vec<(ValueRecord, ValueRecord)>,
}

/// An integer, a symbol, or a functor structure `{"tag": k, "fields": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueRecord {
    Int(i64),
    Sym(String),
    Tagged { tag: u8, fields: Vec<ValueRecord> },
}

impl ValueRecord {
    pub fn to_value(&self) -> Value {
        match self {
            ValueRecord::Int(i) => Value::Int(*i),
            ValueRecord::Sym(s) => Value::Sym(s.clone()),
            ValueRecord::Tagged { tag, fields } => Value::Tagged(*tag, fields.iter().map(Self::to_value).collect()),
        }
    }

    pub fn of(v: &Value) -> Self {
        match v {
            Value::Int(i) => ValueRecord::Int(*i),
            Value::Sym(s) => ValueRecord::Sym(s.clone()),
            Value::Tagged(tag, fields) => ValueRecord::Tagged {
                tag: *tag,
                fields: fields.iter().map(Self::of).collect(),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelalgFixture {
    pub functor: FunctorSpec,
    pub depth: usize,
    pub reading: Reading,
    pub s: FinRel,
    pub r: FinRel,
    pub t: Option<FinRel>,
}

impl Fixture for RelalgFile {
    type Value = RelalgFixture;

    fn validate(&self) -> Result<RelalgFixture, Issue> {
        let mut carriers: BTreeMap<String, Arc<Carrier>> = BTreeMap::new();
        for (i, c) in self.carriers.iter().enumerate() {
            if carriers.contains_key(&c.name) {
                return Err(Issue::new(
                    format!("carriers[{i}].name"),
                    format!("duplicate carrier {}", c.name),
                ));
            }
            carriers.insert(
                c.name.clone(),
                Carrier::new(&c.name, c.elems.iter().map(ValueRecord::to_value)),
            );
        }
        let mut summands = Vec::new();
        for (i, s) in self.functor.summands.iter().enumerate() {
            let mut fields = Vec::new();
            for (j, f) in s.fields.iter().enumerate() {
                if f == "rec" {
                    fields.push(Field::Rec);
                } else {
                    let c = carriers.get(f).ok_or_else(|| {
                        Issue::new(
                            format!("functor.summands[{i}].fields[{j}]"),
                            format!("unknown carrier {f}"),
                        )
                    })?;
                    fields.push(Field::Const(Arc::clone(c)));
                }
            }
            summands.push(Summand {
                name: s.name.clone(),
                fields,
            });
        }
        let functor = FunctorSpec::new(&self.functor.name, summands).map_err(|e| Issue::new("functor", e))?;
        if self.depth == 0 {
            return Err(Issue::new("depth", "must be at least 1"));
        }
        let carrier = |field: &str, name: &str| -> Result<Arc<Carrier>, Issue> {
            let applied = name
                .strip_prefix(functor.name())
                .and_then(|rest| rest.strip_prefix('('))
                .and_then(|rest| rest.strip_suffix(')'));
            match applied {
                Some(inner) => carriers.get(inner).map(|c| functor.apply(c)),
                None => carriers.get(name).cloned(),
            }
            .ok_or_else(|| Issue::new(field, format!("unknown carrier {name}")))
        };
        let relation = |field: &str, rec: &RelationRecord| -> Result<FinRel, Issue> {
            let src = carrier(&format!("{field}.source"), &rec.source)?;
            let tgt = carrier(&format!("{field}.target"), &rec.target)?;
            FinRel::new(&src, &tgt, rec.pairs.iter().map(|(a, b)| (a.to_value(), b.to_value())))
                .map_err(|e| Issue::new(format!("{field}.pairs"), e))
        };
        Ok(RelalgFixture {
            s: relation("s", &self.s)?,
            r: relation("r", &self.r)?,
            t: self.t.as_ref().map(|t| relation("t", t)).transpose()?,
            functor,
            depth: self.depth,
            reading: match self.reading {
                ReadingRecord::Converse => Reading::Converse,
                ReadingRecord::Literal => Reading::Literal,
            },
        })
    }
}
