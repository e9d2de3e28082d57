//! JSON fixture formats and their canonical form.
//!
//! Every fixture type is a plain serde struct with `deny_unknown_fields`,
//! plus a [`Fixture::validate`] step that builds the core value and reports
//! the first semantic problem together with the offending field. Canonical
//! text is `serde_json` pretty output with a trailing newline, so
//! `emit(parse(emit(x))) == emit(x)` byte for byte.

mod cofo;
mod cog;
mod dds;
mod metagraph;
mod relalg;
mod subpattern;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

pub use cofo::{CofoFile, CofoFixture, CombinatorRecord, DomainPoint, HypothesisRecord, QualityRecord, SamplerRecord};
pub use cog::{
    format_statement, formula_id, parse_statement, EdgeRecord, EvolveFile, PatternFile, PatternRecord, PointsFile,
    RuleRecord, RuleSetFile, VariationRecord,
};
pub use dds::{ActionRecord, DdsFile, NextRecord, StageState};
pub use metagraph::{AtomRecord, KindRecord, MetagraphFile, SlotRecord, TargetRecord, TvRecord};
pub use relalg::{
    CarrierRecord, FunctorRecord, ReadingRecord, RelalgFile, RelalgFixture, RelationRecord, SummandRecord, ValueRecord,
};
pub use subpattern::{ItemsRecord, SubpatternFile, SubpatternInput, MAX_BLOCK_N};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{}: cannot read: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: cannot write: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{}: schema violation at `{field}`: {message}", path.display())]
    Schema {
        path: PathBuf,
        field: String,
        message: String,
    },
}

impl FormatError {
    /// Field path of a schema violation.
    pub fn field(&self) -> Option<&str> {
        match self {
            FormatError::Schema { field, .. } => Some(field),
            _ => None,
        }
    }
}

/// A semantic problem found after parsing, located by field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub field: String,
    pub message: String,
}

impl Issue {
    pub fn new(field: impl Into<String>, message: impl ToString) -> Self {
        Self {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

/// A file format whose parsed form converts into a core value.
pub trait Fixture: Serialize + DeserializeOwned {
    type Value;
    fn validate(&self) -> Result<Self::Value, Issue>;
}

/// Parse `text` (reported as coming from `origin`) without validating.
pub fn parse<T: DeserializeOwned>(text: &str, origin: &Path) -> Result<T, FormatError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let schema = |field: String, e: &serde_json::Error| FormatError::Schema {
        path: origin.to_path_buf(),
        field,
        message: e.to_string(),
    };
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        schema(field, e.inner())
    })?;
    de.end().map_err(|e| schema(".".into(), &e))?;
    Ok(value)
}

/// Parse and validate.
pub fn parse_fixture<T: Fixture>(text: &str, origin: &Path) -> Result<(T, T::Value), FormatError> {
    let file: T = parse(text, origin)?;
    let value = file.validate().map_err(|i| FormatError::Schema {
        path: origin.to_path_buf(),
        field: i.field,
        message: i.message,
    })?;
    Ok((file, value))
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Read, parse and validate a fixture file.
pub fn load<T: Fixture>(path: &Path) -> Result<(T, T::Value), FormatError> {
    parse_fixture(&read_text(path)?, path)
}

/// Canonical JSON text.
pub fn emit<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("fixture types serialize");
    s.push('\n');
    s
}

pub fn save<T: Serialize>(value: &T, path: &Path) -> Result<(), FormatError> {
    fs::write(path, emit(value)).map_err(|source| FormatError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}
