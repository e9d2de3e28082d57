use std::collections::BTreeSet;

use cogpat_core::subpattern::{block_union, nonempty_subsets, string_op, BinOp};
use serde::{Deserialize, Serialize};

use super::{Fixture, Issue};

/// Items and named operations for `subpattern audit` and `subpattern dag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubpatternFile {
    pub domain: ItemsRecord,
    pub ops: Vec<String>,
    /// Constant `σ*` charged per dag edge.
    #[serde(default = "one")]
    pub sigma_star: f64,
    /// Random triples per operator pair when the domain is too large for
    /// an exhaustive audit.
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn one() -> f64 {
    1.0
}

fn default_trials() -> usize {
    10_000
}

/// `int` items use `|x|` as `σ`, `string` items their length, `blocks`
/// (subsets of `0..n`, all of them when only `n` is given) their number of
/// within-block pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ItemsRecord {
    Int {
        items: Vec<i64>,
    },
    String {
        items: Vec<String>,
    },
    Blocks {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        items: Option<Vec<Vec<usize>>>,
    },
}

pub enum SubpatternInput {
    Int(Vec<i64>, Vec<BinOp<i64>>),
    String(Vec<String>, Vec<BinOp<String>>),
    Blocks(Vec<BTreeSet<usize>>, Vec<BinOp<BTreeSet<usize>>>),
}

fn int_op(name: &str) -> Option<BinOp<i64>> {
    Some(match name {
        "max" => BinOp::total("max", |a: &i64, b: &i64| *a.max(b)),
        "min" => BinOp::total("min", |a: &i64, b: &i64| *a.min(b)),
        "add" => BinOp::new("add", |a: &i64, b: &i64| a.checked_add(*b)),
        "sub" => BinOp::new("sub", |a: &i64, b: &i64| a.checked_sub(*b)),
        "mul" => BinOp::new("mul", |a: &i64, b: &i64| a.checked_mul(*b)),
        _ => return None,
    })
}

/// Largest `n` accepted for the all-subsets block domain.
pub const MAX_BLOCK_N: usize = 10;

impl Fixture for SubpatternFile {
    type Value = SubpatternInput;

    fn validate(&self) -> Result<SubpatternInput, Issue> {
        if self.trials == 0 {
            return Err(Issue::new("trials", "must be at least 1"));
        }
        if !self.sigma_star.is_finite() {
            return Err(Issue::new("sigma_star", "must be finite"));
        }
        if self.ops.is_empty() {
            return Err(Issue::new("ops", "name at least one operation"));
        }
        let unknown = |i: usize, name: &str| Issue::new(format!("ops[{i}]"), format!("unknown operation {name}"));
        match &self.domain {
            ItemsRecord::Int { items } => {
                let ops = self
                    .ops
                    .iter()
                    .enumerate()
                    .map(|(i, n)| int_op(n).ok_or_else(|| unknown(i, n)))
                    .collect::<Result<_, _>>()?;
                Ok(SubpatternInput::Int(items.clone(), ops))
            }
            ItemsRecord::String { items } => {
                let ops = self
                    .ops
                    .iter()
                    .enumerate()
                    .map(|(i, n)| string_op(n).map_err(|_| unknown(i, n)))
                    .collect::<Result<_, _>>()?;
                Ok(SubpatternInput::String(items.clone(), ops))
            }
            ItemsRecord::Blocks { n, items } => {
                let blocks = match (n, items) {
                    (Some(n), None) if (1..=MAX_BLOCK_N).contains(n) => nonempty_subsets(*n),
                    (Some(_), None) => return Err(Issue::new("domain.n", format!("must be in 1..={MAX_BLOCK_N}"))),
                    (None, Some(items)) => items.iter().map(|b| b.iter().copied().collect()).collect(),
                    _ => return Err(Issue::new("domain", "give exactly one of `n` and `items`")),
                };
                let ops = self
                    .ops
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n == "union").then(block_union).ok_or_else(|| unknown(i, n)))
                    .collect::<Result<_, _>>()?;
                Ok(SubpatternInput::Blocks(blocks, ops))
            }
        }
    }
}
