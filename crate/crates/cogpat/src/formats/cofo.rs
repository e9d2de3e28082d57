use cogpat_core::cofo::{CofoProblem, Combinator, Hypothesis, QualityMode, Sampler};
use serde::{Deserialize, Serialize};

use super::{is_zero, Fixture, Issue};

/// Domain with weights and the true objective, candidate functions with
/// priors, and the combinators available to the decision process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CofoFile {
    pub rho: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "is_support_uniform")]
    pub quality: QualityRecord,
    pub domain: Vec<DomainPoint>,
    pub hypotheses: Vec<HypothesisRecord>,
    pub combinators: Vec<CombinatorRecord>,
    #[serde(default = "three")]
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "is_exhaustive")]
    pub sampler: SamplerRecord,
}

fn three() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QualityRecord {
    #[default]
    SupportUniform,
    PriorMass,
}

fn is_support_uniform(q: &QualityRecord) -> bool {
    *q == QualityRecord::SupportUniform
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainPoint {
    pub x: i64,
    #[serde(default = "unit_weight")]
    pub weight: f64,
    /// True objective value.
    pub f: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisRecord {
    pub name: String,
    pub prior: f64,
    /// One value per domain point, in domain order.
    pub values: Vec<f64>,
}

/// A built-in operation (`left`, `right`, `min`, `max`, `add`, `sub`) or an
/// explicit table of `[x, y, result]` rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinatorRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[i64; 3]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SamplerRecord {
    #[default]
    Exhaustive,
    ChiWeighted {
        draws: usize,
    },
}

fn is_exhaustive(s: &SamplerRecord) -> bool {
    *s == SamplerRecord::Exhaustive
}

/// Validated problem plus the decision-process settings.
#[derive(Debug, Clone)]
pub struct CofoFixture {
    pub problem: CofoProblem,
    pub horizon: usize,
    pub sampler: Sampler,
}

fn builtin(name: &str, op: &str) -> Option<Combinator> {
    let c = match op {
        "left" => Combinator::new(name, |x, _| Some(x)),
        "right" => Combinator::new(name, |_, y| Some(y)),
        "min" => Combinator::new(name, |x, y| Some(x.min(y))),
        "max" => Combinator::new(name, |x, y| Some(x.max(y))),
        "add" => Combinator::new(name, |x, y| x.checked_add(y)),
        "sub" => Combinator::new(name, |x, y| x.checked_sub(y)),
        _ => return None,
    };
    Some(c)
}

impl Fixture for CofoFile {
    type Value = CofoFixture;

    fn validate(&self) -> Result<CofoFixture, Issue> {
        let n = self.domain.len();
        for (i, h) in self.hypotheses.iter().enumerate() {
            if h.values.len() != n {
                return Err(Issue::new(
                    format!("hypotheses[{i}].values"),
                    format!("expected {n} values, got {}", h.values.len()),
                ));
            }
        }
        let mut combinators = Vec::new();
        for (i, c) in self.combinators.iter().enumerate() {
            let comb = match (&c.builtin, &c.table) {
                (Some(op), None) => builtin(&c.name, op).ok_or_else(|| {
                    Issue::new(format!("combinators[{i}].builtin"), format!("unknown operation {op}"))
                })?,
                (None, Some(rows)) => Combinator::table(&c.name, rows.iter().map(|[x, y, z]| ((*x, *y), *z)).collect()),
                _ => {
                    return Err(Issue::new(
                        format!("combinators[{i}]"),
                        "give exactly one of `builtin` and `table`",
                    ))
                }
            };
            combinators.push(comb);
        }
        if self.horizon == 0 {
            return Err(Issue::new("horizon", "must be at least 1"));
        }
        let problem = CofoProblem::new(
            self.domain.iter().map(|d| d.x).collect(),
            self.domain.iter().map(|d| d.weight).collect(),
            self.domain.iter().map(|d| d.f).collect(),
            self.hypotheses
                .iter()
                .map(|h| Hypothesis {
                    name: h.name.clone(),
                    values: h.values.clone(),
                    prior: h.prior,
                })
                .collect(),
            self.rho,
            combinators,
        )
        .map_err(|e| {
            let msg = e.to_string();
            let field = if msg.contains("rho") {
                "rho"
            } else if msg.contains("prior") || msg.contains("candidate") {
                "hypotheses"
            } else {
                "domain"
            };
            Issue::new(field, msg)
        })?
        .with_tolerance(self.tolerance)
        .with_quality_mode(match self.quality {
            QualityRecord::SupportUniform => QualityMode::SupportUniform,
            QualityRecord::PriorMass => QualityMode::PriorMass,
        });
        let sampler = match self.sampler {
            SamplerRecord::Exhaustive => Sampler::Exhaustive,
            SamplerRecord::ChiWeighted { draws } => Sampler::ChiWeighted { draws },
        };
        Ok(CofoFixture {
            problem,
            horizon: self.horizon,
            sampler,
        })
    }
}
