use cogpat_core::cogkit::{clause, Distances, Pattern, Rule, Statement, Variation, EQUIVALENCE, IMPLICATION};
use cogpat_core::metagraph::Target;
use serde::{Deserialize, Serialize};

use super::{Fixture, Issue};

/// `{"rules": [{"name", "formula", "reversible"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSetFile {
    pub rules: Vec<RuleRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleRecord {
    pub name: String,
    /// `pln.deduction`, `pln.inversion`, `pln.abduction`, `pln.induction`
    /// or `pln.equivalence`.
    pub formula: String,
    pub reversible: bool,
}

pub fn formula_id(rule: Rule) -> String {
    format!("pln.{}", rule.name())
}

impl RuleSetFile {
    pub fn of(rules: &[Rule]) -> Self {
        Self {
            rules: rules
                .iter()
                .map(|r| RuleRecord {
                    name: r.name().to_string(),
                    formula: formula_id(*r),
                    reversible: r.reversible(),
                })
                .collect(),
        }
    }
}

impl Fixture for RuleSetFile {
    type Value = Vec<Rule>;

    fn validate(&self) -> Result<Vec<Rule>, Issue> {
        let mut out = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            let rule = r
                .formula
                .strip_prefix("pln.")
                .and_then(Rule::from_name)
                .ok_or_else(|| Issue::new(format!("rules[{i}].formula"), format!("unknown formula {}", r.formula)))?;
            if rule.reversible() != r.reversible {
                return Err(Issue::new(
                    format!("rules[{i}].reversible"),
                    format!(
                        "{} is {}reversible",
                        r.formula,
                        if rule.reversible() { "" } else { "not " }
                    ),
                ));
            }
            if out.contains(&rule) {
                return Err(Issue::new(
                    format!("rules[{i}].formula"),
                    format!("{} listed twice", r.formula),
                ));
            }
            out.push(rule);
        }
        Ok(out)
    }
}

/// `A`, `A->B` (implication), `A<->B` (equivalence) or `Label(A,B)`.
pub fn parse_statement(text: &str) -> Option<Statement> {
    let text = text.trim();
    let name_ok = |s: &str| !s.is_empty() && !s.contains(['(', ')', ',', '-', '<', '>']);
    if let Some((a, b)) = text.split_once("<->") {
        let (a, b) = (a.trim(), b.trim());
        return (name_ok(a) && name_ok(b)).then(|| Statement::equivalence(a, b));
    }
    if let Some((a, b)) = text.split_once("->") {
        let (a, b) = (a.trim(), b.trim());
        return (name_ok(a) && name_ok(b)).then(|| Statement::implication(a, b));
    }
    if let Some((label, rest)) = text.split_once('(') {
        let (a, b) = rest.strip_suffix(')')?.split_once(',')?;
        let (label, a, b) = (label.trim(), a.trim(), b.trim());
        if !(name_ok(label) && name_ok(a) && name_ok(b)) {
            return None;
        }
        return Some(Statement::Link {
            label: label.to_string(),
            from: a.to_string(),
            to: b.to_string(),
        });
    }
    name_ok(text).then(|| Statement::term(text))
}

pub fn format_statement(st: &Statement) -> String {
    match st {
        Statement::Term(t) => t.clone(),
        Statement::Link { label, from, to } if label == IMPLICATION => format!("{from}->{to}"),
        Statement::Link { label, from, to } if label == EQUIVALENCE => format!("{from}<->{to}"),
        Statement::Link { label, from, to } => format!("{label}({from},{to})"),
    }
}

/// Points (Euclidean distances) or an explicit distance matrix, and the
/// target block count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsFile {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
}

impl Fixture for PointsFile {
    type Value = Distances;

    fn validate(&self) -> Result<Distances, Issue> {
        let d = match (&self.points, &self.distances) {
            (Some(p), None) => Distances::from_points(p).map_err(|e| Issue::new("points", e))?,
            (None, Some(d)) => Distances::new(d.clone()).map_err(|e| Issue::new("distances", e))?,
            _ => return Err(Issue::new("points", "give exactly one of `points` and `distances`")),
        };
        if self.k == 0 || self.k > d.len() {
            return Err(Issue::new("k", format!("must be in 1..={}", d.len())));
        }
        Ok(d)
    }
}

/// One pattern edge: its type and target names (`$X` for variables).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    #[serde(rename = "type")]
    pub type_label: String,
    pub args: Vec<String>,
}

/// A disjunction of clauses. Measured fields are present on export and
/// optional on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternRecord {
    pub clauses: Vec<Vec<EdgeRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surprisingness: Option<f64>,
}

impl PatternRecord {
    pub fn of(p: &Pattern) -> Self {
        let clauses = p
            .clauses
            .iter()
            .map(|c| {
                c.atoms()
                    .filter(|a| !a.is_node())
                    .map(|e| EdgeRecord {
                        type_label: e.type_label().to_string(),
                        args: e
                            .targets()
                            .iter()
                            .map(|t| match t {
                                Target::Atom(id) => c.atom(*id).and_then(|n| n.name()).unwrap_or("?").to_string(),
                                Target::Slot(_) => "?".to_string(),
                            })
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        Self {
            clauses,
            key: p.key().ok(),
            frequency: Some(p.frequency),
            surprisingness: Some(p.surprisingness),
        }
    }

    fn to_pattern(&self, field: &str) -> Result<Pattern, Issue> {
        let mut clauses = Vec::new();
        for (i, c) in self.clauses.iter().enumerate() {
            let args: Vec<Vec<&str>> = c.iter().map(|e| e.args.iter().map(String::as_str).collect()).collect();
            let specs: Vec<(&str, &[&str])> = c
                .iter()
                .zip(&args)
                .map(|(e, a)| (e.type_label.as_str(), a.as_slice()))
                .collect();
            clauses.push(clause(&specs).map_err(|e| Issue::new(format!("{field}.clauses[{i}]"), e))?);
        }
        if clauses.is_empty() {
            return Err(Issue::new(
                format!("{field}.clauses"),
                "a pattern needs at least one clause",
            ));
        }
        Ok(Pattern {
            clauses,
            frequency: self.frequency.unwrap_or(0.0),
            surprisingness: self.surprisingness.unwrap_or(0.0),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    pub patterns: Vec<PatternRecord>,
}

impl PatternFile {
    pub fn of(ps: &[Pattern]) -> Self {
        Self {
            patterns: ps.iter().map(PatternRecord::of).collect(),
        }
    }
}

impl Fixture for PatternFile {
    type Value = Vec<Pattern>;

    fn validate(&self) -> Result<Vec<Pattern>, Issue> {
        self.patterns
            .iter()
            .enumerate()
            .map(|(i, p)| p.to_pattern(&format!("patterns[{i}]")))
            .collect()
    }
}

/// Settings for `cog evolve` on OneMax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveFile {
    pub length: usize,
    pub population: usize,
    pub variation: VariationRecord,
}

impl Default for EvolveFile {
    fn default() -> Self {
        Self {
            length: 8,
            population: 20,
            variation: VariationRecord::Ga {
                mutation: 0.125,
                crossover: 0.5,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum VariationRecord {
    Ga { mutation: f64, crossover: f64 },
    Umda { margin: f64 },
}

impl Fixture for EvolveFile {
    type Value = Variation;

    fn validate(&self) -> Result<Variation, Issue> {
        if self.length == 0 {
            return Err(Issue::new("length", "must be at least 1"));
        }
        if self.population == 0 {
            return Err(Issue::new("population", "must be at least 1"));
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        match self.variation {
            VariationRecord::Ga { mutation, crossover } => {
                if !unit(mutation) {
                    return Err(Issue::new("variation.mutation", "must be in [0, 1]"));
                }
                if !unit(crossover) {
                    return Err(Issue::new("variation.crossover", "must be in [0, 1]"));
                }
                Ok(Variation::ga(mutation, crossover))
            }
            VariationRecord::Umda { margin } => {
                if !(0.0..=0.5).contains(&margin) {
                    return Err(Issue::new("variation.margin", "must be in [0, 0.5]"));
                }
                Ok(Variation::Umda { margin })
            }
        }
    }
}
