use cogpat_core::dds::{Dds, TableDds, TableRow};
use serde::{Deserialize, Serialize};

use super::{Fixture, Issue};

/// A staged decision problem listed state by state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DdsFile {
    pub stages: usize,
    #[serde(default = "one")]
    pub discount: f64,
    pub initial: Vec<String>,
    pub table: Vec<StageState>,
}

fn one() -> f64 {
    1.0
}

/// Actions available in `state` at `stage`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageState {
    pub stage: usize,
    pub state: String,
    pub actions: Vec<ActionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionRecord {
    pub action: String,
    pub reward: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub next: Vec<NextRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NextRecord {
    pub state: String,
    pub p: f64,
}

impl DdsFile {
    pub fn from_table(p: &TableDds) -> Self {
        let mut table: Vec<StageState> = Vec::new();
        for r in p.rows() {
            let action = ActionRecord {
                action: r.action.clone(),
                reward: r.reward,
                next: r
                    .next
                    .iter()
                    .map(|(s, pr)| NextRecord {
                        state: s.clone(),
                        p: *pr,
                    })
                    .collect(),
            };
            match table.last_mut() {
                Some(last) if last.stage == r.stage && last.state == r.state => last.actions.push(action),
                _ => table.push(StageState {
                    stage: r.stage,
                    state: r.state.clone(),
                    actions: vec![action],
                }),
            }
        }
        Self {
            stages: p.stages(),
            discount: p.discount(),
            initial: p.initial().to_vec(),
            table,
        }
    }
}

impl Fixture for DdsFile {
    type Value = TableDds;

    fn validate(&self) -> Result<TableDds, Issue> {
        let mut rows = Vec::new();
        for (i, st) in self.table.iter().enumerate() {
            if st.stage == 0 || st.stage > self.stages {
                return Err(Issue::new(
                    format!("table[{i}].stage"),
                    format!("stage {} outside 1..={}", st.stage, self.stages),
                ));
            }
            for (j, a) in st.actions.iter().enumerate() {
                let field = format!("table[{i}].actions[{j}]");
                if !a.reward.is_finite() {
                    return Err(Issue::new(format!("{field}.reward"), "reward must be finite"));
                }
                if st.stage < self.stages {
                    let sum: f64 = a.next.iter().map(|n| n.p).sum();
                    if a.next.iter().any(|n| n.p.is_nan() || n.p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                        return Err(Issue::new(
                            format!("{field}.next"),
                            format!("probabilities must be non-negative and sum to 1, got {sum}"),
                        ));
                    }
                } else if !a.next.is_empty() {
                    return Err(Issue::new(
                        format!("{field}.next"),
                        "last-stage actions have no successors",
                    ));
                }
                rows.push(TableRow {
                    stage: st.stage,
                    state: st.state.clone(),
                    action: a.action.clone(),
                    reward: a.reward,
                    next: a.next.iter().map(|n| (n.state.clone(), n.p)).collect(),
                });
            }
        }
        let field = if self.stages == 0 {
            "stages"
        } else if !(0.0..=1.0).contains(&self.discount) {
            "discount"
        } else if self.initial.is_empty() {
            "initial"
        } else {
            "table"
        };
        TableDds::new(self.stages, self.discount, self.initial.clone(), rows).map_err(|e| Issue::new(field, e))
    }
}
