//! Table-driven problems (the fixture format) and a random instance
//! generator.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::{Dds, DdsError};
use crate::rng;

/// One `(stage, state, action)` entry with its reward and successor row.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub stage: usize,
    pub state: String,
    pub action: String,
    pub reward: f64,
    /// `(next state, probability)`; empty at the last stage.
    pub next: Vec<(String, f64)>,
}

/// A problem given extensionally. States at stage 1 are `initial`; later
/// stages are whatever the rows reach.
#[derive(Debug, Clone, PartialEq)]
pub struct TableDds {
    stages: usize,
    discount: f64,
    initial: Vec<String>,
    rows: BTreeMap<(usize, String), Vec<TableRow>>,
}

impl TableDds {
    pub fn new(stages: usize, discount: f64, initial: Vec<String>, rows: Vec<TableRow>) -> Result<Self, DdsError> {
        if stages == 0 {
            return Err(DdsError::Invalid("at least one stage is required".into()));
        }
        if !(0.0..=1.0).contains(&discount) {
            return Err(DdsError::Invalid(format!("discount {discount} outside [0, 1]")));
        }
        if initial.is_empty() {
            return Err(DdsError::Invalid("no initial state".into()));
        }
        let mut map: BTreeMap<(usize, String), Vec<TableRow>> = BTreeMap::new();
        for row in rows {
            if row.stage == 0 || row.stage > stages {
                return Err(DdsError::Invalid(format!(
                    "row {}/{} has stage {} outside 1..={stages}",
                    row.state, row.action, row.stage
                )));
            }
            if !row.reward.is_finite() {
                return Err(DdsError::Invalid(format!(
                    "row {}/{} has a non-finite reward",
                    row.state, row.action
                )));
            }
            if row.stage < stages {
                let sum: f64 = row.next.iter().map(|(_, p)| *p).sum();
                if row.next.iter().any(|(_, p)| *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                    return Err(DdsError::Invalid(format!(
                        "transition of {}/{} at stage {} sums to {sum}",
                        row.state, row.action, row.stage
                    )));
                }
            }
            let slot = map.entry((row.stage, row.state.clone())).or_default();
            if slot.iter().any(|r| r.action == row.action) {
                return Err(DdsError::Invalid(format!(
                    "duplicate action {} for {} at stage {}",
                    row.action, row.state, row.stage
                )));
            }
            slot.push(row);
        }
        Ok(Self {
            stages,
            discount,
            initial,
            rows: map,
        })
    }

    pub fn initial(&self) -> &[String] {
        &self.initial
    }

    pub fn rows(&self) -> impl Iterator<Item = &TableRow> + '_ {
        self.rows.values().flatten()
    }

    /// Two stages from `A`: `a1` (reward 2) leads to `B` whose only action
    /// pays 1; `a2` (reward 0) leads to `C` whose only action pays 5.
    pub fn gd1() -> TableDds {
        let row = |stage: usize, state: &str, action: &str, reward: f64, next: &str| TableRow {
            stage,
            state: state.into(),
            action: action.into(),
            reward,
            next: if next.is_empty() {
                Vec::new()
            } else {
                alloc::vec![(String::from(next), 1.0)]
            },
        };
        let rows = alloc::vec![
            row(1, "A", "a1", 2.0, "B"),
            row(1, "A", "a2", 0.0, "C"),
            row(2, "B", "b", 1.0, ""),
            row(2, "C", "c", 5.0, ""),
        ];
        match TableDds::new(2, 1.0, alloc::vec![String::from("A")], rows) {
            Ok(p) => p,
            Err(_) => unreachable!("fixed table is valid"),
        }
    }

    fn row(&self, t: usize, s: &str, x: &str) -> Option<&TableRow> {
        self.rows.get(&(t, String::from(s)))?.iter().find(|r| r.action == x)
    }
}

impl Dds for TableDds {
    type State = String;
    type Action = String;

    fn stages(&self) -> usize {
        self.stages
    }
    fn initial_states(&self) -> Vec<String> {
        self.initial.clone()
    }
    fn actions(&self, t: usize, s: &String) -> Vec<String> {
        self.rows
            .get(&(t, s.clone()))
            .map(|rs| rs.iter().map(|r| r.action.clone()).collect())
            .unwrap_or_default()
    }
    fn reward(&self, t: usize, s: &String, x: &String) -> f64 {
        self.row(t, s, x).map_or(0.0, |r| r.reward)
    }
    fn transition(&self, t: usize, s: &String, x: &String) -> Vec<(f64, String)> {
        self.row(t, s, x)
            .map(|r| r.next.iter().map(|(n, p)| (*p, n.clone())).collect())
            .unwrap_or_default()
    }
    fn discount(&self) -> f64 {
        self.discount
    }
    fn state_key(&self, s: &String) -> String {
        s.clone()
    }
    fn action_key(&self, x: &String) -> String {
        x.clone()
    }
}

/// Size limits for [`random_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomTableSpec {
    pub max_stages: usize,
    pub max_states: usize,
    pub max_actions: usize,
    /// Probability that an action's transition is a point mass.
    pub deterministic_share: f64,
    pub discount: f64,
}

impl Default for RandomTableSpec {
    fn default() -> Self {
        Self {
            max_stages: 4,
            max_states: 5,
            max_actions: 4,
            deterministic_share: 0.5,
            discount: 1.0,
        }
    }
}

/// A random problem with integer rewards in `-3..=6`, no dead ends, and
/// transition probabilities on a 1/8 grid.
pub fn random_table(spec: &RandomTableSpec, seed: u64) -> TableDds {
    let mut r = rng::seeded(seed);
    let n = r.gen_range(1..=spec.max_stages.max(1));
    let widths: Vec<usize> = (0..n).map(|_| r.gen_range(1..=spec.max_states.max(1))).collect();
    let name = |t: usize, i: usize| format!("s{t}_{i}");
    let mut rows = Vec::new();
    for t in 1..=n {
        for i in 0..widths[t - 1] {
            let k = r.gen_range(1..=spec.max_actions.max(1));
            for a in 0..k {
                let reward = f64::from(r.gen_range(-3i32..=6));
                let next = if t == n {
                    Vec::new()
                } else {
                    let w = widths[t];
                    if r.gen_bool(spec.deterministic_share.clamp(0.0, 1.0)) {
                        alloc::vec![(name(t + 1, r.gen_range(0..w)), 1.0)]
                    } else {
                        let picks: BTreeSet<usize> =
                            (0..r.gen_range(1..=w.min(3))).map(|_| r.gen_range(0..w)).collect();
                        let picks: Vec<usize> = picks.into_iter().collect();
                        let mut weights: Vec<u32> = picks.iter().map(|_| 1).collect();
                        for _ in 0..(8 - picks.len()) {
                            let j = r.gen_range(0..picks.len());
                            weights[j] += 1;
                        }
                        picks
                            .iter()
                            .zip(weights)
                            .map(|(j, wt)| (name(t + 1, *j), f64::from(wt) / 8.0))
                            .collect()
                    }
                };
                rows.push(TableRow {
                    stage: t,
                    state: name(t, i),
                    action: format!("x{a}"),
                    reward,
                    next,
                });
            }
        }
    }
    let initial = (0..widths[0]).map(|i| name(1, i)).collect();
    TableDds::new(n, spec.discount, initial, rows).expect("generated table is valid")
}
