//! Agglomerative clustering as a staged merge problem.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dds::{exact_dp, Dds};
use crate::math;

use super::CogError;

/// Largest item count accepted by the exact executor.
pub const EXACT_LIMIT: usize = 7;

/// Symmetric, zero-diagonal, nonnegative distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Distances {
    d: Vec<Vec<f64>>,
}

impl Distances {
    pub fn new(d: Vec<Vec<f64>>) -> Result<Self, CogError> {
        let n = d.len();
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(CogError::Argument(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() || *v < 0.0 || (i == j && *v != 0.0) || *v != d[j][i] {
                    return Err(CogError::Argument(format!("bad distance at ({i}, {j})")));
                }
            }
        }
        Ok(Self { d })
    }

    /// Euclidean distances between points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self, CogError> {
        let d = points
            .iter()
            .map(|p| {
                points
                    .iter()
                    .map(|q| {
                        let s: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                        math::sqrt(s)
                    })
                    .collect()
            })
            .collect();
        Self::new(d)
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }
}

/// Blocks of item indices. Canonical form: each block sorted, blocks
/// sorted by first element.
pub type Partition = Vec<Vec<usize>>;

pub fn canonical(mut p: Partition) -> Partition {
    for b in p.iter_mut() {
        b.sort_unstable();
    }
    p.retain(|b| !b.is_empty());
    p.sort();
    p
}

/// `h(π) = 1 − Σ (|B|/n)²`.
pub fn logical_entropy(p: &[Vec<usize>]) -> f64 {
    let n: usize = p.iter().map(Vec::len).sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - p
        .iter()
        .map(|b| (b.len() as f64 / n) * (b.len() as f64 / n))
        .sum::<f64>()
}

/// Negative mean distance over all within-block pairs; 0 when there are
/// none.
pub fn neg_mean_within(p: &[Vec<usize>], d: &Distances) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for b in p {
        for (i, x) in b.iter().enumerate() {
            for y in &b[i + 1..] {
                sum += d.get(*x, *y);
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        -sum / pairs as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub blocks: Partition,
    pub quality: f64,
    pub entropy: f64,
}

impl Clustering {
    /// Value determined by the partition alone, whatever merge order led
    /// to it.
    pub fn of(p: Partition, d: &Distances) -> Self {
        let blocks = canonical(p);
        Clustering {
            quality: neg_mean_within(&blocks, d),
            entropy: logical_entropy(&blocks),
            blocks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClusterExecutor {
    #[default]
    Greedy,
    ExactDp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agglomeration {
    pub clustering: Clustering,
    pub merges: Vec<Merge>,
    /// Sum of merge gains: final quality minus the singleton quality.
    pub total_reward: f64,
}

impl Agglomeration {
    /// Parent → child block edges of the merge tree.
    pub fn trace_edges(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out = Vec::new();
        for m in &self.merges {
            let mut parent: Vec<usize> = m.left.iter().chain(&m.right).copied().collect();
            parent.sort_unstable();
            out.push((parent.clone(), m.left.clone()));
            out.push((parent, m.right.clone()));
        }
        out
    }
}

fn merged(p: &[Vec<usize>], i: usize, j: usize) -> Partition {
    let mut next: Partition = Vec::with_capacity(p.len() - 1);
    let mut joined = p[i].clone();
    joined.extend_from_slice(&p[j]);
    for (idx, b) in p.iter().enumerate() {
        if idx != i && idx != j {
            next.push(b.clone());
        }
    }
    next.push(joined);
    canonical(next)
}

fn key(p: &[Vec<usize>]) -> String {
    let mut s = String::new();
    for (i, b) in p.iter().enumerate() {
        if i > 0 {
            s.push('|');
        }
        for (j, x) in b.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&format!("{x}"));
        }
    }
    s
}

/// The merge problem as a decision system: stage `t` has done `t−1`
/// merges, actions merge two blocks, reward is the quality gain.
pub struct MergeDds<'a> {
    d: &'a Distances,
    k: usize,
}

impl<'a> MergeDds<'a> {
    pub fn new(d: &'a Distances, k: usize) -> Self {
        Self { d, k }
    }
}

impl Dds for MergeDds<'_> {
    type State = Partition;
    type Action = (usize, usize);

    fn stages(&self) -> usize {
        self.d.len() - self.k
    }

    fn initial_states(&self) -> Vec<Partition> {
        alloc::vec![(0..self.d.len()).map(|i| alloc::vec![i]).collect()]
    }

    fn actions(&self, _t: usize, s: &Partition) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                out.push((i, j));
            }
        }
        out
    }

    fn reward(&self, _t: usize, s: &Partition, x: &(usize, usize)) -> f64 {
        neg_mean_within(&merged(s, x.0, x.1), self.d) - neg_mean_within(s, self.d)
    }

    fn transition(&self, _t: usize, s: &Partition, x: &(usize, usize)) -> Vec<(f64, Partition)> {
        alloc::vec![(1.0, merged(s, x.0, x.1))]
    }

    fn discount(&self) -> f64 {
        1.0
    }

    fn state_key(&self, s: &Partition) -> String {
        key(s)
    }

    fn action_key(&self, x: &(usize, usize)) -> String {
        format!("{:02}+{:02}", x.0, x.1)
    }
}

/// Merge singletons down to `k` blocks.
pub fn agglomerate(d: &Distances, k: usize, executor: ClusterExecutor) -> Result<Agglomeration, CogError> {
    let n = d.len();
    if k == 0 || n < k {
        return Err(CogError::Argument(format!("need n >= k >= 1, got n = {n}, k = {k}")));
    }
    let p = MergeDds::new(d, k);
    let mut state: Partition = p.initial_states().remove(0);
    let mut merges = Vec::new();
    match executor {
        ClusterExecutor::Greedy => {
            for t in 1..=p.stages() {
                let mut best: Option<((usize, usize), f64)> = None;
                for x in p.actions(t, &state) {
                    let g = p.reward(t, &state, &x);
                    if best.is_none_or(|(_, b)| g > b) {
                        best = Some((x, g));
                    }
                }
                let Some((x, gain)) = best else { break };
                merges.push(Merge {
                    left: state[x.0].clone(),
                    right: state[x.1].clone(),
                    gain,
                });
                state = merged(&state, x.0, x.1);
            }
        }
        ClusterExecutor::ExactDp => {
            if n > EXACT_LIMIT {
                return Err(CogError::Argument(format!(
                    "exact agglomeration handles at most {EXACT_LIMIT} items, got {n}"
                )));
            }
            let vf = exact_dp(&p)?;
            let policy = vf.policy();
            for t in 1..=p.stages() {
                let Some(ak) = policy.action(t, &key(&state)) else {
                    break;
                };
                let x = p
                    .actions(t, &state)
                    .into_iter()
                    .find(|x| p.action_key(x) == ak)
                    .ok_or_else(|| CogError::Argument(String::from("policy names an unknown merge")))?;
                let gain = p.reward(t, &state, &x);
                merges.push(Merge {
                    left: state[x.0].clone(),
                    right: state[x.1].clone(),
                    gain,
                });
                state = merged(&state, x.0, x.1);
            }
        }
    }
    let total_reward = merges.iter().map(|m| m.gain).sum();
    Ok(Agglomeration {
        clustering: Clustering::of(state, d),
        merges,
        total_reward,
    })
}

/// Every partition of `0..n` into exactly `k` blocks.
pub fn partitions_into(n: usize, k: usize) -> Vec<Partition> {
    fn go(i: usize, n: usize, k: usize, cur: &mut Partition, out: &mut Vec<Partition>) {
        if i == n {
            if cur.len() == k {
                out.push(cur.clone());
            }
            return;
        }
        if cur.len() + (n - i) < k {
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            go(i + 1, n, k, cur, out);
            cur[b].pop();
        }
        if cur.len() < k {
            cur.push(alloc::vec![i]);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
