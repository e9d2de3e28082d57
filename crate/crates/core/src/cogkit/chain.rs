//! Forward chaining and backward truth-value chaining.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::metagraph::{Snapshot, TypedMetagraph};
use crate::rng;
use crate::tv::TruthValue;

use super::pln::{cwig, Kb, Rule, Statement};
use super::CogError;

/// How the next `(premises, rule)` choice is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainExecutor {
    /// Highest immediate reward; ties go to the first candidate in
    /// (rule, premise) order. Stops when no candidate has positive reward.
    #[default]
    Greedy,
    /// Draw the first premise by interestingness, then a rule and second
    /// premise uniformly among the applicable ones.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub step: usize,
    pub x: Statement,
    pub y: Option<Statement>,
    pub rule: Rule,
    pub conclusion: Statement,
    pub tv: TruthValue,
    pub reward: f64,
}

#[derive(Debug, Clone)]
pub struct ForwardOutcome {
    /// Copy of the input graph with conclusions written back.
    pub graph: TypedMetagraph,
    pub kb: Kb,
    /// Conclusions that changed the knowledge base, in order.
    pub derived: Vec<(Statement, TruthValue)>,
    pub trace: Vec<ChainStep>,
    /// Step index at which no candidate was available, if that happened.
    pub stalled_at: Option<usize>,
}

struct Candidate {
    x: Statement,
    y: Option<Statement>,
    rule: Rule,
    conclusion: Statement,
    tv: TruthValue,
}

fn candidates(kb: &Kb, rules: &[Rule]) -> Result<Vec<Candidate>, CogError> {
    let stmts: Vec<(&Statement, TruthValue)> = kb.statements().map(|(s, t)| (s, *t)).collect();
    let mut out = Vec::new();
    for &rule in rules {
        for &(x, tx) in &stmts {
            if rule.arity() == 1 {
                match rule.apply(kb, &[(x, tx)]) {
                    Ok(Some((c, tv))) => out.push(Candidate {
                        x: x.clone(),
                        y: None,
                        rule,
                        conclusion: c,
                        tv,
                    }),
                    Ok(None) | Err(CogError::Singularity(_)) => {}
                    Err(e) => return Err(e),
                }
                continue;
            }
            for &(y, ty) in &stmts {
                if x == y {
                    continue;
                }
                match rule.apply(kb, &[(x, tx), (y, ty)]) {
                    Ok(Some((c, tv))) => out.push(Candidate {
                        x: x.clone(),
                        y: Some(y.clone()),
                        rule,
                        conclusion: c,
                        tv,
                    }),
                    Ok(None) | Err(CogError::Singularity(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(out)
}

/// A conclusion the knowledge base would keep its own value over.
fn redundant(kb: &Kb, c: &Candidate) -> bool {
    kb.tv(&c.conclusion)
        .is_some_and(|old| old.confidence() >= c.tv.confidence())
}

fn reward_of(kb: &Kb, c: &Candidate) -> f64 {
    let prior = kb.tv(&c.conclusion).unwrap_or(TruthValue::unknown());
    cwig(prior, c.tv)
}

/// Run `steps` inference steps on a copy of `kb`. Each step scores its
/// conclusion by [`cwig`] against the truth value already held (the
/// ignorance prior if none). A conclusion replaces an existing truth value
/// only when it carries more confidence; candidates that would not are
/// never chosen, so the run stalls once nothing can change.
pub fn forward_chain(
    kb: &Snapshot,
    rules: &[Rule],
    steps: usize,
    executor: ChainExecutor,
    seed: u64,
) -> Result<ForwardOutcome, CogError> {
    let mut facts = Kb::from_metagraph(kb);
    if facts.is_empty() {
        return Err(CogError::NoStatements);
    }
    let mut graph = kb.graph().clone();
    let mut r = rng::seeded(seed);
    let mut derived = Vec::new();
    let mut trace = Vec::new();
    let mut stalled_at = None;
    for step in 0..steps {
        let mut cands = candidates(&facts, rules)?;
        cands.retain(|c| !redundant(&facts, c));
        let pick = match executor {
            ChainExecutor::Greedy => {
                let mut best: Option<(usize, f64)> = None;
                for (i, c) in cands.iter().enumerate() {
                    let rw = reward_of(&facts, c);
                    if rw > 0.0 && best.is_none_or(|(_, b)| rw > b) {
                        best = Some((i, rw));
                    }
                }
                best.map(|(i, _)| i)
            }
            ChainExecutor::Sampled => {
                let firsts: Vec<&Statement> = cands
                    .iter()
                    .map(|c| &c.x)
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                if firsts.is_empty() {
                    None
                } else {
                    let w: Vec<f64> = firsts.iter().map(|s| facts.interest(s)).collect();
                    let dist = WeightedIndex::new(&w).map_err(|_| CogError::EmptySupport)?;
                    let x = firsts[dist.sample(&mut r)];
                    let options: Vec<usize> = (0..cands.len()).filter(|i| &cands[*i].x == x).collect();
                    Some(options[r.gen_range(0..options.len())])
                }
            }
        };
        let Some(i) = pick else {
            stalled_at = Some(step);
            break;
        };
        let c = &cands[i];
        let reward = reward_of(&facts, c);
        facts.insert(c.conclusion.clone(), c.tv);
        Kb::write_statement(&mut graph, &c.conclusion, c.tv)?;
        derived.push((c.conclusion.clone(), c.tv));
        trace.push(ChainStep {
            step,
            x: c.x.clone(),
            y: c.y.clone(),
            rule: c.rule,
            conclusion: c.conclusion.clone(),
            tv: c.tv,
            reward,
        });
    }
    Ok(ForwardOutcome {
        graph,
        kb: facts,
        derived,
        trace,
        stalled_at,
    })
}

/// What a BID node stands for.
#[derive(Debug, Clone, PartialEq)]
pub enum BidLabel {
    /// Internal node: the statement is concluded by this rule from the
    /// children.
    Rule(Rule),
    /// Leaf whose truth value comes from the knowledge base.
    Dataset,
    /// Leaf not yet expanded and not in the knowledge base.
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BidNode {
    pub statement: Statement,
    pub label: BidLabel,
    pub tv: TruthValue,
    pub children: Vec<usize>,
}

/// Backward inference dag. Node 0 is the root; children always have larger
/// indices than their parent, so the structure is acyclic by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Bid {
    pub nodes: Vec<BidNode>,
}

impl Bid {
    fn leaf(st: Statement, kb: &Kb) -> BidNode {
        match kb.tv(&st) {
            Some(tv) => BidNode {
                statement: st,
                label: BidLabel::Dataset,
                tv,
                children: Vec::new(),
            },
            None => BidNode {
                statement: st,
                label: BidLabel::Open,
                tv: TruthValue::unknown(),
                children: Vec::new(),
            },
        }
    }

    pub fn root(&self) -> &BidNode {
        &self.nodes[0]
    }

    pub fn expansions(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.label, BidLabel::Rule(_)))
            .count()
    }

    /// Structural checks: internal nodes carry a rule and one or two
    /// children with larger indices; leaves have no children.
    pub fn check(&self) -> bool {
        self.nodes.iter().enumerate().all(|(i, n)| match n.label {
            BidLabel::Rule(r) => {
                !n.children.is_empty()
                    && n.children.len() <= 2
                    && n.children.len() == r.arity()
                    && n.children.iter().all(|c| *c > i && *c < self.nodes.len())
            }
            _ => n.children.is_empty(),
        })
    }

    fn parent_of(&self, i: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.children.contains(&i))
    }

    fn ancestors(&self, mut i: usize) -> Vec<&Statement> {
        let mut out = alloc::vec![&self.nodes[i].statement];
        while let Some(p) = self.parent_of(i) {
            out.push(&self.nodes[p].statement);
            i = p;
        }
        out
    }

    /// Recompute internal truth values bottom-up.
    fn evaluate(&mut self, kb: &Kb) -> Result<(), CogError> {
        for i in (0..self.nodes.len()).rev() {
            let BidLabel::Rule(rule) = self.nodes[i].label else {
                continue;
            };
            let prem: Vec<(Statement, TruthValue)> = self.nodes[i]
                .children
                .iter()
                .map(|c| (self.nodes[*c].statement.clone(), self.nodes[*c].tv))
                .collect();
            let refs: Vec<(&Statement, TruthValue)> = prem.iter().map(|(s, t)| (s, *t)).collect();
            match rule.apply(kb, &refs)? {
                Some((st, tv)) if st == self.nodes[i].statement => self.nodes[i].tv = tv,
                _ => return Err(CogError::Argument(String::from("rule no longer matches its node"))),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackwardOutcome {
    pub tv: TruthValue,
    pub bid: Bid,
    /// Reward of each expansion: cwig of the root before and after.
    pub rewards: Vec<f64>,
    pub stalled: bool,
}

/// Grow a BID for `target` for at most `budget` expansions. Each expansion
/// picks an open leaf, a rule and premises; candidates are drawn with
/// probability proportional to their reward (uniformly when every reward is
/// zero).
pub fn backward_chain_tv(
    kb: &Snapshot,
    target: &Statement,
    rules: &[Rule],
    budget: usize,
    seed: u64,
) -> Result<BackwardOutcome, CogError> {
    let facts = Kb::from_metagraph(kb);
    let mut bid = Bid {
        nodes: alloc::vec![Bid::leaf(target.clone(), &facts)],
    };
    let mut rewards = Vec::new();
    let mut stalled = false;
    let mut terms = facts.terms();
    match target {
        Statement::Term(t) => {
            terms.insert(t.clone());
        }
        Statement::Link { from, to, .. } => {
            terms.insert(from.clone());
            terms.insert(to.clone());
        }
    }
    let mut r = rng::seeded(seed);
    for _ in 0..budget {
        let before = bid.root().tv;
        let mut options: Vec<(Bid, f64)> = Vec::new();
        for leaf in 0..bid.nodes.len() {
            if bid.nodes[leaf].label != BidLabel::Open {
                continue;
            }
            let path: Vec<Statement> = bid.ancestors(leaf).into_iter().cloned().collect();
            for &rule in rules {
                for premises in rule.premises_for(&bid.nodes[leaf].statement, &terms) {
                    if premises.iter().any(|p| path.contains(p)) {
                        continue;
                    }
                    let mut next = bid.clone();
                    let mut children = Vec::new();
                    for p in premises {
                        children.push(next.nodes.len());
                        next.nodes.push(Bid::leaf(p, &facts));
                    }
                    next.nodes[leaf].label = BidLabel::Rule(rule);
                    next.nodes[leaf].children = children;
                    match next.evaluate(&facts) {
                        Ok(()) => {}
                        Err(CogError::Singularity(_)) => continue,
                        Err(e) => return Err(e),
                    }
                    let gain = cwig(before, next.root().tv);
                    options.push((next, gain));
                }
            }
        }
        if options.is_empty() {
            stalled = true;
            break;
        }
        let weights: Vec<f64> = if options.iter().any(|(_, g)| *g > 0.0) {
            options.iter().map(|(_, g)| *g).collect()
        } else {
            alloc::vec![1.0; options.len()]
        };
        let dist = WeightedIndex::new(&weights).map_err(|_| CogError::EmptySupport)?;
        let (next, gain) = options.swap_remove(dist.sample(&mut r));
        bid = next;
        rewards.push(gain);
    }
    Ok(BackwardOutcome {
        tv: bid.root().tv,
        bid,
        rewards,
        stalled,
    })
}
