//! Pattern frequencies and the pattern-mining loop.
//!
//! A pattern is a disjunction of clauses. A clause is a small metagraph
//! whose nodes are variables (type [`VARIABLE`], named `$X`) or constants
//! (matched by type and name), and whose edges are matched in atom order.
//! A clause with `m` edges matches a tuple of `m` knowledge-base edges when
//! types and arities agree and one variable assignment explains every
//! position. Frequency is the number of matching tuples over `|E|^m`; all
//! clauses of a disjunction have the same `m`, and a tuple counts once if
//! any clause matches it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::metagraph::{AtomId, AtomSpec, Snapshot, Target, TypedMetagraph, CANONICAL_ATOM_LIMIT};
use crate::rng;

use super::CogError;

pub const VARIABLE: &str = "Variable";

/// Largest clause size the miner builds (keeps clauses within the
/// canonical-form atom limit).
pub const MAX_CLAUSE_EDGES: usize = 4;

/// One pattern edge: type label and target names. Names starting with `$`
/// are variables; others are `Concept` constants.
pub type EdgeSpec<'a> = (&'a str, &'a [&'a str]);

/// Build a clause from edge specs.
pub fn clause(edges: &[EdgeSpec<'_>]) -> Result<TypedMetagraph, CogError> {
    let mut mg = TypedMetagraph::new();
    let mut nodes: BTreeMap<String, AtomId> = BTreeMap::new();
    for (_, targets) in edges {
        for t in targets.iter() {
            if !nodes.contains_key(*t) {
                let ty = if t.starts_with('$') { VARIABLE } else { "Concept" };
                let id = mg.add_atom(AtomSpec::node(ty).named(t))?;
                nodes.insert(String::from(*t), id);
            }
        }
    }
    for (label, targets) in edges {
        let ids: Vec<AtomId> = targets.iter().map(|t| nodes[*t]).collect();
        mg.add_atom(AtomSpec::link(label, &ids))?;
    }
    Ok(mg)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Slot {
    Var(String),
    Const { ty: String, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PEdge {
    ty: String,
    slots: Vec<Slot>,
}

fn pattern_edges(c: &TypedMetagraph) -> Result<Vec<PEdge>, CogError> {
    let mut out = Vec::new();
    for a in c.atoms().filter(|a| !a.is_node()) {
        let mut slots = Vec::new();
        for t in a.targets() {
            let Target::Atom(id) = t else {
                return Err(CogError::Pattern(String::from(
                    "pattern edges cannot target dangling slots",
                )));
            };
            let n = c.atom(*id).ok_or(CogError::Pattern(format!("missing atom {id}")))?;
            let Some(name) = n.name().filter(|_| n.is_node()) else {
                return Err(CogError::Pattern(String::from("pattern edges must target named nodes")));
            };
            slots.push(if n.type_label() == VARIABLE {
                Slot::Var(String::from(name))
            } else {
                Slot::Const {
                    ty: String::from(n.type_label()),
                    name: String::from(name),
                }
            });
        }
        out.push(PEdge {
            ty: String::from(a.type_label()),
            slots,
        });
    }
    Ok(out)
}

/// The knowledge-base side of the matcher: edges in id order.
struct KbIndex<'a> {
    mg: &'a TypedMetagraph,
    edges: Vec<AtomId>,
}

impl<'a> KbIndex<'a> {
    fn new(mg: &'a TypedMetagraph) -> Self {
        Self {
            mg,
            edges: mg.atoms().filter(|a| !a.is_node()).map(|a| a.id()).collect(),
        }
    }

    /// Extend `binding` so that pattern edge `pe` explains kb edge `e`.
    fn fits(&self, pe: &PEdge, e: AtomId, binding: &mut Vec<(String, AtomId)>) -> bool {
        let Some(a) = self.mg.atom(e) else { return false };
        if a.type_label() != pe.ty || a.targets().len() != pe.slots.len() {
            return false;
        }
        for (slot, t) in pe.slots.iter().zip(a.targets()) {
            let Target::Atom(id) = t else { return false };
            match slot {
                Slot::Var(v) => match binding.iter().find(|(n, _)| n == v) {
                    Some((_, b)) if b != id => return false,
                    Some(_) => {}
                    None => binding.push((v.clone(), *id)),
                },
                Slot::Const { ty, name } => {
                    let Some(n) = self.mg.atom(*id) else { return false };
                    if !n.is_node() || n.type_label() != ty || n.name() != Some(name.as_str()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn for_each_match<F: FnMut(&[AtomId], &[(String, AtomId)])>(&self, pes: &[PEdge], f: &mut F) {
        fn go<F: FnMut(&[AtomId], &[(String, AtomId)])>(
            ix: &KbIndex<'_>,
            pes: &[PEdge],
            tuple: &mut Vec<AtomId>,
            binding: &mut Vec<(String, AtomId)>,
            f: &mut F,
        ) {
            let i = tuple.len();
            if i == pes.len() {
                f(tuple, binding);
                return;
            }
            for &e in &ix.edges {
                let mark = binding.len();
                if ix.fits(&pes[i], e, binding) {
                    tuple.push(e);
                    go(ix, pes, tuple, binding, f);
                    tuple.pop();
                }
                binding.truncate(mark);
            }
        }
        go(self, pes, &mut Vec::new(), &mut Vec::new(), f);
    }

    fn count(&self, pes: &[PEdge]) -> usize {
        let mut n = 0usize;
        self.for_each_match(pes, &mut |_, _| n += 1);
        n
    }

    fn total(&self, m: usize) -> f64 {
        math_pow(self.edges.len() as f64, m)
    }
}

fn math_pow(b: f64, e: usize) -> f64 {
    let mut x = 1.0;
    for _ in 0..e {
        x *= b;
    }
    x
}

fn clause_edge_count(c: &TypedMetagraph) -> usize {
    c.atoms().filter(|a| !a.is_node()).count()
}

/// Order-aware canonical token of a clause: each edge is tagged with its
/// position before canonicalizing, so reordering edges changes the token.
pub fn clause_key(c: &TypedMetagraph) -> Result<String, CogError> {
    let mut tagged = TypedMetagraph::new();
    let mut map = BTreeMap::new();
    let mut pos = 0usize;
    for a in c.atoms() {
        let spec = if a.is_node() {
            a.spec().clone()
        } else {
            let targets: Vec<Target> = a
                .targets()
                .iter()
                .map(|t| match t {
                    Target::Atom(id) => Target::Atom(map[id]),
                    s => *s,
                })
                .collect();
            pos += 1;
            AtomSpec::edge(a.type_label(), targets).named(&format!("#{}", pos - 1))
        };
        let id = tagged.add_atom(spec)?;
        map.insert(a.id(), id);
    }
    Ok(tagged.canonical_form()?)
}

/// A disjunction of clauses with its measured frequency and
/// surprisingness.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub clauses: Vec<TypedMetagraph>,
    pub frequency: f64,
    pub surprisingness: f64,
}

impl Pattern {
    pub fn single(c: TypedMetagraph) -> Self {
        Self {
            clauses: alloc::vec![c],
            frequency: 0.0,
            surprisingness: 0.0,
        }
    }

    /// Number of edges per clause.
    pub fn width(&self) -> usize {
        self.clauses.first().map_or(0, clause_edge_count)
    }

    /// Sorted, deduplicated clause keys joined by ` | `.
    pub fn key(&self) -> Result<String, CogError> {
        let keys: BTreeSet<String> = self.clauses.iter().map(clause_key).collect::<Result<_, _>>()?;
        Ok(keys.into_iter().collect::<Vec<_>>().join(" | "))
    }

    /// Recompute frequency and surprisingness against `kb`.
    pub fn evaluated(mut self, kb: &TypedMetagraph) -> Result<Self, CogError> {
        self.frequency = frequency(kb, &self)?;
        self.surprisingness = self.frequency - independence_estimate(kb, &self)?;
        Ok(self)
    }

    /// Mining quality: frequency plus absolute surprisingness.
    pub fn quality(&self) -> f64 {
        self.frequency + self.surprisingness.abs()
    }

    fn variables(&self) -> BTreeSet<String> {
        self.clauses
            .iter()
            .flat_map(|c| {
                c.atoms()
                    .filter(|a| a.type_label() == VARIABLE)
                    .filter_map(|a| a.name().map(String::from))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

fn check_widths(p: &Pattern) -> Result<usize, CogError> {
    let m = p.width();
    if p.clauses.iter().any(|c| clause_edge_count(c) != m) {
        return Err(CogError::Pattern(String::from(
            "clauses of a disjunction must have equal edge counts",
        )));
    }
    Ok(m)
}

/// Matching tuples over `|E|^m`. An empty knowledge base gives 0 for
/// `m > 0`.
pub fn frequency(kb: &TypedMetagraph, p: &Pattern) -> Result<f64, CogError> {
    let m = check_widths(p)?;
    let ix = KbIndex::new(kb);
    let total = ix.total(m);
    if total == 0.0 {
        return Ok(0.0);
    }
    let matches = if p.clauses.len() == 1 {
        ix.count(&pattern_edges(&p.clauses[0])?)
    } else {
        let mut seen: BTreeSet<Vec<AtomId>> = BTreeSet::new();
        for c in &p.clauses {
            let pes = pattern_edges(c)?;
            ix.for_each_match(&pes, &mut |t, _| {
                seen.insert(t.to_vec());
            });
        }
        seen.len()
    };
    Ok(matches as f64 / total)
}

fn clause_estimate(ix: &KbIndex<'_>, pes: &[PEdge]) -> f64 {
    let e = ix.edges.len() as f64;
    if e == 0.0 {
        return 0.0;
    }
    let mut est = 1.0;
    // per edge: frequency alone and the distribution of each variable
    let mut dists: Vec<BTreeMap<String, BTreeMap<AtomId, f64>>> = Vec::new();
    for pe in pes {
        let one = core::slice::from_ref(pe);
        let mut count = 0usize;
        let mut d: BTreeMap<String, BTreeMap<AtomId, f64>> = BTreeMap::new();
        ix.for_each_match(one, &mut |_, b| {
            count += 1;
            for (v, a) in b {
                *d.entry(v.clone()).or_default().entry(*a).or_insert(0.0) += 1.0;
            }
        });
        est *= count as f64 / e;
        if count > 0 {
            for m in d.values_mut() {
                for x in m.values_mut() {
                    *x /= count as f64;
                }
            }
        }
        dists.push(d);
    }
    let vars: BTreeSet<&String> = dists.iter().flat_map(|d| d.keys()).collect();
    for v in vars {
        let with: Vec<&BTreeMap<AtomId, f64>> = dists.iter().filter_map(|d| d.get(v)).collect();
        if with.len() < 2 {
            continue;
        }
        let agree: f64 = with[0]
            .iter()
            .map(|(a, p)| {
                p * with[1..]
                    .iter()
                    .map(|d| d.get(a).copied().unwrap_or(0.0))
                    .product::<f64>()
            })
            .sum();
        est *= agree;
    }
    est
}

/// Frequency expected if every edge matched independently and shared
/// variables agreed only by chance. Clauses of a disjunction are combined
/// as independent events.
pub fn independence_estimate(kb: &TypedMetagraph, p: &Pattern) -> Result<f64, CogError> {
    check_widths(p)?;
    let ix = KbIndex::new(kb);
    let mut miss = 1.0;
    for c in &p.clauses {
        miss *= 1.0 - clause_estimate(&ix, &pattern_edges(c)?);
    }
    Ok(1.0 - miss)
}

fn merge_clauses(a: &TypedMetagraph, b: &TypedMetagraph) -> Result<TypedMetagraph, CogError> {
    let mut out = TypedMetagraph::new();
    let mut by_label: BTreeMap<(String, String), AtomId> = BTreeMap::new();
    let mut edges: Vec<(String, Vec<(String, String)>)> = Vec::new();
    for c in [a, b] {
        for at in c.atoms() {
            if at.is_node() {
                let key = (String::from(at.type_label()), String::from(at.name().unwrap_or("")));
                if let alloc::collections::btree_map::Entry::Vacant(e) = by_label.entry(key) {
                    let id = out.add_atom(at.spec().clone())?;
                    e.insert(id);
                }
            } else {
                let ends = at
                    .targets()
                    .iter()
                    .map(|t| match t {
                        Target::Atom(id) => c
                            .atom(*id)
                            .map(|n| (String::from(n.type_label()), String::from(n.name().unwrap_or(""))))
                            .ok_or(CogError::Pattern(format!("missing atom {id}"))),
                        Target::Slot(_) => Err(CogError::Pattern(String::from("dangling slot in pattern"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                edges.push((String::from(at.type_label()), ends));
            }
        }
    }
    for (ty, ends) in edges {
        let ids: Vec<AtomId> = ends.iter().map(|k| by_label[k]).collect();
        out.add_atom(AtomSpec::link(&ty, &ids))?;
    }
    Ok(out)
}

/// Conjunction: clause-wise products. Nodes with the same type and name
/// are identified, so shared variables join; the right operand's edges
/// follow the left's.
pub fn conjoin(p: &Pattern, q: &Pattern) -> Result<Pattern, CogError> {
    let mut clauses = Vec::new();
    for a in &p.clauses {
        for b in &q.clauses {
            clauses.push(merge_clauses(a, b)?);
        }
    }
    dedup(Pattern {
        clauses,
        frequency: 0.0,
        surprisingness: 0.0,
    })
}

/// Disjunction: clause union. Both sides must have the same width.
pub fn disjoin(p: &Pattern, q: &Pattern) -> Result<Pattern, CogError> {
    if p.width() != q.width() {
        return Err(CogError::Pattern(String::from("disjuncts must have equal edge counts")));
    }
    let clauses = p.clauses.iter().chain(&q.clauses).cloned().collect();
    dedup(Pattern {
        clauses,
        frequency: 0.0,
        surprisingness: 0.0,
    })
}

fn dedup(p: Pattern) -> Result<Pattern, CogError> {
    let mut seen = BTreeSet::new();
    let mut clauses = Vec::new();
    for c in p.clauses {
        if seen.insert(clause_key(&c)?) {
            clauses.push(c);
        }
    }
    Ok(Pattern { clauses, ..p })
}

/// Rename every variable of `p` to `$V<n>` names not used in `avoid`.
pub fn rename_apart(p: &Pattern, avoid: &BTreeSet<String>) -> Result<Pattern, CogError> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    let mut next = 0usize;
    for v in p.variables() {
        loop {
            let cand = format!("$V{next}");
            next += 1;
            if !avoid.contains(&cand) && !p.variables().contains(&cand) {
                map.insert(v.clone(), cand);
                break;
            }
        }
    }
    let mut clauses = Vec::new();
    for c in &p.clauses {
        let mut out = TypedMetagraph::new();
        let mut ids = BTreeMap::new();
        for a in c.atoms() {
            let mut spec = a.spec().clone();
            if a.type_label() == VARIABLE {
                if let Some(n) = a.name().and_then(|n| map.get(n)) {
                    spec = spec.named(n);
                }
            }
            if !a.is_node() {
                let t: Vec<AtomId> = a
                    .targets()
                    .iter()
                    .filter_map(|t| match t {
                        Target::Atom(id) => ids.get(id).copied(),
                        Target::Slot(_) => None,
                    })
                    .collect();
                spec = AtomSpec::link(a.type_label(), &t);
            }
            ids.insert(a.id(), out.add_atom(spec)?);
        }
        clauses.push(out);
    }
    Ok(Pattern {
        clauses,
        frequency: p.frequency,
        surprisingness: p.surprisingness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expansion {
    AddEdge,
    Conjoin,
    Disjoin,
}

impl Expansion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Expansion::AddEdge => "add-edge",
            Expansion::Conjoin => "conjoin",
            Expansion::Disjoin => "disjoin",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MineExecutor {
    /// Try every expansion of every pattern; take the best reward.
    #[default]
    Greedy,
    /// Pick a pattern by quality, then an expansion uniformly.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MineConfig {
    pub ops: Vec<Expansion>,
    pub min_freq: f64,
    pub budget: usize,
    pub max_edges: usize,
    pub executor: MineExecutor,
    pub seed: u64,
}

impl Default for MineConfig {
    fn default() -> Self {
        Self {
            ops: alloc::vec![Expansion::AddEdge, Expansion::Conjoin, Expansion::Disjoin],
            min_freq: 0.0,
            budget: 10,
            max_edges: 2,
            executor: MineExecutor::Greedy,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MineStep {
    pub parent: String,
    pub op: Expansion,
    pub child: String,
    pub kept: bool,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MineOutcome {
    pub patterns: Vec<Pattern>,
    pub steps: Vec<MineStep>,
    pub stalled: bool,
}

fn edge_types(kb: &TypedMetagraph) -> BTreeSet<(String, usize)> {
    kb.atoms()
        .filter(|a| !a.is_node())
        .map(|a| (String::from(a.type_label()), a.targets().len()))
        .collect()
}

fn add_edge_children(p: &Pattern, types: &BTreeSet<(String, usize)>) -> Result<Vec<Pattern>, CogError> {
    if p.clauses.len() != 1 {
        return Ok(Vec::new());
    }
    let c = &p.clauses[0];
    let vars: Vec<String> = p.variables().into_iter().collect();
    let fresh = {
        let mut i = 0usize;
        loop {
            let v = format!("$V{i}");
            if !vars.contains(&v) {
                break v;
            }
            i += 1;
        }
    };
    let mut out = Vec::new();
    for (ty, arity) in types.iter().filter(|(_, a)| *a >= 1) {
        for v in &vars {
            for pos in 0..*arity {
                let names: Vec<&str> = (0..*arity)
                    .map(|i| if i == pos { v.as_str() } else { fresh.as_str() })
                    .collect();
                let extra = clause(&[(ty.as_str(), names.as_slice())])?;
                out.push(Pattern::single(merge_clauses(c, &extra)?));
            }
        }
    }
    Ok(out)
}

fn expansions(
    pop: &[Pattern],
    i: usize,
    op: Expansion,
    types: &BTreeSet<(String, usize)>,
) -> Result<Vec<Pattern>, CogError> {
    let p = &pop[i];
    match op {
        Expansion::AddEdge => add_edge_children(p, types),
        Expansion::Conjoin => {
            let mut out = Vec::new();
            for q in pop {
                if p.width() + q.width() > MAX_CLAUSE_EDGES {
                    continue;
                }
                let q = rename_apart(q, &p.variables())?;
                let mut clauses = Vec::new();
                for a in &p.clauses {
                    for b in &q.clauses {
                        clauses.push(merge_clauses(a, b)?);
                    }
                }
                if clauses.iter().any(|c| c.len() > CANONICAL_ATOM_LIMIT) {
                    continue;
                }
                out.push(dedup(Pattern {
                    clauses,
                    frequency: 0.0,
                    surprisingness: 0.0,
                })?);
            }
            Ok(out)
        }
        Expansion::Disjoin => {
            let mut out = Vec::new();
            for (j, q) in pop.iter().enumerate() {
                if j != i && q.width() == p.width() {
                    out.push(disjoin(p, q)?);
                }
            }
            Ok(out)
        }
    }
}

/// Grow a pattern population from `seeds`. Each step expands one pattern;
/// the child is kept when it is new, within `max_edges`, and at least
/// `min_freq` frequent. The step reward is the increase in total quality.
pub fn mine_patterns(kb: &Snapshot, seeds: &[Pattern], cfg: &MineConfig) -> Result<MineOutcome, CogError> {
    let max_edges = cfg.max_edges.min(MAX_CLAUSE_EDGES);
    let types = edge_types(kb);
    let mut pop: Vec<Pattern> = Vec::new();
    let mut keys: BTreeSet<String> = BTreeSet::new();
    for s in seeds {
        let s = s.clone().evaluated(kb)?;
        if keys.insert(s.key()?) {
            pop.push(s);
        }
    }
    let mut steps = Vec::new();
    let mut stalled = false;
    let mut r = rng::seeded(cfg.seed);
    for _ in 0..cfg.budget {
        if pop.is_empty() {
            stalled = true;
            break;
        }
        let admissible =
            |c: &Pattern| c.width() <= max_edges && c.clauses.iter().all(|x| x.len() <= CANONICAL_ATOM_LIMIT);
        let choice: Option<(usize, Expansion, Pattern, bool, f64)> = match cfg.executor {
            MineExecutor::Greedy => {
                let mut best: Option<(usize, Expansion, Pattern, bool, f64)> = None;
                for i in 0..pop.len() {
                    for &op in &cfg.ops {
                        for child in expansions(&pop, i, op, &types)? {
                            if !admissible(&child) || keys.contains(&child.key()?) {
                                continue;
                            }
                            let child = child.evaluated(kb)?;
                            let kept = child.frequency >= cfg.min_freq;
                            let reward = if kept { child.quality() } else { 0.0 };
                            if best.as_ref().is_none_or(|b| reward > b.4) {
                                best = Some((i, op, child, kept, reward));
                            }
                        }
                    }
                }
                best.filter(|b| b.4 > 0.0)
            }
            MineExecutor::Sampled => {
                let w: Vec<f64> = pop.iter().map(|p| p.quality()).collect();
                let i = if w.iter().any(|x| *x > 0.0) {
                    WeightedIndex::new(&w)
                        .map_err(|_| CogError::EmptySupport)?
                        .sample(&mut r)
                } else {
                    r.gen_range(0..pop.len())
                };
                let Some(&op) = cfg.ops.get(r.gen_range(0..cfg.ops.len().max(1))) else {
                    stalled = true;
                    break;
                };
                let kids: Vec<Pattern> = expansions(&pop, i, op, &types)?
                    .into_iter()
                    .filter(|c| admissible(c))
                    .collect();
                if kids.is_empty() {
                    steps.push(MineStep {
                        parent: pop[i].key()?,
                        op,
                        child: String::new(),
                        kept: false,
                        reward: 0.0,
                    });
                    continue;
                }
                let child = kids[r.gen_range(0..kids.len())].clone().evaluated(kb)?;
                let fresh = !keys.contains(&child.key()?);
                let kept = fresh && child.frequency >= cfg.min_freq;
                let reward = if kept { child.quality() } else { 0.0 };
                Some((i, op, child, kept, reward))
            }
        };
        let Some((i, op, child, kept, reward)) = choice else {
            stalled = true;
            break;
        };
        let key = child.key()?;
        steps.push(MineStep {
            parent: pop[i].key()?,
            op,
            child: key.clone(),
            kept,
            reward,
        });
        if kept {
            keys.insert(key);
            pop.push(child);
        }
    }
    Ok(MineOutcome {
        patterns: pop,
        steps,
        stalled,
    })
}
