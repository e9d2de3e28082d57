use std::collections::{BTreeMap, BTreeSet};

use cogpat::formats::{self, PointsFile, SubpatternFile, SubpatternInput};
use cogpat_core::cogkit::{agglomerate, ClusterExecutor};
use cogpat_core::subpattern::{
    alignment_score, block_union, build_subpattern_dag, check_mutual_associativity, nonempty_subsets, SimplicityMeasure,
};

use crate::{ensure, fixture, Outcome};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load(name: &str) -> Result<(SubpatternFile, SubpatternInput), String> {
    formats::load::<SubpatternFile>(&fixture(name)).map_err(err)
}

type Block = BTreeSet<usize>;

fn pairs(b: &Block) -> usize {
    b.len() * b.len().saturating_sub(1) / 2
}

/// `x → y` when some `z` has `y ∪ z = x` and `σ(y) + σ(z) + 1 < σ(x)`.
fn union_edge(x: &Block, y: &Block, universe: &[Block]) -> bool {
    y.is_subset(x)
        && y != x
        && universe
            .iter()
            .any(|z| y.union(z).copied().collect::<Block>() == *x && pairs(y) + pairs(z) + 1 < pairs(x))
}

fn reaches(x: &Block, y: &Block, universe: &[Block]) -> bool {
    let mut frontier = vec![x.clone()];
    let mut seen: BTreeSet<Block> = BTreeSet::new();
    while let Some(a) = frontier.pop() {
        for b in universe {
            if !seen.contains(b) && union_edge(&a, b, universe) {
                if b == y {
                    return true;
                }
                seen.insert(b.clone());
                frontier.push(b.clone());
            }
        }
    }
    false
}

fn alignment() -> Result<(f64, f64), String> {
    let (file, d) = formats::load::<PointsFile>(&fixture("line5.json")).map_err(err)?;
    let n = d.len();
    let run = agglomerate(&d, file.k, ClusterExecutor::Greedy).map_err(err)?;
    let set = |xs: &[usize]| xs.iter().copied().collect::<Block>();
    let trace: Vec<(Block, Block)> = run.trace_edges().iter().map(|(p, c)| (set(p), set(c))).collect();
    let mapping: BTreeMap<Block, Block> = trace
        .iter()
        .flat_map(|(p, c)| [(p.clone(), p.clone()), (c.clone(), c.clone())])
        .collect();
    let universe = nonempty_subsets(n);
    let dag = build_subpattern_dag(&universe, &[block_union()], &SimplicityMeasure::pair_count(1.0));
    let score = alignment_score(&trace, &dag, &mapping).map_err(err)?.score;
    let by_hand = trace.iter().filter(|(p, c)| reaches(p, c, &universe)).count() as f64 / trace.len() as f64;
    Ok((score, by_hand))
}

pub fn check() -> Outcome {
    let (union_file, union) = load("union.json")?;
    let SubpatternInput::Blocks(items, ops) = union else {
        return Err("union fixture is not blocks".into());
    };
    let rep = check_mutual_associativity(&ops, &items, union_file.trials, 42).map_err(err)?;
    ensure(rep.passed(), || "union-merge audit failed".into())?;

    let (mm_file, maxmin) = load("maxmin.json")?;
    let SubpatternInput::Int(items, ops) = maxmin else {
        return Err("maxmin fixture is not ints".into());
    };
    let rep = check_mutual_associativity(&ops, &items, mm_file.trials, 42).map_err(err)?;
    let pair = rep
        .pairs
        .iter()
        .find(|p| !p.passed())
        .ok_or("{max, min} audit passed")?;
    let w = pair.witnesses.first().ok_or("failing pair has no witness")?;
    let op = |name: &str, a: i64, b: i64| if name == "max" { a.max(b) } else { a.min(b) };
    let lhs = op(&pair.outer, op(&pair.inner, w.x, w.y), w.z);
    let rhs = op(&pair.inner, w.x, op(&pair.outer, w.y, w.z));
    ensure(lhs != rhs && w.lhs == lhs && w.rhs == rhs, || {
        format!("witness {w:?} is not a counterexample")
    })?;

    let (abab_file, abab) = load("abab.json")?;
    let SubpatternInput::String(items, ops) = abab else {
        return Err("abab fixture is not strings".into());
    };
    let sm = SimplicityMeasure::length(abab_file.sigma_star);
    let dag = build_subpattern_dag(&items, &ops, &sm);
    let (x, y) = (dag.index_of(&"abab".to_string()), dag.index_of(&"ab".to_string()));
    ensure(
        dag.edges.iter().any(|e| Some(e.parent) == x && Some(e.child) == y),
        || "no abab -> ab edge".into(),
    )?;
    dag.verify(&ops, &sm).map_err(err)?;

    let (concat_file, concat) = load("concat.json")?;
    let SubpatternInput::String(items, ops) = concat else {
        return Err("concat fixture is not strings".into());
    };
    let cdag = build_subpattern_dag(&items, &ops, &SimplicityMeasure::length(concat_file.sigma_star));
    ensure(cdag.edges.is_empty(), || {
        format!("concatenation dag has {} edges", cdag.edges.len())
    })?;

    let (score, by_hand) = alignment()?;
    ensure(score == by_hand, || {
        format!("alignment {score}, hand enumeration {by_hand}")
    })?;
    ensure(score == 0.5, || format!("line5 alignment {score}, expected 0.5"))?;

    Ok(format!(
        "union audit passes; {{max,min}} witness {}∘{} ({}, {}, {}); abab -> ab edge; concat dag empty; line5 alignment {score} = hand enumeration",
        pair.outer, pair.inner, w.x, w.y, w.z
    ))
}
