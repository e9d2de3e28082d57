use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use cogpat_core::cogkit::{agglomerate, ClusterExecutor};
use cogpat_core::subpattern::{
    alignment_score, block_union, build_subpattern_dag, check_mutual_associativity, nonempty_subsets, AuditReport,
    BinOp, SimplicityMeasure,
};
use serde::Serialize;
use serde_json::{json, Value};

use super::verdict;
use crate::cli::{CliError, Ctx};
use crate::config::Executor;
use crate::formats::{self, PointsFile, SubpatternFile, SubpatternInput, MAX_BLOCK_N};
use crate::report::num;

fn audit_json<T: Serialize>(rep: &AuditReport<T>) -> Value {
    let pairs: Vec<Value> = rep
        .pairs
        .iter()
        .map(|p| {
            json!({
                "outer": p.outer,
                "inner": p.inner,
                "checked": p.checked,
                "undefined": p.undefined,
                "failures": p.failures,
                "passed": p.passed(),
                "witnesses": p.witnesses.iter().map(|w| json!({
                    "x": w.x, "y": w.y, "z": w.z, "lhs": w.lhs, "rhs": w.rhs,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "exhaustive": rep.exhaustive, "passed": rep.passed(), "pairs": pairs })
}

fn run_audit<T: Clone + PartialEq + Serialize + std::fmt::Debug>(
    ctx: &mut Ctx,
    items: &[T],
    ops: &[BinOp<T>],
    trials: usize,
) -> Result<(), CliError> {
    let rep = check_mutual_associativity(ops, items, trials, ctx.cfg.seed)?;
    ctx.art.json("audit.json", &audit_json(&rep))?;
    let mut failures = Vec::new();
    for p in &rep.pairs {
        let status = if p.passed() { "ok" } else { "FAILS" };
        ctx.say(format!(
            "{}∘{}: {status} ({} checked, {} undefined)",
            p.outer, p.inner, p.checked, p.undefined
        ));
        if let Some(w) = p.witnesses.first() {
            let line = format!(
                "witness {} over {}: x={:?} y={:?} z={:?} lhs={:?} rhs={:?}",
                p.outer, p.inner, w.x, w.y, w.z, w.lhs, w.rhs
            );
            ctx.say(line.clone());
            failures.push(line);
        }
    }
    verdict(failures)
}

pub(crate) fn audit(ctx: &mut Ctx, fixture: &Path) -> Result<(), CliError> {
    let (file, input) = formats::load::<SubpatternFile>(fixture)?;
    match input {
        SubpatternInput::Int(items, ops) => run_audit(ctx, &items, &ops, file.trials),
        SubpatternInput::String(items, ops) => run_audit(ctx, &items, &ops, file.trials),
        SubpatternInput::Blocks(items, ops) => run_audit(ctx, &items, &ops, file.trials),
    }
}

fn run_dag<T: Clone + Ord + Serialize>(
    ctx: &mut Ctx,
    items: &[T],
    ops: &[BinOp<T>],
    sm: &SimplicityMeasure<T>,
) -> Result<(), CliError> {
    let dag = build_subpattern_dag(items, ops, sm);
    let verified = dag.verify(ops, sm);
    let acyclic = dag.is_acyclic();
    let edges: Vec<Value> = dag
        .edges
        .iter()
        .map(|e| json!({ "parent": e.parent, "child": e.child, "op": e.op, "other": e.other }))
        .collect();
    ctx.art.json(
        "dag.json",
        &json!({
            "items": dag.items,
            "sigma": dag.items.iter().map(|x| sm.sigma(x)).collect::<Vec<_>>(),
            "edges": edges,
            "acyclic": acyclic,
            "verified": verified.is_ok(),
        }),
    )?;
    ctx.say(format!("{} items, {} edges", dag.items.len(), dag.edges.len()));
    let mut failures = Vec::new();
    if let Err(e) = verified {
        failures.push(e.to_string());
    }
    if !acyclic {
        failures.push("dag has a cycle".into());
    }
    verdict(failures)
}

pub(crate) fn dag(ctx: &mut Ctx, fixture: &Path) -> Result<(), CliError> {
    let (file, input) = formats::load::<SubpatternFile>(fixture)?;
    let star = file.sigma_star;
    match input {
        SubpatternInput::Int(items, ops) => {
            let sm = SimplicityMeasure::new(|x: &i64| x.unsigned_abs() as f64, move |_, _, _| star);
            run_dag(ctx, &items, &ops, &sm)
        }
        SubpatternInput::String(items, ops) => run_dag(ctx, &items, &ops, &SimplicityMeasure::length(star)),
        SubpatternInput::Blocks(items, ops) => run_dag(ctx, &items, &ops, &SimplicityMeasure::pair_count(star)),
    }
}

pub(crate) fn align(ctx: &mut Ctx, fixture: &Path) -> Result<(), CliError> {
    let (file, d) = formats::load::<PointsFile>(fixture)?;
    let n = d.len();
    if n > MAX_BLOCK_N {
        return Err(CliError::Usage(format!(
            "{}: align supports at most {MAX_BLOCK_N} items, got {n}",
            fixture.display()
        )));
    }
    let executor = ctx.executor_or(Executor::Greedy);
    let ex = if executor == Executor::Dp {
        ClusterExecutor::ExactDp
    } else {
        ClusterExecutor::Greedy
    };
    let run = agglomerate(&d, file.k, ex)?;
    let set = |xs: &[usize]| xs.iter().copied().collect::<BTreeSet<usize>>();
    let trace: Vec<(BTreeSet<usize>, BTreeSet<usize>)> =
        run.trace_edges().iter().map(|(p, c)| (set(p), set(c))).collect();
    let mapping: BTreeMap<BTreeSet<usize>, BTreeSet<usize>> = trace
        .iter()
        .flat_map(|(p, c)| [(p.clone(), p.clone()), (c.clone(), c.clone())])
        .collect();
    let dag = build_subpattern_dag(
        &nonempty_subsets(n),
        &[block_union()],
        &SimplicityMeasure::pair_count(1.0),
    );
    let a = alignment_score(&trace, &dag, &mapping)?;
    let edges: Vec<Value> = trace
        .iter()
        .zip(&a.verdicts)
        .map(|((p, c), ok)| json!({ "parent": p, "child": c, "aligned": ok }))
        .collect();
    ctx.art.json(
        "align.json",
        &json!({
            "executor": executor.as_str(),
            "blocks": run.clustering.blocks,
            "trace": edges,
            "dag_edges": dag.edges.len(),
            "aligned": a.aligned,
            "edges": a.edges,
            "score": a.score,
        }),
    )?;
    ctx.say(format!(
        "alignment {} ({}/{} trace edges)",
        num(a.score),
        a.aligned,
        a.edges
    ));
    Ok(())
}
