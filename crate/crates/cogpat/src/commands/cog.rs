use std::collections::BTreeSet;
use std::path::Path;

use cogpat_core::cogkit::{
    agglomerate, backward_chain_tv, clause, ecan_run, evolve as run_evolve, forward_chain, links_from_edges,
    mine_patterns, onemax, random_population, BidLabel, ChainExecutor, ClusterExecutor, MineConfig, MineExecutor,
    Pattern, Rule, UtilityTrace,
};
use cogpat_core::metagraph::{Snapshot, TypedMetagraph};
use cogpat_core::rng::derive_seed;
use cogpat_core::TruthValue;
use serde_json::{json, Value};

use super::{verdict, TOL};
use crate::cli::{CliError, Ctx};
use crate::config::Executor;
use crate::formats::{
    self, format_statement, parse_statement, EvolveFile, Fixture, MetagraphFile, PatternFile, PointsFile, RuleSetFile,
    TvRecord,
};
use crate::report::num;

pub(crate) const DEFAULT_CHAIN_STEPS: usize = 10;
pub(crate) const DEFAULT_EXPANSIONS: usize = 20;
pub(crate) const DEFAULT_MINE_STEPS: usize = 10;
pub(crate) const DEFAULT_EVALUATIONS: usize = 2000;
pub(crate) const DEFAULT_ECAN_STEPS: usize = 100;

fn graph(path: &Path) -> Result<TypedMetagraph, CliError> {
    Ok(formats::load::<MetagraphFile>(path)?.1)
}

fn rules(path: Option<&Path>) -> Result<Vec<Rule>, CliError> {
    match path {
        Some(p) => Ok(formats::load::<RuleSetFile>(p)?.1),
        None => Ok(Rule::ALL.to_vec()),
    }
}

fn tv(t: TruthValue) -> TvRecord {
    TvRecord::of(t)
}

pub(crate) fn chain(ctx: &mut Ctx, fixture: &Path, rules_path: Option<&Path>) -> Result<(), CliError> {
    let mg = graph(fixture)?;
    let rules = rules(rules_path)?;
    let executor = match ctx.executor_or(Executor::Greedy) {
        Executor::Sdp => ChainExecutor::Sampled,
        _ => ChainExecutor::Greedy,
    };
    let steps = ctx.budget_or(DEFAULT_CHAIN_STEPS);
    let out = forward_chain(&Snapshot::from(mg), &rules, steps, executor, ctx.cfg.seed)?;
    let trace: Vec<Value> = out
        .trace
        .iter()
        .map(|s| {
            json!({
                "step": s.step,
                "x": format_statement(&s.x),
                "y": s.y.as_ref().map(format_statement),
                "rule": s.rule.name(),
                "conclusion": format_statement(&s.conclusion),
                "tv": tv(s.tv),
                "reward": s.reward,
            })
        })
        .collect();
    let derived: Vec<Value> = out
        .derived
        .iter()
        .map(|(st, t)| json!({ "statement": format_statement(st), "tv": tv(*t) }))
        .collect();
    ctx.art.json(
        "chain.json",
        &json!({ "trace": trace, "derived": derived, "stalled_at": out.stalled_at }),
    )?;
    ctx.art.json("graph.json", &MetagraphFile::from_metagraph(&out.graph))?;
    ctx.say(format!(
        "{} steps, {} statements derived",
        out.trace.len(),
        out.derived.len()
    ));
    for s in &out.trace {
        ctx.say(format!(
            "{}: {} => {} (s={} c={})",
            s.step,
            s.rule.name(),
            format_statement(&s.conclusion),
            num(s.tv.strength()),
            num(s.tv.confidence())
        ));
    }
    Ok(())
}

pub(crate) fn backchain(
    ctx: &mut Ctx,
    fixture: &Path,
    target: &str,
    rules_path: Option<&Path>,
) -> Result<(), CliError> {
    let goal = parse_statement(target).ok_or_else(|| CliError::Usage(format!("cannot parse --target {target:?}")))?;
    let mg = graph(fixture)?;
    let rules = rules(rules_path)?;
    let budget = ctx.budget_or(DEFAULT_EXPANSIONS);
    let out = backward_chain_tv(&Snapshot::from(mg), &goal, &rules, budget, ctx.cfg.seed)?;
    let nodes: Vec<Value> = out
        .bid
        .nodes
        .iter()
        .map(|n| {
            let label = match &n.label {
                BidLabel::Rule(r) => r.name(),
                BidLabel::Dataset => "dataset",
                BidLabel::Open => "open",
            };
            json!({
                "statement": format_statement(&n.statement),
                "label": label,
                "tv": tv(n.tv),
                "children": n.children,
            })
        })
        .collect();
    ctx.art.json(
        "backchain.json",
        &json!({
            "target": format_statement(&goal),
            "tv": tv(out.tv),
            "stalled": out.stalled,
            "rewards": out.rewards,
            "bid": nodes,
        }),
    )?;
    ctx.say(format!(
        "{}: s={} c={}",
        format_statement(&goal),
        num(out.tv.strength()),
        num(out.tv.confidence())
    ));
    Ok(())
}

pub(crate) fn cluster(ctx: &mut Ctx, fixture: &Path) -> Result<(), CliError> {
    let (file, d) = formats::load::<PointsFile>(fixture)?;
    let executor = ctx.executor_or(Executor::Greedy);
    let ex = if executor == Executor::Dp {
        ClusterExecutor::ExactDp
    } else {
        ClusterExecutor::Greedy
    };
    let out = agglomerate(&d, file.k, ex)?;
    let merges: Vec<Value> = out
        .merges
        .iter()
        .map(|m| json!({ "left": m.left, "right": m.right, "gain": m.gain }))
        .collect();
    ctx.art.json(
        "cluster.json",
        &json!({
            "executor": executor.as_str(),
            "k": file.k,
            "blocks": out.clustering.blocks,
            "quality": out.clustering.quality,
            "entropy": out.clustering.entropy,
            "merges": merges,
            "total_reward": out.total_reward,
        }),
    )?;
    ctx.say(format!(
        "blocks {:?}, quality {}",
        out.clustering.blocks,
        num(out.clustering.quality)
    ));
    Ok(())
}

/// One all-variable single-edge pattern per `(edge type, arity)`.
fn default_seeds(mg: &TypedMetagraph) -> Result<Vec<Pattern>, CliError> {
    let types: BTreeSet<(String, usize)> = mg
        .atoms()
        .filter(|a| !a.is_node())
        .map(|a| (a.type_label().to_string(), a.targets().len()))
        .collect();
    let mut out = Vec::new();
    for (ty, arity) in types {
        let vars: Vec<String> = (0..arity).map(|i| format!("$X{i}")).collect();
        let args: Vec<&str> = vars.iter().map(String::as_str).collect();
        out.push(Pattern::single(clause(&[(ty.as_str(), args.as_slice())])?));
    }
    Ok(out)
}

pub(crate) fn mine(
    ctx: &mut Ctx,
    fixture: &Path,
    seeds_path: Option<&Path>,
    min_freq: f64,
    max_edges: usize,
) -> Result<(), CliError> {
    let mg = graph(fixture)?;
    let seeds = match seeds_path {
        Some(p) => formats::load::<PatternFile>(p)?.1,
        None => default_seeds(&mg)?,
    };
    let cfg = MineConfig {
        min_freq,
        max_edges,
        budget: ctx.budget_or(DEFAULT_MINE_STEPS),
        executor: match ctx.executor_or(Executor::Greedy) {
            Executor::Sdp => MineExecutor::Sampled,
            _ => MineExecutor::Greedy,
        },
        seed: ctx.cfg.seed,
        ..MineConfig::default()
    };
    let out = mine_patterns(&Snapshot::from(mg), &seeds, &cfg)?;
    let steps: Vec<Value> = out
        .steps
        .iter()
        .map(|s| {
            json!({
                "parent": s.parent,
                "op": s.op.as_str(),
                "child": s.child,
                "kept": s.kept,
                "reward": s.reward,
            })
        })
        .collect();
    ctx.art.json("patterns.json", &PatternFile::of(&out.patterns))?;
    ctx.art
        .json("mine.json", &json!({ "steps": steps, "stalled": out.stalled }))?;
    ctx.say(format!(
        "{} patterns after {} steps",
        out.patterns.len(),
        out.steps.len()
    ));
    Ok(())
}

pub(crate) fn evolve(ctx: &mut Ctx, fixture: Option<&Path>) -> Result<(), CliError> {
    let (file, variation) = match fixture {
        Some(p) => formats::load::<EvolveFile>(p)?,
        None => {
            let f = EvolveFile::default();
            let v = f.validate().expect("default settings are valid");
            (f, v)
        }
    };
    let seed = ctx.cfg.seed;
    let budget = ctx.budget_or(DEFAULT_EVALUATIONS);
    let pop = random_population(
        file.population,
        file.length,
        &onemax,
        derive_seed(seed, "evolve/population"),
    );
    let out = run_evolve(onemax, pop, variation, budget, derive_seed(seed, "evolve/run"))?;
    let bits: String = out.best.bits.iter().map(|b| if *b { '1' } else { '0' }).collect();
    let solved = out.best.fitness >= file.length as f64;
    let history: Vec<Vec<String>> = out
        .history
        .iter()
        .enumerate()
        .map(|(i, f)| vec![(i + 1).to_string(), num(*f)])
        .collect();
    ctx.art.csv("evolve_history.csv", &["evaluation", "best"], &history)?;
    ctx.art.json(
        "evolve.json",
        &json!({
            "settings": file,
            "budget": budget,
            "best": bits,
            "fitness": out.best.fitness,
            "evaluations": out.evaluations,
            "found_at": out.found_at,
            "solved": solved,
        }),
    )?;
    ctx.say(format!(
        "best {bits} fitness {} found at evaluation {}",
        num(out.best.fitness),
        out.found_at
    ));
    Ok(())
}

pub(crate) fn ecan(ctx: &mut Ctx, fixture: &Path, amount: f64) -> Result<(), CliError> {
    let mg = graph(fixture)?;
    let links = links_from_edges(&mg);
    let steps = ctx.budget_or(DEFAULT_ECAN_STEPS);
    let before: f64 = mg.atoms().map(|a| a.sti()).sum();
    let utility: UtilityTrace = Vec::new();
    let out = ecan_run(&Snapshot::from(mg), &links, amount, steps, &utility, ctx.cfg.seed)?;
    let after: f64 = out.sti.values().sum();
    let drift = (after - before).abs();
    let transfers: Vec<Value> = out
        .transfers
        .iter()
        .map(|t| json!({ "step": t.step, "from": t.from.0, "to": t.to.0 }))
        .collect();
    let sti: serde_json::Map<String, Value> = out.sti.iter().map(|(id, v)| (id.to_string(), json!(v))).collect();
    ctx.art.json(
        "ecan.json",
        &json!({
            "steps": steps,
            "amount": amount,
            "total_before": before,
            "total_after": after,
            "conserved": drift <= TOL,
            "transfers": transfers,
            "skipped": out.skipped,
            "sti": sti,
        }),
    )?;
    ctx.art.json("graph.json", &MetagraphFile::from_metagraph(&out.graph))?;
    ctx.say(format!(
        "{} transfers, {} skipped, total STI {} -> {}",
        out.transfers.len(),
        out.skipped.len(),
        num(before),
        num(after)
    ));
    verdict(if drift > TOL {
        vec![format!("total STI drifted by {drift}")]
    } else {
        Vec::new()
    })
}
