use std::path::Path;

use cogpat_core::dds::{
    chrono_solve, exact_dp, greedy_policy, greedy_run, policy_value, stochastic_dp, GreedyMode, SdpConfig, TableDds,
    Trajectory, ValueFunction,
};
use serde_json::{json, Value};

use super::{verdict, TOL};
use crate::cli::{CliError, Ctx};
use crate::config::Executor;
use crate::formats::{self, DdsFile};
use crate::report::num;

pub(crate) const DEFAULT_ROLLOUTS: usize = 1000;

fn load(path: &Path) -> Result<TableDds, CliError> {
    Ok(formats::load::<DdsFile>(path)?.1)
}

pub(crate) fn trajectory_json(start: &str, tr: &Trajectory) -> Value {
    json!({
        "start": start,
        "steps": tr.steps.iter().map(|s| json!({
            "stage": s.stage,
            "state": s.state,
            "action": s.action,
            "reward": s.reward,
        })).collect::<Vec<_>>(),
        "total": tr.total,
    })
}

fn value_rows(vf: &ValueFunction) -> Vec<Vec<String>> {
    vf.table
        .iter()
        .map(|((t, s), e)| vec![t.to_string(), s.clone(), num(e.value), e.argmax.join(";")])
        .collect()
}

pub(crate) fn solve(ctx: &mut Ctx, fixture: &Path) -> Result<(), CliError> {
    let p = load(fixture)?;
    let executor = ctx.executor_or(Executor::Dp);
    let seed = ctx.cfg.seed;
    if executor == Executor::Greedy {
        let mut runs = Vec::new();
        for s0 in p.initial() {
            let tr = greedy_run(&p, s0, GreedyMode::Argmax, seed)?;
            ctx.say(format!("greedy total from {s0}: {}", num(tr.total)));
            runs.push(trajectory_json(s0, &tr));
        }
        ctx.art.json(
            "trajectory.json",
            &json!({ "executor": "greedy", "trajectories": runs }),
        )?;
        return Ok(());
    }
    let mut extra = json!({});
    let vf = match executor {
        Executor::Dp => exact_dp(&p)?,
        Executor::Chrono => {
            let out = chrono_solve(&p)?;
            extra = json!({ "memo_hits": out.memo_hits, "expansions": out.expansions });
            out.table
        }
        Executor::Sdp => {
            let rollouts = ctx.budget_or(DEFAULT_ROLLOUTS);
            extra = json!({ "rollouts": rollouts });
            stochastic_dp(&p, &SdpConfig::new(rollouts), seed)?
        }
        Executor::Greedy => unreachable!(),
    };
    let mut initial = serde_json::Map::new();
    for s0 in p.initial() {
        let v = vf.value(1, s0).unwrap_or(f64::NEG_INFINITY);
        ctx.say(format!("{} f1({s0}) = {}", executor.as_str(), num(v)));
        initial.insert(s0.clone(), json!(v));
    }
    ctx.art.csv(
        "value_function.csv",
        &["stage", "state", "value", "argmax"],
        &value_rows(&vf),
    )?;
    ctx.art.json(
        "solve.json",
        &json!({ "executor": executor.as_str(), "initial": initial, "details": extra }),
    )?;
    Ok(())
}

pub(crate) fn compare(ctx: &mut Ctx, fixture: &Path) -> Result<(), CliError> {
    let p = load(fixture)?;
    let seed = ctx.cfg.seed;
    let rollouts = ctx.budget_or(DEFAULT_ROLLOUTS);
    let exact = exact_dp(&p)?;
    let chrono = chrono_solve(&p)?;
    let sdp = stochastic_dp(&p, &SdpConfig::new(rollouts), seed)?;
    let greedy = greedy_policy(&p)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut states = Vec::new();
    for s0 in p.initial() {
        let g = policy_value(&p, &greedy, s0)?;
        let e = exact.value(1, s0).unwrap_or(f64::NEG_INFINITY);
        let c = chrono.table.value(1, s0).unwrap_or(f64::NEG_INFINITY);
        let s = sdp.value(1, s0).unwrap_or(f64::NEG_INFINITY);
        for (method, v) in [("greedy", g), ("exact", e), ("chrono", c), ("sdp", s)] {
            rows.push(vec![method.to_string(), s0.clone(), num(v)]);
        }
        if g > e + TOL {
            failures.push(format!("greedy {g} exceeds exact {e} from {s0}"));
        }
        ctx.say(format!(
            "{s0}: greedy {} exact {} chrono {} sdp {}",
            num(g),
            num(e),
            num(c),
            num(s)
        ));
        states.push(json!({ "state": s0, "greedy": g, "exact": e, "chrono": c, "sdp": s }));
    }
    let chrono_diff = exact.max_abs_diff(&chrono.table);
    match chrono_diff {
        Some(d) if d <= TOL => {}
        Some(d) => failures.push(format!("chrono differs from exact by {d}")),
        None => failures.push("chrono and exact tables cover different states".into()),
    }
    ctx.art.csv("compare.csv", &["method", "state", "value"], &rows)?;
    ctx.art.json(
        "compare.json",
        &json!({
            "rollouts": rollouts,
            "initial": states,
            "chrono_max_abs_diff": chrono_diff,
            "chrono_memo_hits": chrono.memo_hits,
            "sdp_max_abs_diff": exact.max_abs_diff(&sdp),
            "passed": failures.is_empty(),
        }),
    )?;
    verdict(failures)
}
