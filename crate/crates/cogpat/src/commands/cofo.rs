use std::path::Path;

use cogpat_core::cofo::{make_cofo_dds, quality, CofoDds, Dataset};
use cogpat_core::dds::{chrono_solve, exact_dp, greedy_run, stochastic_dp, Dds, GreedyMode, SdpConfig};
use serde_json::json;

use super::dds::DEFAULT_ROLLOUTS;
use super::{verdict, TOL};
use crate::cli::{compute, CliError, Ctx};
use crate::config::Executor;
use crate::formats::{self, CofoFile};
use crate::report::num;

struct Walked {
    datasets: Vec<Dataset>,
    actions: Vec<String>,
    rewards: Vec<f64>,
}

/// Replay choices from the start, recovering every intermediate dataset.
/// `choose` returns `None` to stop early.
fn walk(p: &CofoDds, mut choose: impl FnMut(usize, &str) -> Option<String>) -> Result<Walked, CliError> {
    let mut d = p.start().clone();
    let mut w = Walked {
        datasets: vec![d.clone()],
        actions: Vec::new(),
        rewards: Vec::new(),
    };
    for t in 1..=p.stages() {
        let key = p.state_key(&d);
        let Some(a) = choose(t, &key) else { break };
        let x = p
            .actions(t, &d)
            .into_iter()
            .find(|x| p.action_key(x) == a)
            .ok_or_else(|| compute(format!("action {a} is not feasible at stage {t}")))?;
        w.rewards.push(p.reward(t, &d, &x));
        w.actions.push(a);
        let next = p
            .transition(t, &d, &x)
            .into_iter()
            .filter(|(pr, _)| *pr > 0.0)
            .map(|(_, s)| s)
            .next()
            .ok_or_else(|| compute(format!("empty transition at stage {t}")))?;
        d = next;
        w.datasets.push(d.clone());
    }
    Ok(w)
}

pub(crate) fn run(ctx: &mut Ctx, fixture: &Path) -> Result<(), CliError> {
    let fx = formats::load::<CofoFile>(fixture)?.1;
    let seed = ctx.cfg.seed;
    let executor = ctx.executor_or(Executor::Greedy);
    let p = make_cofo_dds(&fx.problem, fx.horizon, fx.sampler, seed)?;
    let walked = match executor {
        Executor::Greedy => {
            let tr = greedy_run(&p, p.start(), GreedyMode::Argmax, seed)?;
            let mut it = tr.steps.into_iter();
            walk(&p, |_, _| it.next().map(|s| s.action))?
        }
        _ => {
            let vf = match executor {
                Executor::Dp => exact_dp(&p)?,
                Executor::Chrono => chrono_solve(&p)?.table,
                _ => stochastic_dp(&p, &SdpConfig::new(ctx.budget_or(DEFAULT_ROLLOUTS)), seed)?,
            };
            let policy = vf.policy();
            walk(&p, |t, key| policy.action(t, key).map(String::from))?
        }
    };
    let qs = walked
        .datasets
        .iter()
        .map(|d| quality(&fx.problem, d))
        .collect::<Result<Vec<f64>, _>>()?;
    let q0 = qs[0];
    let qn = *qs.last().unwrap_or(&q0);
    let total: f64 = walked.rewards.iter().sum();
    let telescopes = (total - (q0 - qn)).abs() <= TOL;
    let monotone = qs.windows(2).all(|w| w[1] <= w[0] + TOL);
    let steps: Vec<_> = walked
        .actions
        .iter()
        .enumerate()
        .map(|(i, a)| {
            json!({
                "stage": i + 1,
                "dataset": walked.datasets[i].pairs(),
                "action": a,
                "reward": walked.rewards[i],
                "quality_before": qs[i],
                "quality_after": qs[i + 1],
            })
        })
        .collect();
    ctx.art.json(
        "trajectory.json",
        &json!({
            "executor": executor.as_str(),
            "horizon": fx.horizon,
            "steps": steps,
            "final_dataset": walked.datasets.last().map(Dataset::pairs),
            "initial_quality": q0,
            "final_quality": qn,
            "total_reward": total,
            "telescopes": telescopes,
            "monotone": monotone,
        }),
    )?;
    ctx.say(format!(
        "{} steps, quality {} -> {}, total reward {}",
        walked.actions.len(),
        num(q0),
        num(qn),
        num(total)
    ));
    let mut failures = Vec::new();
    if !telescopes {
        failures.push(format!("rewards sum to {total}, quality drop is {}", q0 - qn));
    }
    if !monotone {
        failures.push("quality increased along the trajectory".into());
    }
    verdict(failures)
}
