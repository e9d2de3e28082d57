use std::path::Path;

use cogpat_core::relalg::{
    counterexample_search, dp_suite, greedy_suite, verify_dp_theorem, verify_greedy_theorem, GreedyReport, Reading,
    SuiteReport, Value, DEFAULT_CAP,
};
use serde_json::{json, Value as Json};

use super::verdict;
use crate::cli::{CliError, Ctx};
use crate::formats::{self, RelalgFile, RelalgFixture};

pub(crate) const DEFAULT_INSTANCES: usize = 100;
/// Seeds tried by the counterexample search.
pub(crate) const SEARCH_SEEDS: u64 = 1000;

fn pair(w: &Option<(Value, Value)>) -> Json {
    match w {
        Some((a, b)) => json!([a.to_string(), b.to_string()]),
        None => Json::Null,
    }
}

fn reading_name(r: Reading) -> &'static str {
    match r {
        Reading::Converse => "converse",
        Reading::Literal => "literal",
    }
}

fn suite_json(s: &SuiteReport) -> Json {
    json!({
        "instances": s.instances,
        "preconditions_held": s.preconditions_held,
        "violations": s.violations,
        "inconclusive": s.inconclusive,
        "first_violation": s.first_violation,
    })
}

fn greedy_json(r: &GreedyReport) -> Json {
    json!({
        "transitive": r.transitive,
        "monotone": r.monotone,
        "inclusion": r.inclusion,
        "violation": pair(&r.violation),
        "lhs_size": r.lhs.len(),
        "rhs_size": r.rhs.len(),
    })
}

fn load(path: &Path) -> Result<RelalgFixture, CliError> {
    Ok(formats::load::<RelalgFile>(path)?.1)
}

fn seeds(ctx: &Ctx) -> std::ops::Range<u64> {
    let n = ctx.cfg.instances.unwrap_or(DEFAULT_INSTANCES) as u64;
    ctx.cfg.seed..ctx.cfg.seed.saturating_add(n)
}

pub(crate) fn verify_greedy(ctx: &mut Ctx, fixture: Option<&Path>) -> Result<(), CliError> {
    if let Some(path) = fixture {
        let fx = load(path)?;
        let r = verify_greedy_theorem(&fx.s, &fx.r, &fx.functor, fx.depth)?;
        ctx.art
            .json("verify-greedy.json", &json!({ "fixture": greedy_json(&r) }))?;
        ctx.say(format!(
            "preconditions {}, inclusion {}",
            if r.preconditions() { "hold" } else { "fail" },
            if r.inclusion { "holds" } else { "fails" }
        ));
        return verdict(if r.violated() {
            vec![format!("inclusion fails at {}", pair(&r.violation))]
        } else {
            Vec::new()
        });
    }
    let range = seeds(ctx);
    let suite = greedy_suite(range.clone())?;
    let search_from = range.start;
    let found = counterexample_search(search_from..search_from.saturating_add(SEARCH_SEEDS))?;
    ctx.art.json(
        "verify-greedy.json",
        &json!({
            "suite": suite_json(&suite),
            "counterexample": found.as_ref().map(|(seed, r)| json!({ "seed": seed, "report": greedy_json(r) })),
        }),
    )?;
    ctx.say(format!(
        "{} instances, {} with preconditions, {} violations",
        suite.instances, suite.preconditions_held, suite.violations
    ));
    match &found {
        Some((seed, _)) => ctx.say(format!("non-monotone counterexample at seed {seed}")),
        None => ctx.say("no non-monotone counterexample found"),
    }
    let mut failures = Vec::new();
    if suite.violations > 0 {
        failures.push(format!(
            "{} violations, first at seed {:?}",
            suite.violations, suite.first_violation
        ));
    }
    if found.is_none() {
        failures.push("counterexample search found nothing".into());
    }
    verdict(failures)
}

pub(crate) fn verify_dp(ctx: &mut Ctx, fixture: Option<&Path>, reading: Option<Reading>) -> Result<(), CliError> {
    if let Some(path) = fixture {
        let fx = load(path)?;
        let t =
            fx.t.as_ref()
                .ok_or_else(|| CliError::Usage(format!("{}: verify-dp needs relation `t`", path.display())))?;
        let reading = reading.unwrap_or(fx.reading);
        let r = verify_dp_theorem(&fx.s, t, &fx.r, &fx.functor, fx.depth, DEFAULT_CAP, reading)?;
        ctx.art.json(
            "verify-dp.json",
            &json!({
                "reading": reading_name(reading),
                "transitive": r.transitive,
                "monotone_converse": r.monotone_converse,
                "monotone_literal": r.monotone_literal,
                "domain": r.domain,
                "depth_stable": r.depth_stable,
                "lfp_iterations": r.lfp.iterations,
                "lfp_converged": r.lfp.converged,
                "inclusion": r.inclusion,
                "violation": pair(&r.violation),
                "inconclusive": r.inconclusive(),
            }),
        )?;
        ctx.say(format!(
            "preconditions {}, inclusion {}{}",
            if r.preconditions() { "hold" } else { "fail" },
            if r.inclusion { "holds" } else { "fails" },
            if r.inconclusive() { " (inconclusive)" } else { "" }
        ));
        return verdict(if r.violated() {
            vec![format!("inclusion fails at {}", pair(&r.violation))]
        } else {
            Vec::new()
        });
    }
    let reading = reading.unwrap_or_default();
    let suite = dp_suite(seeds(ctx), reading)?;
    ctx.art.json(
        "verify-dp.json",
        &json!({ "reading": reading_name(reading), "suite": suite_json(&suite) }),
    )?;
    ctx.say(format!(
        "{} instances, {} with preconditions, {} violations, {} inconclusive",
        suite.instances, suite.preconditions_held, suite.violations, suite.inconclusive
    ));
    verdict(if suite.violations > 0 {
        vec![format!(
            "{} violations, first at seed {:?}",
            suite.violations, suite.first_violation
        )]
    } else {
        Vec::new()
    })
}
