use std::path::Path;

use cogpat_core::metagraph::{AtomSpec, Snapshot, TypedMetagraph};
use cogpat_core::morphisms::{
    interleave, unfold, Algebra, ChronoRun, FoldRun, MemoKeys, MorphError, MorphRun, RunReport, TraversalOrder,
};
use serde_json::{json, Value};

use super::verdict;
use crate::cli::{compute, CliError, Ctx};
use crate::demo::{fib, fib_algebra, fib_coalgebra, size_algebra};
use crate::formats::{self, MetagraphFile};
use crate::report::num;

pub(crate) const DEFAULT_FRAMES: usize = 1000;

pub(crate) fn report_json(r: &RunReport) -> Value {
    json!({
        "kind": r.kind.as_str(),
        "frames_done": r.frames_done,
        "memo_hits": r.memo_hits,
        "status": r.status.as_str(),
    })
}

fn fold_run(g: &TypedMetagraph, alg: &Algebra<u64>) -> FoldRun<u64> {
    FoldRun::new(
        Snapshot::from(g.clone()),
        alg.clone(),
        &TraversalOrder::Insertion,
        MemoKeys::ByAtom,
    )
}

fn chrono_run(n: u32, budget: usize) -> ChronoRun<u32, u64> {
    ChronoRun::new(n, fib_coalgebra(), fib_algebra(), budget)
}

pub(crate) fn demo(ctx: &mut Ctx, fixture: Option<&Path>, n: u32, slice: usize) -> Result<(), CliError> {
    if slice == 0 {
        return Err(CliError::Usage("--slice must be at least 1".into()));
    }
    let budget = ctx.budget_or(DEFAULT_FRAMES);
    let (graph, alg, expected_fold) = match fixture {
        Some(p) => (formats::load::<MetagraphFile>(p)?.1, size_algebra(), None),
        None => (unfold(n, &fib_coalgebra(), budget)?.graph, fib_algebra(), Some(fib(n))),
    };

    let mut solo_c = chrono_run(n, budget);
    solo_c.finish()?;
    let mut solo_f = fold_run(&graph, &alg);
    solo_f.finish()?;

    let mut c = chrono_run(n, budget);
    let mut f = fold_run(&graph, &alg);
    interleave(&mut [&mut c, &mut f], slice, None)?;

    let value = |v: Option<&u64>| v.copied().ok_or_else(|| compute("run finished without a value"));
    let (cv, fv) = (value(solo_c.result())?, value(solo_f.result())?);
    let (icv, ifv) = (value(c.result())?, value(f.result())?);
    let same = cv == icv && fv == ifv && solo_c.report() == c.report() && solo_f.report() == f.report();

    let mut live = graph.clone();
    let mut probe = fold_run(&graph, &alg);
    let first = probe.run_steps(1, Some(&live));
    live.add_atom(AtomSpec::node("Probe"))?;
    let second = probe.run_steps(1, Some(&live));
    let stale = first.is_ok() && matches!(second, Err(MorphError::Stale { .. }));

    let chrono_json = json!({ "value": cv, "report": report_json(&solo_c.report()) });
    let fold_json = json!({ "value": fv, "report": report_json(&solo_f.report()) });
    ctx.art.json(
        "morph.json",
        &json!({
            "n": n,
            "slice": slice,
            "chrono": chrono_json,
            "fold": fold_json,
            "interleaved": {
                "chrono": { "value": icv, "report": report_json(&c.report()) },
                "fold": { "value": ifv, "report": report_json(&f.report()) },
            },
            "bit_exact": same,
            "stale_detected": stale,
            "stale_report": report_json(&probe.report()),
        }),
    )?;
    ctx.say(format!(
        "chrono({n}) = {cv} with {} memo hits; fold = {fv}",
        solo_c.report().memo_hits
    ));
    ctx.say(format!(
        "interleaved runs {}; staleness {}",
        if same { "match solo runs" } else { "DIFFER" },
        if stale { "detected" } else { "MISSED" }
    ));
    let mut failures = Vec::new();
    if cv != fib(n) {
        failures.push(format!("chrono({n}) = {cv}, expected {}", fib(n)));
    }
    if let Some(e) = expected_fold {
        if fv != e {
            failures.push(format!("fold = {fv}, expected {e}"));
        }
    }
    if !same {
        failures.push("interleaved runs differ from solo runs".into());
    }
    if !stale {
        failures.push(format!(
            "mutation not flagged (progress {})",
            num(probe.frames_done() as f64)
        ));
    }
    verdict(failures)
}
