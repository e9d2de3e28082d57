use std::fs;
use std::path::Path;

use cogpat::cli;
use cogpat_core::relalg::{dp_suite, Reading};
use serde_json::Value;

use crate::{ensure, Outcome};

fn run(args: &[&str], out: &Path) -> Result<Value, String> {
    let mut all = vec!["cogpat"];
    all.extend_from_slice(args);
    let out_s = out.display().to_string();
    all.extend_from_slice(&["--out", &out_s]);
    let inv = cli::invoke(all, None);
    ensure(inv.code == 0, || {
        format!("{args:?} exited {}: {}{}", inv.code, inv.stdout, inv.stderr)
    })?;
    let name = format!("{}.json", args[1]);
    let text = fs::read_to_string(out.join(name)).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn suite_counts(v: &Value) -> (u64, u64, u64) {
    let s = &v["suite"];
    let n = |k: &str| s[k].as_u64().unwrap_or(u64::MAX);
    (n("instances"), n("preconditions_held"), n("violations"))
}

pub fn check() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let g = run(
        &["relalg", "verify-greedy", "--instances", "100", "--seed", "42"],
        dir.path(),
    )?;
    let (gn, gp, gv) = suite_counts(&g);
    ensure(gn == 100 && gv == 0, || {
        format!("verify-greedy: {gv} violations over {gn}")
    })?;
    let cx = &g["counterexample"];
    ensure(cx.is_object() && cx["report"]["inclusion"] == false, || {
        "no strict counterexample found".into()
    })?;

    let d = run(
        &["relalg", "verify-dp", "--instances", "100", "--seed", "42"],
        dir.path(),
    )?;
    let (dn, dp, dv) = suite_counts(&d);
    ensure(dn == 100 && dv == 0, || format!("verify-dp: {dv} violations over {dn}"))?;
    let literal = dp_suite(42..142, Reading::Literal).map_err(|e| e.to_string())?;

    Ok(format!(
        "greedy {gv}/{gp} violations, dp {dv}/{dp} violations, counterexample at seed {}; literal-reading dp {}/{} violations",
        cx["seed"], literal.violations, literal.preconditions_held
    ))
}
