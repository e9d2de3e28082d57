use std::collections::BTreeMap;

use cogpat::formats::{self, DdsFile};
use cogpat_core::dds::{
    chrono_solve, exact_dp, greedy_policy, greedy_run, policy_value, random_table, stochastic_dp, Dds, GreedyMode,
    RandomTableSpec, SdpConfig, TableDds,
};

use crate::{ensure, fixture, Outcome};

const TOL: f64 = 1e-9;

/// Memoized Bellman recursion written directly against the trait.
fn bellman<P: Dds>(p: &P, t: usize, s: &P::State, memo: &mut BTreeMap<(usize, String), f64>) -> f64 {
    let key = (t, p.state_key(s));
    if let Some(v) = memo.get(&key) {
        return *v;
    }
    let mut best = f64::NEG_INFINITY;
    for x in p.actions(t, s) {
        let mut q = p.reward(t, s, &x);
        if t < p.stages() {
            for (pr, s2) in p.transition(t, s, &x) {
                if pr > 0.0 {
                    q += p.discount() * pr * bellman(p, t + 1, &s2, memo);
                }
            }
        }
        best = best.max(q);
    }
    memo.insert(key, best);
    best
}

fn load(name: &str) -> Result<TableDds, String> {
    formats::load::<DdsFile>(&fixture(name))
        .map(|x| x.1)
        .map_err(|e| e.to_string())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn check_gap() -> Outcome {
    let gd1 = load("gd1.json")?;
    let a = "A".to_string();
    let greedy = greedy_run(&gd1, &a, GreedyMode::Argmax, 42).map_err(err)?.total;
    let exact = exact_dp(&gd1).map_err(err)?;
    let chrono = chrono_solve(&gd1).map_err(err)?;
    let e1 = exact.value(1, "A").unwrap_or(f64::NAN);
    let c1 = chrono.table.value(1, "A").unwrap_or(f64::NAN);
    ensure(greedy == 3.0, || format!("GD-1 greedy total {greedy}, expected 3"))?;
    ensure(e1 == 5.0, || format!("GD-1 exact {e1}, expected 5"))?;
    ensure((c1 - e1).abs() <= TOL, || format!("GD-1 chrono {c1} vs exact {e1}"))?;

    let spec = RandomTableSpec::default();
    let mut stochastic = 0;
    let mut strict_gaps = 0;
    for seed in 0..200u64 {
        let p = random_table(&spec, seed);
        let ex = exact_dp(&p).map_err(err)?;
        let ch = chrono_solve(&p).map_err(err)?;
        let diff = ex.max_abs_diff(&ch.table);
        ensure(matches!(diff, Some(d) if d <= TOL), || {
            format!("seed {seed}: chrono differs from exact ({diff:?})")
        })?;
        let gp = greedy_policy(&p).map_err(err)?;
        let mut memo = BTreeMap::new();
        for s0 in p.initial() {
            let e = ex.value(1, s0).unwrap_or(f64::NAN);
            let oracle = bellman(&p, 1, s0, &mut memo);
            ensure((e - oracle).abs() <= TOL, || {
                format!("seed {seed}: exact {e} vs oracle {oracle}")
            })?;
            let g = policy_value(&p, &gp, s0).map_err(err)?;
            ensure(g <= e + TOL, || format!("seed {seed}: greedy {g} exceeds exact {e}"))?;
            if g < e - TOL {
                strict_gaps += 1;
            }
        }
        if p.rows().any(|r| r.next.len() > 1) {
            stochastic += 1;
        }
    }
    Ok(format!(
        "GD-1 greedy 3 exact 5 chrono 5; 200 random instances ({stochastic} stochastic) chrono = exact = oracle, greedy <= exact ({strict_gaps} strict gaps)"
    ))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

const ROLLOUTS: [usize; 3] = [100, 1_000, 10_000];

fn sdp_curve(p: &TableDds) -> Result<(f64, Vec<f64>), String> {
    let s0 = p.initial()[0].clone();
    let exact = exact_dp(p).map_err(err)?.value(1, &s0).unwrap_or(f64::NAN);
    let mut curve = Vec::new();
    for r in ROLLOUTS {
        let mut errs = Vec::new();
        for seed in 0..20u64 {
            let vf = stochastic_dp(p, &SdpConfig::new(r), seed).map_err(err)?;
            errs.push((vf.value(1, &s0).unwrap_or(f64::NAN) - exact).abs());
        }
        curve.push(median(errs));
    }
    Ok((exact, curve))
}

pub fn check_sdp() -> Outcome {
    let mut parts = Vec::new();
    for name in ["gd1.json", "gd1-coin.json"] {
        let p = load(name)?;
        let (exact, c) = sdp_curve(&p)?;
        let fmt = c.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" > ");
        let decreasing = if c[0] > 0.0 {
            c[0] > c[1] && c[1] > c[2]
        } else {
            c.iter().all(|x| *x == 0.0)
        };
        ensure(decreasing, || format!("{name}: median errors not decreasing: {fmt}"))?;
        ensure(c[2] <= 0.05 * exact.abs(), || {
            format!("{name}: median error {} at 10^4 exceeds 5% of {exact}", c[2])
        })?;
        parts.push(format!("{name} {fmt}"));
    }
    Ok(format!(
        "median |f1 - exact| at 10^2/10^3/10^4 rollouts: {}",
        parts.join("; ")
    ))
}
