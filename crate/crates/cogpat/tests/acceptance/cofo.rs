use cogpat::formats::{self, CofoFile};
use cogpat_core::cofo::{make_cofo_dds, quality, CofoDds, CofoProblem, Combinator, Dataset, Hypothesis, Sampler};
use cogpat_core::dds::{exact_dp, Dds};
use cogpat_core::rng;
use rand::Rng;

use crate::{ensure, fixture, Outcome};

const TOL: f64 = 1e-9;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn random_problem(seed: u64) -> Result<CofoProblem, String> {
    let mut r = rng::seeded(seed);
    let points: Vec<i64> = (0..8).collect();
    let k = r.gen_range(2..=6);
    let hyps: Vec<Hypothesis> = (0..k)
        .map(|i| Hypothesis {
            name: format!("h{i}"),
            values: points.iter().map(|_| r.gen_range(0..6) as f64).collect(),
            prior: 1.0 / k as f64,
        })
        .collect();
    let objective = hyps[r.gen_range(0..k)].values.clone();
    let weights: Vec<f64> = points.iter().map(|_| r.gen_range(1..4) as f64).collect();
    let rho = [0.15, 0.3, 0.45, 0.6][r.gen_range(0..4)];
    let combinators = vec![
        Combinator::new("mid", |x, y| Some((x + y) / 2)),
        Combinator::new("next", |x, _| Some(x + 1)),
        Combinator::new("max", |x, y| Some(x.max(y))),
    ];
    CofoProblem::new(points, weights, objective, hyps, rho, combinators).map_err(err)
}

/// Qualities of every true-valued dataset, indexed by subset bitmask.
fn subset_qualities(p: &CofoProblem) -> Result<Vec<f64>, String> {
    let pts = p.points();
    (0u32..1 << pts.len())
        .map(|mask| {
            let pairs = (0..pts.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| p.observe(pts[i]).expect("domain point"))
                .collect();
            quality(p, &Dataset::from_pairs(pairs)).map_err(err)
        })
        .collect()
}

fn narrowing(p: &CofoProblem) -> Result<usize, String> {
    let q = subset_qualities(p)?;
    let mut pairs = 0;
    for small in 0..q.len() {
        for big in 0..q.len() {
            if small & big == small {
                pairs += 1;
                ensure(q[big] <= q[small] + TOL, || {
                    format!("D={small:#b} ⊆ D'={big:#b} but quality {} > {}", q[big], q[small])
                })?;
            }
        }
    }
    Ok(pairs)
}

/// Follow `choose` from the start; check the rewards telescope.
fn telescopes(p: &CofoDds, mut choose: impl FnMut(usize, &Dataset, usize) -> Option<usize>) -> Result<(), String> {
    let problem = p.problem();
    let mut d = p.start().clone();
    let q0 = quality(problem, &d).map_err(err)?;
    let mut total = 0.0;
    let mut prev = q0;
    for t in 1..=p.stages() {
        let acts = p.actions(t, &d);
        let Some(i) = choose(t, &d, acts.len()) else { break };
        let x = &acts[i];
        total += p.reward(t, &d, x);
        let next = p.transition(t, &d, x);
        ensure(next.len() == 1 && next[0].0 == 1.0, || {
            "cofo transition is not deterministic".into()
        })?;
        d = next[0].1.clone();
        let q = quality(problem, &d).map_err(err)?;
        ensure(q <= prev + TOL, || {
            format!("quality rose from {prev} to {q} at stage {t}")
        })?;
        prev = q;
    }
    ensure((total - (q0 - prev)).abs() <= TOL, || {
        format!("rewards sum to {total}, quality dropped {}", q0 - prev)
    })
}

pub fn check() -> Outcome {
    let mirror = formats::load::<CofoFile>(&fixture("mirror.json")).map_err(err)?.1;
    let mut problems = vec![(mirror.problem, mirror.horizon)];
    for seed in 0..40 {
        problems.push((random_problem(seed)?, 3));
    }
    let mut pairs = 0;
    let mut walks = 0;
    for (i, (prob, horizon)) in problems.iter().enumerate() {
        ensure(prob.points().len() <= 8 && prob.hypotheses().len() <= 6, || {
            "fixture too large".into()
        })?;
        pairs += narrowing(prob).map_err(|e| format!("problem {i}: {e}"))?;
        let dds = make_cofo_dds(prob, *horizon, Sampler::Exhaustive, i as u64).map_err(err)?;
        let mut r = rng::seeded(i as u64);
        for _ in 0..25 {
            telescopes(&dds, |_, _, n| (n > 0).then(|| r.gen_range(0..n))).map_err(|e| format!("problem {i}: {e}"))?;
            walks += 1;
        }
        if i < 8 {
            let policy = exact_dp(&dds).map_err(err)?.policy();
            telescopes(&dds, |t, d, _| {
                let a = policy.action(t, &dds.state_key(d))?;
                dds.actions(t, d).iter().position(|x| dds.action_key(x) == a)
            })
            .map_err(|e| format!("problem {i} dp walk: {e}"))?;
            walks += 1;
        }
    }
    Ok(format!(
        "{} problems, {pairs} dataset pairs D ⊆ D' narrow monotonically; {walks} trajectories telescope to 1e-9",
        problems.len()
    ))
}
