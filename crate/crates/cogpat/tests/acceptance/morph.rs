use std::sync::Arc;

use cogpat::demo::{fib, fib_algebra, fib_coalgebra, size_algebra};
use cogpat::formats::{self, MetagraphFile};
use cogpat_core::metagraph::{AtomId, AtomSpec, Snapshot, Target, TypedMetagraph};
use cogpat_core::morphisms::{
    audit_algebra, chrono, chrono_unfused, fold, histo_fold, interleave, order_report, Algebra, AtomView, Child,
    ChronoRun, Coalgebra, FoldRun, Layer, MemoKeys, MorphError, MorphRun, RunStatus, TraversalOrder, UnfoldRun,
};
use cogpat_core::rng;
use cogpat_core::subpattern::{check_mutual_associativity, BinOp};
use cogpat_core::tv::TruthValue;
use rand::Rng;

use crate::gen::{random_graph, small_graphs};
use crate::{ensure, fixture, Outcome};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn kid_values<V: Copy>(kids: &[Option<V>]) -> impl Iterator<Item = V> + '_ {
    kids.iter().flatten().copied()
}

fn depth_algebra() -> Algebra<u64> {
    Algebra::new(
        0,
        |_: &AtomView<'_>, kids: &[Option<u64>]| 1 + kid_values(kids).max().unwrap_or(0),
        |x: &u64, y: &u64| *x.max(y),
    )
}

/// Position-sensitive digest of each atom; roots are summed.
fn digest_algebra() -> Algebra<u64> {
    Algebra::new(
        0,
        |a: &AtomView<'_>, kids: &[Option<u64>]| {
            let mut h = rng::fnv1a(a.type_label().as_bytes()) ^ rng::fnv1a(a.name().unwrap_or("").as_bytes());
            h = h.wrapping_add(a.sti() as u64);
            for (i, k) in kids.iter().enumerate() {
                h = h
                    .wrapping_mul(0x100_0000_01b3)
                    .wrapping_add(k.unwrap_or(7).rotate_left(i as u32 + 1));
            }
            h
        },
        |x: &u64, y: &u64| x.wrapping_add(*y),
    )
}

fn sti_algebra() -> Algebra<i64> {
    Algebra::new(
        0,
        |a: &AtomView<'_>, kids: &[Option<i64>]| a.sti() as i64 + kid_values(kids).sum::<i64>(),
        |x: &i64, y: &i64| x + y,
    )
}

fn subtraction_algebra() -> Algebra<i64> {
    Algebra::new(
        0,
        |a: &AtomView<'_>, kids: &[Option<i64>]| 1 + a.sti() as i64 + kid_values(kids).sum::<i64>(),
        |x: &i64, y: &i64| x - y,
    )
}

fn fixture_graph(name: &str) -> Result<TypedMetagraph, String> {
    formats::load::<MetagraphFile>(&fixture(name)).map(|x| x.1).map_err(err)
}

fn test_graphs() -> Result<Vec<TypedMetagraph>, String> {
    let mut gs = vec![fixture_graph("abc.json")?, fixture_graph("likes.json")?];
    gs.extend((0..20).map(|s| random_graph(6 + (s as usize % 15), 1000 + s)));
    Ok(gs)
}

fn orders(n: u64) -> Vec<TraversalOrder> {
    let mut v: Vec<TraversalOrder> = (0..n).map(TraversalOrder::SeededRandom).collect();
    v.push(TraversalOrder::Insertion);
    v.push(TraversalOrder::Topological);
    v
}

/// Audit `alg` on `samples`; on success, check all orders agree on `graphs`.
fn order_free<V: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static>(
    name: &str,
    alg: &Algebra<V>,
    samples: &[V],
    graphs: &[TypedMetagraph],
) -> Result<bool, String> {
    let audit = audit_algebra(alg, samples, 2000, 7);
    let combine = {
        let a = alg.clone();
        BinOp::total(name, move |x: &V, y: &V| a.combine(x, y))
    };
    let mutual = check_mutual_associativity(&[combine], samples, 2000, 7).map_err(err)?;
    if !(audit.order_free() && mutual.passed()) {
        return Ok(false);
    }
    for (i, g) in graphs.iter().enumerate() {
        let rep = order_report(&Snapshot::from(g.clone()), alg, &orders(100)).map_err(err)?;
        ensure(!rep.order_dependent, || {
            format!("{name}: fold value depends on order on graph {i}")
        })?;
    }
    Ok(true)
}

pub fn check_order() -> Outcome {
    let graphs = test_graphs()?;
    let u: Vec<u64> = (0..12).chain([1 << 40]).collect();
    let i: Vec<i64> = (-6..12).collect();
    let mut passed = 0;
    for (name, ok) in [
        ("size", order_free("size", &size_algebra(), &u, &graphs)?),
        ("depth", order_free("depth", &depth_algebra(), &u, &graphs)?),
        ("digest", order_free("digest", &digest_algebra(), &u, &graphs)?),
        ("sti", order_free("sti", &sti_algebra(), &i, &graphs)?),
    ] {
        ensure(ok, || format!("{name} algebra unexpectedly failed its audit"))?;
        passed += 1;
    }

    let sub = subtraction_algebra();
    let audit = audit_algebra(&sub, &i, 2000, 7);
    let (a, b, c) = audit.witness.ok_or("subtraction audit found no witness")?;
    ensure((a - b) - c != a - (b - c), || {
        format!("bogus subtraction witness ({a}, {b}, {c})")
    })?;
    let dependent = graphs
        .iter()
        .any(|g| order_report(&Snapshot::from(g.clone()), &sub, &orders(20)).is_ok_and(|r| r.order_dependent));
    ensure(dependent, || "subtraction fold never depended on order".into())?;

    let max = BinOp::total("max", |x: &i64, y: &i64| *x.max(y));
    let min = BinOp::total("min", |x: &i64, y: &i64| *x.min(y));
    let rep = check_mutual_associativity(&[max, min], &(-3..=3).collect::<Vec<i64>>(), 1000, 7).map_err(err)?;
    ensure(!rep.passed(), || "{max, min} family passed the audit".into())?;
    let p = rep
        .pairs
        .iter()
        .find(|p| !p.witnesses.is_empty())
        .ok_or("no witness reported")?;
    let w = &p.witnesses[0];
    let apply = |op: &str, x: i64, y: i64| if op == "max" { x.max(y) } else { x.min(y) };
    let lhs = apply(&p.outer, apply(&p.inner, w.x, w.y), w.z);
    let rhs = apply(&p.inner, w.x, apply(&p.outer, w.y, w.z));
    ensure(lhs != rhs, || {
        format!("witness ({}, {}, {}) does not break the identity", w.x, w.y, w.z)
    })?;

    Ok(format!(
        "{passed} audited algebras order-free over 102 orders on {} graphs; subtraction witness ({a}, {b}, {c}); {{max,min}} witness {}∘{} at ({}, {}, {})",
        graphs.len(),
        p.outer,
        p.inner,
        w.x,
        w.y,
        w.z
    ))
}

/// Rebuilds `g` from any atom, one generation per step. With `inline`,
/// the first child of each layer is emitted in the same step.
fn regrow(g: &TypedMetagraph, inline: bool) -> Coalgebra<AtomId> {
    fn layer(g: &TypedMetagraph, id: AtomId, inline: bool) -> Option<Layer<AtomId>> {
        let a = g.atom(id)?;
        let mut spec = AtomSpec::node(a.type_label()).with_sti(a.sti());
        if let Some(n) = a.name() {
            spec = spec.named(n);
        }
        let mut children = Vec::new();
        for (i, t) in a.targets().iter().enumerate() {
            let Target::Atom(c) = t else { return None };
            let ty = g.atom(*c)?.type_label();
            children.push(if inline && i == 0 {
                Child::now(ty, layer(g, *c, false)?)
            } else {
                Child::seed(ty, *c)
            });
        }
        Some(Layer::with_children(spec, children))
    }
    let g = Arc::new(g.clone());
    Coalgebra::new(move |id: &AtomId| layer(&g, *id, inline))
}

const BUDGET: usize = 1 << 16;

fn schemes_agree<V: Clone + PartialEq + std::fmt::Debug>(g: &TypedMetagraph, alg: &Algebra<V>) -> Result<(), String> {
    let view = Snapshot::from(g.clone());
    let plain = fold(&view, alg, &TraversalOrder::Insertion).map_err(err)?;
    for keys in [MemoKeys::Off, MemoKeys::ByAtom, MemoKeys::Canonical] {
        let h = histo_fold(&view, alg, &TraversalOrder::Insertion, keys).map_err(err)?;
        ensure(h.value == plain, || format!("histo {:?} vs fold {plain:?}", h.value))?;
    }
    for root in g.atom_ids() {
        let sub = fold(
            &Snapshot::from(g.sub_metagraph(&[root]).map_err(err)?),
            alg,
            &TraversalOrder::Insertion,
        )
        .map_err(err)?;
        for share in [false, true] {
            for inline in [false, true] {
                let mut co = regrow(g, inline);
                if share {
                    co = co.sharing();
                }
                let fused = chrono(root, &co, alg, BUDGET).map_err(err)?;
                let unfused = chrono_unfused(root, &co, alg, BUDGET).map_err(err)?;
                ensure(!fused.truncated, || "chrono truncated".into())?;
                ensure(fused.value == unfused.value && fused.value == sub, || {
                    format!(
                        "root {root:?}: chrono {:?}, unfused {:?}, fold {sub:?}",
                        fused.value, unfused.value
                    )
                })?;
            }
        }
    }
    Ok(())
}

pub fn check_schemes() -> Outcome {
    let mut graphs = small_graphs(5);
    let exhaustive = graphs.len();
    graphs.extend((0..300).map(|s| random_graph(6 + (s as usize % 3), 5000 + s)));
    let abc = fixture_graph("abc.json")?;
    ensure(abc.len() <= 8, || "abc fixture grew past 8 atoms".into())?;
    graphs.push(abc);
    for (i, g) in graphs.iter().enumerate() {
        schemes_agree(g, &size_algebra()).map_err(|e| format!("graph {i} size: {e}"))?;
        schemes_agree(g, &digest_algebra()).map_err(|e| format!("graph {i} digest: {e}"))?;
    }
    for n in 0..=12u32 {
        let c = chrono(n, &fib_coalgebra(), &fib_algebra(), BUDGET).map_err(err)?;
        let u = chrono_unfused(n, &fib_coalgebra(), &fib_algebra(), BUDGET).map_err(err)?;
        ensure(c.value == fib(n) && u.value == fib(n), || {
            format!("fib({n}): chrono {} unfused {}", c.value, u.value)
        })?;
    }
    let ten = chrono(10, &fib_coalgebra(), &fib_algebra(), BUDGET).map_err(err)?;
    ensure(ten.value == 55 && ten.memo_hits > 0, || {
        format!("chrono(10) = {} with {} memo hits", ten.value, ten.memo_hits)
    })?;
    Ok(format!(
        "{} graphs ({exhaustive} enumerated up to 5 atoms, 300 random with 6-8 atoms, abc fixture), every root; chrono(10) = 55 with {} memo hits",
        graphs.len(),
        ten.memo_hits
    ))
}

fn fold_run(g: &TypedMetagraph, keys: MemoKeys) -> FoldRun<u64> {
    FoldRun::new(
        Snapshot::from(g.clone()),
        digest_algebra(),
        &TraversalOrder::Topological,
        keys,
    )
}

/// Drive `run` with random slice sizes.
fn sliced(run: &mut dyn MorphRun, live: Option<&TypedMetagraph>, seed: u64) -> Result<(), MorphError> {
    let mut r = rng::seeded(seed);
    while run.status() != RunStatus::Done {
        run.run_steps(r.gen_range(1..=6), live)?;
    }
    Ok(())
}

pub fn check_resume() -> Outcome {
    let graphs: Vec<TypedMetagraph> = (0..30).map(|s| random_graph(6 + s as usize % 20, 9000 + s)).collect();
    let mut comparisons = 0;
    for (i, g) in graphs.iter().enumerate() {
        let mut solo = fold_run(g, MemoKeys::ByAtom);
        solo.finish().map_err(err)?;
        for seed in 0..10 {
            let mut run = fold_run(g, MemoKeys::ByAtom);
            sliced(&mut run, if seed % 2 == 0 { Some(g) } else { None }, seed).map_err(err)?;
            ensure(run.result() == solo.result() && run.report() == solo.report(), || {
                format!("graph {i}: sliced fold differs (seed {seed})")
            })?;
            comparisons += 1;
        }
        let other = &graphs[(i + 1) % graphs.len()];
        let mut solo_o = fold_run(other, MemoKeys::Canonical);
        solo_o.finish().map_err(err)?;
        let mut solo_c = ChronoRun::new(8 + i as u32 % 5, fib_coalgebra(), fib_algebra(), BUDGET);
        solo_c.finish().map_err(err)?;
        let mut solo_u = UnfoldRun::new(g.atom_ids()[g.len() - 1], regrow(g, true), BUDGET, true);
        solo_u.finish().map_err(err)?;
        for slice in 1..=8 {
            for flip in [false, true] {
                let mut a = fold_run(g, MemoKeys::ByAtom);
                let mut b = fold_run(other, MemoKeys::Canonical);
                let mut c = ChronoRun::new(8 + i as u32 % 5, fib_coalgebra(), fib_algebra(), BUDGET);
                let mut u = UnfoldRun::new(g.atom_ids()[g.len() - 1], regrow(g, true), BUDGET, true);
                let mut runs: Vec<&mut dyn MorphRun> = vec![&mut a, &mut b, &mut c, &mut u];
                if flip {
                    runs.reverse();
                }
                interleave(&mut runs[..2], slice, None).map_err(err)?;
                interleave(&mut runs[2..], slice, None).map_err(err)?;
                let same = a.result() == solo.result()
                    && a.report() == solo.report()
                    && b.result() == solo_o.result()
                    && b.report() == solo_o.report()
                    && c.result() == solo_c.result()
                    && c.report() == solo_c.report()
                    && u.graph() == solo_u.graph()
                    && u.report() == solo_u.report();
                ensure(same, || {
                    format!("graph {i}: interleaving with slice {slice} differs from solo runs")
                })?;
                comparisons += 1;
            }
        }
    }

    let mut flagged = 0;
    let trials = 100;
    for t in 0..trials {
        let g = random_graph(4 + t as usize % 12, 20_000 + t);
        let mut solo = fold_run(&g, MemoKeys::ByAtom);
        solo.finish().map_err(err)?;
        let mut r = rng::seeded(t);
        let before = r.gen_range(0..solo.frames_done().max(1)) as usize;
        let mut run = fold_run(&g, MemoKeys::ByAtom);
        if before > 0 {
            run.run_steps(before, Some(&g)).map_err(err)?;
        }
        let mut live = g.clone();
        let target = AtomId(r.gen_range(0..g.len() as u32));
        match t % 3 {
            0 => live.add_atom(AtomSpec::node("Late")).map(|_| ()),
            1 => live.set_sti(target, 99.0),
            _ => live.set_tv(target, Some(TruthValue::new(0.5, 0.5).map_err(err)?)),
        }
        .map_err(err)?;
        let first = run.run_steps(1, Some(&live));
        let again = run.run_steps(1, Some(&live));
        if matches!(first, Err(MorphError::Stale { .. }))
            && matches!(again, Err(MorphError::Stale { .. }))
            && run.status() == RunStatus::Stale
            && run.frames_done() == before as u64
        {
            flagged += 1;
        }
    }
    ensure(flagged == trials, || {
        format!("staleness flagged in {flagged}/{trials} mutations")
    })?;
    Ok(format!(
        "{comparisons} sliced/interleaved runs match solo runs; staleness flagged {flagged}/{trials}"
    ))
}
