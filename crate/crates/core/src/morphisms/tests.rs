use super::*;
use crate::metagraph::{AtomSpec, JoinBinding};

fn weight_algebra() -> Algebra<f64> {
    Algebra::new(
        0.0,
        |a: &AtomView<'_>, kids: &[Option<f64>]| a.sti() + kids.iter().flatten().sum::<f64>(),
        |x: &f64, y: &f64| x + y,
    )
    .declare_associative()
}

fn three_nodes() -> TypedMetagraph {
    let mut g = TypedMetagraph::new();
    for w in [1.0, 2.0, 3.0] {
        g.add_atom(AtomSpec::node("N").with_sti(w)).unwrap();
    }
    g
}

#[test]
fn sum_of_weights() {
    let view = three_nodes().snapshot();
    let v = fold(&view, &weight_algebra(), &TraversalOrder::Insertion).unwrap();
    assert_eq!(v, 6.0);
}

#[test]
fn empty_fold_is_unit() {
    let view = TypedMetagraph::new().snapshot();
    assert_eq!(
        fold(&view, &weight_algebra(), &TraversalOrder::Topological).unwrap(),
        0.0
    );
}

#[test]
fn subtraction_depends_on_order() {
    let sub = Algebra::new(
        0.0,
        |a: &AtomView<'_>, _: &[Option<f64>]| a.sti(),
        |x: &f64, y: &f64| x - y,
    );
    let view = three_nodes().snapshot();
    let fwd = TraversalOrder::Explicit(vec![AtomId(0), AtomId(1), AtomId(2)]);
    let back = TraversalOrder::Explicit(vec![AtomId(2), AtomId(1), AtomId(0)]);
    let report = order_report(&view, &sub, &[fwd, back]).unwrap();
    assert_eq!(report.values, vec![-4.0, 0.0]);
    assert!(report.order_dependent);
    let audit = audit_algebra(&sub, &[1.0, 2.0, 3.0], 64, 7);
    assert!(!audit.associative && !audit.order_free());
}

fn shared_diamond() -> TypedMetagraph {
    let mut g = TypedMetagraph::new();
    let leaf = g.add_atom(AtomSpec::node("N").with_sti(1.0)).unwrap();
    let l = g.add_atom(AtomSpec::link("E", &[leaf])).unwrap();
    let r = g.add_atom(AtomSpec::link("E", &[leaf])).unwrap();
    g.add_atom(AtomSpec::link("E", &[l, r])).unwrap();
    g
}

#[test]
fn histo_matches_fold_and_reuses() {
    let view = shared_diamond().snapshot();
    let alg = weight_algebra();
    let plain = fold(&view, &alg, &TraversalOrder::Insertion).unwrap();
    for keys in [MemoKeys::ByAtom, MemoKeys::Canonical] {
        let h = histo_fold(&view, &alg, &TraversalOrder::Insertion, keys).unwrap();
        assert_eq!(h.value, plain);
        assert!(h.memo_hits >= 1);
    }
}

fn fib_coalgebra() -> Coalgebra<u32> {
    Coalgebra::new(|n: &u32| {
        let n = *n;
        Some(if n < 2 {
            Layer::leaf(AtomSpec::node("Fib").named(if n == 0 { "0" } else { "1" }))
        } else {
            Layer::with_children(
                AtomSpec::node("Fib"),
                vec![Child::seed("Fib", n - 1), Child::seed("Fib", n - 2)],
            )
        })
    })
    .sharing()
}

fn fib_algebra() -> Algebra<u64> {
    Algebra::new(
        0,
        |a: &AtomView<'_>, kids: &[Option<u64>]| match a.name() {
            Some("1") => 1,
            Some(_) => 0,
            None => kids.iter().flatten().sum(),
        },
        |x: &u64, y: &u64| x + y,
    )
}

#[test]
fn fibonacci_by_chrono() {
    let out = chrono(10, &fib_coalgebra(), &fib_algebra(), 1000).unwrap();
    assert_eq!(out.value, 55);
    assert!(out.memo_hits > 0);
    assert!(!out.truncated);
    let piped = chrono_unfused(10, &fib_coalgebra(), &fib_algebra(), 1000).unwrap();
    assert_eq!(piped.value, 55);
}

#[test]
fn unfold_shares_seeds_and_truncates() {
    let full = unfold(10u32, &fib_coalgebra(), 1000).unwrap();
    assert_eq!(full.graph.len(), 11);
    assert!(full.graph.dangling().is_empty());
    let cut = unfold(10u32, &fib_coalgebra(), 4).unwrap();
    assert!(cut.truncated);
    assert_eq!(cut.graph.len(), 4);
    let fused = chrono(10u32, &fib_coalgebra(), &fib_algebra(), 4).unwrap();
    let piped = chrono_unfused(10u32, &fib_coalgebra(), &fib_algebra(), 4).unwrap();
    assert_eq!(fused.value, piped.value);
}

#[test]
fn empty_coalgebra_emits_nothing() {
    let c: Coalgebra<u8> = Coalgebra::new(|_: &u8| None);
    let out = unfold(0, &c, 10).unwrap();
    assert!(out.graph.is_empty());
    assert!(out.root.is_none());
}

#[test]
fn unfold_rejects_multi_generation_layers() {
    let c = Coalgebra::new(|_: &u8| {
        Some(Layer::with_children(
            AtomSpec::node("T"),
            vec![Child::now("T", Layer::leaf(AtomSpec::node("T")))],
        ))
    });
    assert_eq!(unfold(0u8, &c, 10).unwrap_err(), MorphError::MultiGeneration);
    let futu = futu_unfold(0u8, &c, 10).unwrap();
    assert_eq!(futu.graph.len(), 2);
}

#[test]
fn type_mismatch_keeps_partial() {
    let c = Coalgebra::new(|n: &u8| {
        Some(if *n == 0 {
            Layer::with_children(AtomSpec::node("A"), vec![Child::seed("B", 1)])
        } else {
            Layer::leaf(AtomSpec::node("C"))
        })
    });
    match unfold(0u8, &c, 10) {
        Err(MorphError::Emission {
            partial, expansions, ..
        }) => {
            assert_eq!(partial.len(), 1);
            assert_eq!(expansions, 1);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn stepped_equals_single_shot() {
    let view = shared_diamond().snapshot();
    let alg = weight_algebra();
    let whole = fold(&view, &alg, &TraversalOrder::Insertion).unwrap();
    let mut run = FoldRun::new(view.clone(), alg, &TraversalOrder::Insertion, MemoKeys::Off);
    let mut calls = 0;
    while run.run_steps(1, Some(view.graph())).unwrap() != RunStatus::Done {
        calls += 1;
        assert_eq!(run.status(), RunStatus::Paused);
    }
    assert!(calls > 3);
    assert_eq!(run.result(), Some(&whole));
    assert_eq!(run.report().kind, RunKind::Fold);
    assert_eq!(run.run_steps(1, None).unwrap_err(), MorphError::Finished);
}

#[test]
fn mutation_marks_run_stale() {
    let mut live = shared_diamond();
    let view = live.snapshot();
    let mut run = FoldRun::new(
        view.clone(),
        weight_algebra(),
        &TraversalOrder::Insertion,
        MemoKeys::Off,
    );
    run.run_steps(2, Some(&live)).unwrap();
    live.add_atom(AtomSpec::node("N")).unwrap();
    assert!(matches!(run.run_steps(2, Some(&live)), Err(MorphError::Stale { .. })));
    assert_eq!(run.status(), RunStatus::Stale);
    assert!(fold_checked(&view, &live, &weight_algebra(), &TraversalOrder::Insertion).is_err());
}

#[test]
fn interleaved_runs_match() {
    let a = shared_diamond().snapshot();
    let b = three_nodes().snapshot();
    let alg = weight_algebra();
    let mut ra = FoldRun::new(a.clone(), alg.clone(), &TraversalOrder::Insertion, MemoKeys::ByAtom);
    let mut rb = FoldRun::new(b.clone(), alg.clone(), &TraversalOrder::Insertion, MemoKeys::Off);
    let mut rc = ChronoRun::new(8u32, fib_coalgebra(), fib_algebra(), 100);
    interleave(&mut [&mut ra, &mut rb, &mut rc], 2, None).unwrap();
    assert_eq!(ra.result(), Some(&fold(&a, &alg, &TraversalOrder::Insertion).unwrap()));
    assert_eq!(rb.result(), Some(&6.0));
    assert_eq!(rc.result(), Some(&21));
}

#[test]
fn cycles_are_reported() {
    let mut g = TypedMetagraph::new();
    let s = g.declare_dangling("E");
    let e = g.add_atom(AtomSpec::edge("E", vec![Target::Slot(s)])).unwrap();
    g.bind_slot(s, e).unwrap();
    let _ = JoinBinding::new();
    assert_eq!(
        fold(&g.snapshot(), &weight_algebra(), &TraversalOrder::Insertion).unwrap_err(),
        MorphError::Cyclic
    );
}
