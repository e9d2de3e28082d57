use super::*;
use alloc::vec;

fn abc() -> Arc<Carrier> {
    Carrier::new("X", ["a", "b", "c"].map(Value::from))
}

#[test]
fn hand_composition() {
    let names = Carrier::new("N", ["a", "b"].map(Value::from));
    let nums = Carrier::ints("I", 1..3);
    let xs = Carrier::new("Y", [Value::from("x")]);
    let s = FinRel::new(&names, &nums, vec![("a".into(), 1.into()), ("b".into(), 2.into())]).unwrap();
    let r = FinRel::new(&nums, &xs, vec![(1.into(), "x".into())]).unwrap();
    let sr = then(&s, &r).unwrap();
    assert_eq!(
        sr.pairs().iter().cloned().collect::<Vec<_>>(),
        vec![("a".into(), "x".into())]
    );
    assert_eq!(compose(&r, &s).unwrap(), sr);
    assert!(matches!(compose(&s, &r), Err(RelError::CarrierMismatch { .. })));
}

#[test]
fn residual_basics() {
    let x = abc();
    let r = FinRel::new(&x, &x, vec![("a".into(), "b".into()), ("c".into(), "c".into())]).unwrap();
    assert_eq!(residual(&r, &FinRel::empty(&x, &x)).unwrap(), FinRel::full(&x, &x));
    assert_eq!(residual(&r, &FinRel::identity(&x)).unwrap(), r);
}

#[test]
fn shrink_keeps_best() {
    let one = Carrier::new("O", [Value::from("a")]);
    let nums = Carrier::ints("I", 1..3);
    let s = FinRel::new(&one, &nums, vec![("a".into(), 1.into()), ("a".into(), 2.into())]).unwrap();
    // (x, y) with y ≥ x: "y is at least as good as x".
    let ge = FinRel::new(
        &nums,
        &nums,
        vec![(1.into(), 1.into()), (1.into(), 2.into()), (2.into(), 2.into())],
    )
    .unwrap();
    let kept = shrink(&s, &ge).unwrap();
    assert_eq!(
        kept.pairs().iter().cloned().collect::<Vec<_>>(),
        vec![("a".into(), 2.into())]
    );
    assert_eq!(shrink(&s, &FinRel::full(&nums, &nums)).unwrap(), s);
    let none = FinRel::empty(&one, &nums);
    assert_eq!(shrink(&none, &ge).unwrap(), none);
}

#[test]
fn list_sum_fold() {
    let fx = list_sum_fixture();
    let fold = rel_fold(&fx.s, &fx.functor, fx.depth, DEFAULT_CAP).unwrap();
    let one_two = fx.functor.structure(
        1,
        vec![
            1.into(),
            fx.functor.structure(1, vec![2.into(), fx.functor.structure(0, vec![])]),
        ],
    );
    assert_eq!(fold.image(&one_two).cloned().collect::<Vec<_>>(), vec![Value::Int(3)]);
    assert!(fold.is_simple());
    assert_eq!(fold.len(), fold.source().len());
}

#[test]
fn fold_of_base_only_algebra() {
    let fx = list_sum_fixture();
    let nil = fx.functor.structure(0, vec![]);
    let base: Vec<(Value, Value)> = fx.s.pairs().iter().filter(|(u, _)| *u == nil).cloned().collect();
    let s = FinRel::new(fx.s.source(), fx.s.target(), base).unwrap();
    let fold = rel_fold(&s, &fx.functor, 3, DEFAULT_CAP).unwrap();
    assert_eq!(
        fold.pairs().iter().cloned().collect::<Vec<_>>(),
        vec![(nil, Value::Int(0))]
    );
}

#[test]
fn coin_change_lfp_matches_direct() {
    let c = coin_change_fixture();
    let rep = verify_dp_theorem(&c.s, &c.t, &c.r, &c.functor, c.depth, DEFAULT_CAP, Reading::Converse).unwrap();
    assert!(rep.preconditions() && rep.depth_stable && rep.lfp.converged);
    assert_eq!(rep.lfp.relation, rep.m);
    let want: Vec<(Value, Value)> = vec![(0.into(), 0.into()), (1.into(), 1.into()), (2.into(), 1.into())];
    assert_eq!(rep.m.pairs().iter().cloned().collect::<Vec<_>>(), want);
    let cap0 = lfp_dp(&c.s, &c.t, &c.r, &c.functor, 0).unwrap();
    assert!(!cap0.converged && cap0.relation.is_empty());
}

#[test]
fn coin_change_satisfies_both_readings() {
    let c = coin_change_fixture();
    let rep = verify_dp_theorem(&c.s, &c.t, &c.r, &c.functor, c.depth, DEFAULT_CAP, Reading::Literal).unwrap();
    assert!(rep.monotone_literal && rep.monotone_converse && !rep.violated());
}

#[test]
fn missing_subproblem_is_inconclusive() {
    let c = coin_change_fixture();
    // Drop the algebra's base case so nothing folds.
    let pairs: Vec<(Value, Value)> =
        c.s.pairs()
            .iter()
            .filter(|(u, _)| *u != c.functor.structure(0, vec![]))
            .cloned()
            .collect();
    let s = FinRel::new(c.s.source(), c.s.target(), pairs).unwrap();
    let rep = verify_dp_theorem(&s, &c.t, &c.r, &c.functor, c.depth, DEFAULT_CAP, Reading::Converse).unwrap();
    assert!(!rep.domain);
    assert!(rep.inconclusive() && !rep.violated());
}

#[test]
fn identity_order_makes_greedy_trivial() {
    let fx = list_sum_fixture();
    let id = FinRel::identity(fx.s.target());
    let rep = verify_greedy_theorem(&fx.s, &id, &fx.functor, 3).unwrap();
    assert!(rep.transitive && rep.inclusion);
}

#[test]
fn small_suites() {
    let g = greedy_suite(0..20).unwrap();
    assert_eq!((g.instances, g.violations), (20, 0));
    let d = dp_suite(0..20, Reading::Converse).unwrap();
    assert_eq!(d.violations, 0);
    assert!(counterexample_search(0..200).unwrap().is_some());
}

#[test]
fn expression_evaluation() {
    let x = abc();
    let r = FinRel::new(&x, &x, vec![("a".into(), "b".into()), ("b".into(), "c".into())]).unwrap();
    let env = Env::new().with_carrier(&x).with_relation("R", r.clone());
    let back = rel_eval(&Expr::rel("R").converse().converse(), &env).unwrap();
    assert_eq!(back, Outcome::Rel(r.clone()));
    let with_id = rel_eval(&Expr::rel("R").compose(Expr::id("X")).equal(Expr::rel("R")), &env).unwrap();
    assert_eq!(with_id, Outcome::Bool(true));
    let nums = Carrier::ints("I", 0..2);
    let env = env.with_relation("N", FinRel::identity(&nums));
    assert!(matches!(
        rel_eval(&Expr::rel("R").compose(Expr::rel("N")), &env),
        Err(RelError::CarrierMismatch { .. })
    ));
    assert!(matches!(
        rel_eval(&Expr::rel("R").lift(), &env),
        Err(RelError::NoFunctor)
    ));
}
