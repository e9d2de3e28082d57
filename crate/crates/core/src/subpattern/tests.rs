use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::*;
use crate::cogkit::{agglomerate, clause, conjoin, disjoin, ClusterExecutor, Distances, Pattern};

fn ints(xs: &[i64]) -> Vec<i64> {
    xs.to_vec()
}

fn max_min() -> Vec<BinOp<i64>> {
    alloc::vec![
        BinOp::total("max", |a: &i64, b: &i64| *a.max(b)),
        BinOp::total("min", |a: &i64, b: &i64| *a.min(b)),
    ]
}

#[test]
fn plus_is_mutually_associative() {
    let ops = [BinOp::total("+", |a: &i64, b: &i64| a + b)];
    let rep = check_mutual_associativity(&ops, &ints(&[-2, 0, 1, 7]), 1, 0).unwrap();
    assert!(rep.exhaustive);
    assert!(rep.passed());
    assert_eq!(rep.pairs[0].checked, 64);
}

#[test]
fn max_min_fails_with_the_expected_witness() {
    let rep = check_mutual_associativity(&max_min(), &ints(&[0, 3, 5]), 1, 0).unwrap();
    assert!(!rep.passed());
    assert!(rep.pair("max", "max").unwrap().passed());
    assert!(rep.pair("min", "min").unwrap().passed());
    let mixed = rep.pair("max", "min").unwrap();
    let w = mixed
        .witnesses
        .iter()
        .find(|w| (w.x, w.y, w.z) == (0, 5, 3))
        .expect("witness (0, 5, 3)");
    assert_eq!((w.lhs, w.rhs), (3, 0));
}

#[test]
fn union_family_passes_with_partial_domain_notes() {
    let dom = nonempty_subsets(3);
    assert_eq!(dom.len(), 7);
    let rep = check_mutual_associativity(&[block_union()], &dom, 1, 0).unwrap();
    assert!(rep.exhaustive);
    assert!(rep.passed());
    assert!(rep.pairs[0].undefined > 0);
    assert!(rep.pairs[0].checked > 0);
}

#[test]
fn sampled_audit_agrees_with_exhaustive() {
    let dom = ints(&[0, 1, 2, 3, 4, 5, 6, 7]);
    let families: Vec<Vec<BinOp<i64>>> = alloc::vec![
        max_min(),
        alloc::vec![BinOp::total("+", |a: &i64, b: &i64| a + b)],
        alloc::vec![BinOp::total("-", |a: &i64, b: &i64| a - b)],
    ];
    for ops in families {
        let ex = check_mutual_associativity(&ops, &dom, 1, 0).unwrap();
        let sa = check_mutual_associativity_sampled(&ops, &dom, 4000, 9).unwrap();
        assert!(!sa.exhaustive);
        for (a, b) in ex.pairs.iter().zip(&sa.pairs) {
            assert_eq!(a.passed(), b.passed(), "{} / {}", a.outer, a.inner);
        }
    }
}

#[test]
fn audit_rejects_bad_arguments() {
    assert_eq!(
        check_mutual_associativity(&max_min(), &ints(&[1]), 0, 0),
        Err(SubError::Trials)
    );
    assert_eq!(
        check_mutual_associativity(&max_min(), &[], 1, 0),
        Err(SubError::EmptyDomain)
    );
}

#[test]
fn pattern_conjunction_and_disjunction_pass() {
    let p = |t: &str, a: &str, b: &str| Pattern::single(clause(&[(t, &[a, b])]).unwrap());
    let top = Pattern::single(crate::metagraph::TypedMetagraph::new());
    let dom = alloc::vec![
        p("likes", "$X", "$Y"),
        p("knows", "$Y", "$Z"),
        p("owns", "$Z", "ann"),
        top
    ];
    let same = |a: &Pattern, b: &Pattern| a.key().unwrap() == b.key().unwrap();
    let and = BinOp::new("and", |a: &Pattern, b: &Pattern| conjoin(a, b).ok());
    let or = BinOp::new("or", |a: &Pattern, b: &Pattern| disjoin(a, b).ok());
    let rep = check_mutual_associativity_by(&[and, or], &dom, 1, 0, same).unwrap();
    assert!(rep.passed());
    for pair in &rep.pairs {
        assert!(pair.checked > 0, "{} / {}", pair.outer, pair.inner);
    }
    // mixed pairs are only defined when the edge counts line up, which
    // forces the empty pattern into the triple
    let mixed = rep.pair("and", "or").unwrap();
    assert!(mixed.undefined > mixed.checked);
}

fn strs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| String::from(*s)).collect()
}

#[test]
fn doubling_edge_exists() {
    let items = strs(&["ab", "abab", ""]);
    let sm = SimplicityMeasure::length(1.0);
    let dag = build_subpattern_dag(&items, &[double()], &sm);
    assert_eq!(dag.edges.len(), 1);
    let e = &dag.edges[0];
    assert_eq!(dag.items[e.parent], "abab");
    assert_eq!(dag.items[e.child], "ab");
    assert_eq!(dag.items[e.other], "");
    assert_eq!(e.op, "double");
    dag.verify(&[double()], &sm).unwrap();
    assert!(dag.is_acyclic());
}

#[test]
fn concatenation_dag_is_empty() {
    let items = strs(&["", "a", "b", "ab", "ba", "aab", "abab", "bab"]);
    let dag = build_subpattern_dag(&items, &[concat()], &SimplicityMeasure::length(1.0));
    assert!(dag.edges.is_empty());
    let none = build_subpattern_dag(&[], &[concat()], &SimplicityMeasure::length(1.0));
    assert!(none.items.is_empty() && none.edges.is_empty());
}

#[test]
fn verify_catches_a_tampered_edge() {
    let items = strs(&["ab", "abab", ""]);
    let sm = SimplicityMeasure::length(1.0);
    let mut dag = build_subpattern_dag(&items, &[double()], &sm);
    let strict = SimplicityMeasure::length(1.0 + 1.0);
    assert!(matches!(
        dag.verify(&[double()], &strict),
        Err(SubError::BadEdge { .. })
    ));
    dag.edges[0].child = 1;
    assert!(dag.verify(&[double()], &sm).is_err());
}

fn union_dag() -> SubpatternDag<BTreeSet<usize>> {
    build_subpattern_dag(
        &nonempty_subsets(5),
        &[block_union()],
        &SimplicityMeasure::pair_count(1.0),
    )
}

#[test]
fn alignment_trivial_cases() {
    let dag = union_dag();
    let empty: Vec<(u8, u8)> = Vec::new();
    assert_eq!(alignment_score(&empty, &dag, &BTreeMap::new()).unwrap().score, 1.0);
    // a trace that copies the dag's own edges
    let trace: Vec<(usize, usize)> = dag.edges.iter().map(|e| (e.parent, e.child)).collect();
    let mapping: BTreeMap<usize, BTreeSet<usize>> = dag.items.iter().cloned().enumerate().collect();
    assert_eq!(alignment_score(&trace, &dag, &mapping).unwrap().score, 1.0);
    let partial: BTreeMap<usize, BTreeSet<usize>> = mapping.into_iter().take(3).collect();
    assert!(matches!(
        alignment_score(&trace, &dag, &partial),
        Err(SubError::Unmapped(_))
    ));
}

#[test]
fn clustering_alignment_matches_hand_count() {
    let pts: Vec<Vec<f64>> = [0.0, 1.0, 5.0, 6.0, 20.0].iter().map(|x| alloc::vec![*x]).collect();
    let run = agglomerate(&Distances::from_points(&pts).unwrap(), 1, ClusterExecutor::Greedy).unwrap();
    let set = |xs: &[usize]| xs.iter().copied().collect::<BTreeSet<usize>>();
    let trace: Vec<(BTreeSet<usize>, BTreeSet<usize>)> =
        run.trace_edges().into_iter().map(|(p, c)| (set(&p), set(&c))).collect();
    // merges: {0,1}, {2,3}, {0,1,2,3}, {0,1,2,3,4}
    let expected = alloc::vec![
        (set(&[0, 1]), set(&[0]), false),
        (set(&[0, 1]), set(&[1]), false),
        (set(&[2, 3]), set(&[2]), false),
        (set(&[2, 3]), set(&[3]), false),
        (set(&[0, 1, 2, 3]), set(&[0, 1]), true),
        (set(&[0, 1, 2, 3]), set(&[2, 3]), true),
        (set(&[0, 1, 2, 3, 4]), set(&[0, 1, 2, 3]), true),
        (set(&[0, 1, 2, 3, 4]), set(&[4]), true),
    ];
    assert_eq!(
        trace,
        expected
            .iter()
            .map(|(p, c, _)| (p.clone(), c.clone()))
            .collect::<Vec<_>>()
    );
    let mapping: BTreeMap<_, _> = trace
        .iter()
        .flat_map(|(p, c)| [(p.clone(), p.clone()), (c.clone(), c.clone())])
        .collect();
    let a = alignment_score(&trace, &union_dag(), &mapping).unwrap();
    assert_eq!(a.verdicts, expected.iter().map(|e| e.2).collect::<Vec<_>>());
    assert_eq!(a.score, 0.5);
}

#[test]
fn subproblem_trace_follows_optimal_actions() {
    use crate::dds::{exact_dp, TableDds};
    let p = TableDds::gd1();
    let vf = exact_dp(&p).unwrap();
    let trace = subproblem_trace(&p, &vf);
    assert!(!trace.is_empty());
    assert!(trace.iter().all(|((t, _), (u, _))| *u == t + 1));
}
