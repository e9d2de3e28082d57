//! Random instances for the inclusion theorems, plus two hand fixtures.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{
    compose, converse, functor::FunctorSpec, theorems::Reading, verify_dp_theorem, verify_greedy_theorem, Carrier,
    FinRel, RelError, Value, DEFAULT_CAP,
};
use crate::rng::{self, SeededRng};

#[derive(Debug, Clone)]
pub struct GreedyInstance {
    pub functor: FunctorSpec,
    pub s: FinRel,
    pub r: FinRel,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct DpInstance {
    pub functor: FunctorSpec,
    pub s: FinRel,
    pub t: FinRel,
    pub r: FinRel,
    pub depth: usize,
}

/// Outcome of running one theorem over many seeds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteReport {
    pub instances: usize,
    pub preconditions_held: usize,
    pub violations: usize,
    pub inconclusive: usize,
    pub first_violation: Option<u64>,
}

fn ints(name: &str, n: usize) -> Arc<Carrier> {
    Carrier::ints(name, 0..n as i64)
}

/// Random total preorder: `(x, y) ∈ r` iff `score(y) ≥ score(x)`.
fn random_preorder(b: &Arc<Carrier>, r: &mut SeededRng) -> FinRel {
    let levels = b.len().max(1);
    let scores: Vec<(Value, usize)> = b.elems().map(|v| (v.clone(), r.gen_range(0..levels))).collect();
    let mut pairs = BTreeSet::new();
    for (x, sx) in &scores {
        for (y, sy) in &scores {
            if sy >= sx {
                pairs.insert((x.clone(), y.clone()));
            }
        }
    }
    FinRel::raw(b, b, pairs)
}

/// Every element of `src` gets one or two random targets.
fn random_total(src: &Arc<Carrier>, tgt: &Arc<Carrier>, r: &mut SeededRng) -> FinRel {
    let outs: Vec<Value> = tgt.elems().cloned().collect();
    let mut pairs = BTreeSet::new();
    for u in src.elems() {
        for _ in 0..r.gen_range(1..=2) {
            pairs.insert((u.clone(), outs[r.gen_range(0..outs.len())].clone()));
        }
    }
    FinRel::raw(src, tgt, pairs)
}

/// Add pairs to `s` until `s·F(q) ⊆ q·s`. Each missing pair `(u, b)` is
/// added to `s` directly, which covers it as long as `q` is reflexive.
fn repair(s: &mut FinRel, q: &FinRel, f: &FunctorSpec) -> Result<(), RelError> {
    let lifted = f.lift(q);
    loop {
        let lhs = compose(s, &lifted)?;
        let rhs = compose(q, s)?;
        let missing: Vec<(Value, Value)> = lhs.pairs().difference(rhs.pairs()).cloned().collect();
        if missing.is_empty() {
            return Ok(());
        }
        for (u, b) in missing {
            s.insert(u, b)?;
        }
    }
}

fn random_functor(consts: &Arc<Carrier>, r: &mut SeededRng) -> FunctorSpec {
    if r.gen_bool(0.7) {
        FunctorSpec::list(consts)
    } else {
        FunctorSpec::tree(consts)
    }
}

/// Carriers of at most four elements, depth at most three. With `repair`,
/// `s` is closed so that `s·F(r°) ⊆ r°·s`.
pub fn random_greedy_instance(seed: u64, repair_s: bool) -> Result<GreedyInstance, RelError> {
    let mut r = rng::seeded(seed);
    let consts = ints("A", r.gen_range(1..=2));
    let b = ints("B", r.gen_range(2..=4));
    let functor = random_functor(&consts, &mut r);
    let depth = r.gen_range(1..=3);
    let rel = random_preorder(&b, &mut r);
    let mut s = random_total(&functor.apply(&b), &b, &mut r);
    if repair_s {
        repair(&mut s, &converse(&rel), &functor)?;
    }
    Ok(GreedyInstance {
        functor,
        s,
        r: rel,
        depth,
    })
}

/// `t` is rank-well-founded: every element of `A` has rank 0..=2 and `t`
/// only builds an element from structures whose recursive fields have lower
/// rank, so every element is reached by a tree of depth at most three. With
/// `repair`, `s` is closed under the monotonicity condition of `reading`.
pub fn random_dp_instance(seed: u64, repair_s: bool, reading: Reading) -> Result<DpInstance, RelError> {
    let mut r = rng::seeded(seed);
    let consts = ints("C", r.gen_range(1..=2));
    let na = r.gen_range(2..=4usize);
    let a = ints("A", na);
    let b = ints("B", r.gen_range(2..=4));
    // The depth check looks one level deeper, which is too large for trees.
    let functor = FunctorSpec::list(&consts);
    let ranks: Vec<usize> = (0..na).map(|i| if i == 0 { 0 } else { r.gen_range(0..=2) }).collect();
    let rank_of = |v: &Value| match v {
        Value::Int(i) => ranks[*i as usize],
        _ => usize::MAX,
    };
    let fa = functor.apply(&a);
    let mut tp = BTreeSet::new();
    for (i, rank) in ranks.iter().enumerate() {
        let mut options: Vec<&Value> = fa
            .elems()
            .filter(|u| {
                let Value::Tagged(k, fields) = u else { return false };
                functor.summands()[usize::from(*k)]
                    .fields
                    .iter()
                    .zip(fields)
                    .all(|(fd, v)| *fd != super::Field::Rec || rank_of(v) < *rank)
            })
            .collect();
        options.shuffle(&mut r);
        let take = r.gen_range(1..=2).min(options.len());
        for u in options.into_iter().take(take) {
            tp.insert((u.clone(), Value::Int(i as i64)));
        }
    }
    let t = FinRel::raw(&fa, &a, tp);
    let rel = random_preorder(&b, &mut r);
    let mut s = random_total(&functor.apply(&b), &b, &mut r);
    if repair_s {
        match reading {
            Reading::Converse => repair(&mut s, &converse(&rel), &functor)?,
            Reading::Literal => repair(&mut s, &rel, &functor)?,
        }
    }
    Ok(DpInstance {
        functor,
        s,
        t,
        r: rel,
        depth: 3,
    })
}

/// Greedy inclusion over `seeds` with repaired (monotone) instances.
pub fn greedy_suite(seeds: Range<u64>) -> Result<SuiteReport, RelError> {
    let mut rep = SuiteReport::default();
    for seed in seeds {
        let inst = random_greedy_instance(seed, true)?;
        let out = verify_greedy_theorem(&inst.s, &inst.r, &inst.functor, inst.depth)?;
        rep.instances += 1;
        if out.preconditions() {
            rep.preconditions_held += 1;
        } else {
            rep.inconclusive += 1;
        }
        if out.violated() {
            rep.violations += 1;
            rep.first_violation.get_or_insert(seed);
        }
    }
    Ok(rep)
}

/// Dynamic-programming inclusion over `seeds` with instances repaired for,
/// and gated by, the monotonicity condition of `reading`.
pub fn dp_suite(seeds: Range<u64>, reading: Reading) -> Result<SuiteReport, RelError> {
    let mut rep = SuiteReport::default();
    for seed in seeds {
        let inst = random_dp_instance(seed, true, reading)?;
        let out = verify_dp_theorem(
            &inst.s,
            &inst.t,
            &inst.r,
            &inst.functor,
            inst.depth,
            DEFAULT_CAP,
            reading,
        )?;
        rep.instances += 1;
        if out.preconditions() {
            rep.preconditions_held += 1;
        }
        if out.inconclusive() {
            rep.inconclusive += 1;
        }
        if out.violated() {
            rep.violations += 1;
            rep.first_violation.get_or_insert(seed);
        }
    }
    Ok(rep)
}

/// Search unrepaired greedy instances for a strict failure of the
/// inclusion. Returns the first seed and its report.
pub fn counterexample_search(seeds: Range<u64>) -> Result<Option<(u64, super::GreedyReport)>, RelError> {
    for seed in seeds {
        let inst = random_greedy_instance(seed, false)?;
        let out = verify_greedy_theorem(&inst.s, &inst.r, &inst.functor, inst.depth)?;
        if !out.inclusion {
            return Ok(Some((seed, out)));
        }
    }
    Ok(None)
}

/// Lists over `{1, 2}` summed into `{0..4}`.
#[derive(Debug, Clone)]
pub struct ListSum {
    pub functor: FunctorSpec,
    pub s: FinRel,
    pub depth: usize,
}

pub fn list_sum_fixture() -> ListSum {
    let a = Carrier::ints("A", 1..3);
    let b = Carrier::ints("B", 0..5);
    let functor = FunctorSpec::list(&a);
    let fb = functor.apply(&b);
    let mut pairs = BTreeSet::new();
    pairs.insert((functor.structure(0, Vec::new()), Value::Int(0)));
    for x in 1..3 {
        for y in 0..5 {
            if x + y < 5 {
                pairs.insert((
                    functor.structure(1, alloc::vec![Value::Int(x), Value::Int(y)]),
                    Value::Int(x + y),
                ));
            }
        }
    }
    ListSum {
        functor,
        s: FinRel::raw(&fb, &b, pairs),
        depth: 3,
    }
}

/// Fewest coins from `{1, 2}` for amounts `0..=2`.
#[derive(Debug, Clone)]
pub struct CoinChange {
    pub functor: FunctorSpec,
    pub s: FinRel,
    pub t: FinRel,
    pub r: FinRel,
    pub depth: usize,
}

pub fn coin_change_fixture() -> CoinChange {
    let coins = Carrier::ints("Coin", 1..3);
    let amounts = Carrier::ints("Amount", 0..3);
    let counts = Carrier::ints("Count", 0..4);
    let functor = FunctorSpec::list(&coins);
    let nil = functor.structure(0, Vec::new());
    let cons = |c: i64, x: i64| functor.structure(1, alloc::vec![Value::Int(c), Value::Int(x)]);
    let mut tp = BTreeSet::new();
    tp.insert((nil.clone(), Value::Int(0)));
    for c in 1..3 {
        for a in 0..3 {
            if a + c <= 2 {
                tp.insert((cons(c, a), Value::Int(a + c)));
            }
        }
    }
    let mut sp = BTreeSet::new();
    sp.insert((nil, Value::Int(0)));
    for c in 1..3 {
        for k in 0..4 {
            sp.insert((cons(c, k), Value::Int((k + 1).min(3))));
        }
    }
    let mut rp = BTreeSet::new();
    for x in 0..4 {
        for y in 0..=x {
            rp.insert((Value::Int(x), Value::Int(y)));
        }
    }
    CoinChange {
        s: FinRel::raw(&functor.apply(&counts), &counts, sp),
        t: FinRel::raw(&functor.apply(&amounts), &amounts, tp),
        r: FinRel::raw(&counts, &counts, rp),
        functor,
        depth: 3,
    }
}
