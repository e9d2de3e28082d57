use std::collections::BTreeMap;

use cogpat::formats::{self, EvolveFile, MetagraphFile, PointsFile};
use cogpat_core::cogkit::{
    agglomerate, backward_chain_tv, clause, conjoin, disjoin, ecan_run, evolve, forward_chain, links_from_edges,
    mine_patterns, onemax, random_population, ChainExecutor, ClusterExecutor, Distances, MineConfig, Pattern, Rule,
    Statement,
};
use cogpat_core::metagraph::{AtomId, Snapshot, Target, TypedMetagraph};
use cogpat_core::rng::{self, derive_seed};
use rand::Rng;

use crate::gen::random_kb;
use crate::{ensure, fixture, Outcome};

const TOL: f64 = 1e-9;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Every partition of `0..n` into `k` blocks, by restricted growth strings.
fn partitions(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, k: usize, label: &mut Vec<usize>, used: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            if used == k {
                let mut blocks = vec![Vec::new(); k];
                for (x, b) in label.iter().enumerate() {
                    blocks[*b].push(x);
                }
                out.push(blocks);
            }
            return;
        }
        for b in 0..=used.min(k - 1) {
            label.push(b);
            go(i + 1, n, k, label, used.max(b + 1), out);
            label.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), 0, &mut out);
    out
}

fn pooled_quality(blocks: &[Vec<usize>], pts: &[Vec<f64>]) -> f64 {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let (mut sum, mut pairs) = (0.0, 0usize);
    for b in blocks {
        for (i, x) in b.iter().enumerate() {
            for y in &b[i + 1..] {
                sum += dist(&pts[*x], &pts[*y]);
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        -sum / pairs as f64
    }
}

fn clustering() -> Result<String, String> {
    let mut instances = 0;
    let mut strict = 0;
    for n in 1..=7usize {
        for k in 1..=n {
            for seed in 0..6u64 {
                let mut r = rng::seeded(seed * 100 + n as u64 * 10 + k as u64);
                let dim = r.gen_range(1..=2);
                let pts: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..dim).map(|_| r.gen_range(0..20) as f64).collect())
                    .collect();
                let d = Distances::from_points(&pts).map_err(err)?;
                let g = agglomerate(&d, k, ClusterExecutor::Greedy).map_err(err)?;
                let e = agglomerate(&d, k, ClusterExecutor::ExactDp).map_err(err)?;
                let (gq, eq) = (g.clustering.quality, e.clustering.quality);
                ensure(eq >= gq - TOL, || format!("n={n} k={k}: exact {eq} below greedy {gq}"))?;
                let best = partitions(n, k)
                    .iter()
                    .map(|p| pooled_quality(p, &pts))
                    .fold(f64::NEG_INFINITY, f64::max);
                ensure((eq - best).abs() <= TOL, || {
                    format!("n={n} k={k}: exact {eq}, brute force {best}")
                })?;
                if eq > gq + TOL {
                    strict += 1;
                }
                instances += 1;
            }
        }
    }
    let (file, d) = formats::load::<PointsFile>(&fixture("two-pairs.json")).map_err(err)?;
    for ex in [ClusterExecutor::Greedy, ClusterExecutor::ExactDp] {
        let out = agglomerate(&d, file.k, ex).map_err(err)?;
        ensure(out.clustering.blocks == vec![vec![0, 1], vec![2, 3]], || {
            format!("{ex:?} on two-pairs gave {:?}", out.clustering.blocks)
        })?;
    }
    Ok(format!(
        "clustering: {instances} instances n<=7 exact = brute force >= greedy ({strict} strict), two-pairs recovered"
    ))
}

#[derive(Debug)]
enum Term {
    Var(String),
    Const(String, String),
}

fn read_clause(c: &TypedMetagraph) -> Vec<(String, Vec<Term>)> {
    c.atoms()
        .filter(|a| !a.is_node())
        .map(|a| {
            let terms = a
                .targets()
                .iter()
                .map(|t| {
                    let Target::Atom(id) = t else { panic!("pattern slot") };
                    let n = c.atom(*id).expect("pattern node");
                    let name = n.name().unwrap_or_default().to_string();
                    if n.type_label() == "Variable" {
                        Term::Var(name)
                    } else {
                        Term::Const(n.type_label().to_string(), name)
                    }
                })
                .collect();
            (a.type_label().to_string(), terms)
        })
        .collect()
}

fn clause_matches(kb: &TypedMetagraph, cl: &[(String, Vec<Term>)], tuple: &[AtomId]) -> bool {
    let mut bound: BTreeMap<&str, AtomId> = BTreeMap::new();
    for ((ty, terms), e) in cl.iter().zip(tuple) {
        let a = kb.atom(*e).expect("kb edge");
        if a.type_label() != ty || a.targets().len() != terms.len() {
            return false;
        }
        for (term, t) in terms.iter().zip(a.targets()) {
            let Target::Atom(id) = t else { return false };
            match term {
                Term::Var(v) => {
                    if *bound.entry(v.as_str()).or_insert(*id) != *id {
                        return false;
                    }
                }
                Term::Const(ty, name) => {
                    let n = kb.atom(*id).expect("kb atom");
                    if !n.is_node() || n.type_label() != ty || n.name() != Some(name.as_str()) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Share of ordered edge tuples matched by some clause.
fn brute_frequency(kb: &TypedMetagraph, p: &Pattern) -> f64 {
    let edges: Vec<AtomId> = kb.atoms().filter(|a| !a.is_node()).map(|a| a.id()).collect();
    let clauses: Vec<_> = p.clauses.iter().map(read_clause).collect();
    let m = clauses[0].len();
    let total = edges.len().pow(m as u32);
    if total == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut tuple = vec![edges[0]; m];
    for code in 0..total {
        let mut c = code;
        for slot in tuple.iter_mut() {
            *slot = edges[c % edges.len()];
            c /= edges.len();
        }
        if clauses.iter().any(|cl| clause_matches(kb, cl, &tuple)) {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

fn single(edges: &[(&str, &[&str])]) -> Result<Pattern, String> {
    clause(edges).map(Pattern::single).map_err(err)
}

fn mining() -> Result<String, String> {
    let likes = formats::load::<MetagraphFile>(&fixture("likes.json")).map_err(err)?.1;
    let mut kbs = vec![likes];
    for (i, (c, e)) in [(5, 12), (12, 40), (30, 100), (50, 150)].into_iter().enumerate() {
        kbs.push(random_kb(c, e, 300 + i as u64));
    }
    let mut checked = 0;
    for (i, kb) in kbs.iter().enumerate() {
        ensure(kb.len() <= 200, || format!("kb {i} has {} atoms", kb.len()))?;
        let likes_xy = single(&[("Likes", &["$X", "$Y"])])?;
        let knows_yz = single(&[("Knows", &["$Y", "$Z"])])?;
        let mut hand = vec![
            single(&[("Likes", &["$X", "$X"])])?,
            single(&[("Likes", &["c0", "$Y"])])?,
            single(&[("Tag", &["$X"])])?,
            single(&[("Likes", &["$X", "$Y"]), ("Likes", &["$Y", "$X"])])?,
            conjoin(&likes_xy, &knows_yz).map_err(err)?,
            disjoin(&likes_xy, &knows_yz).map_err(err)?,
        ];
        if kb.len() <= 60 {
            hand.push(single(&[
                ("Likes", &["$X", "$Y"]),
                ("Knows", &["$Y", "$Z"]),
                ("Tag", &["$Z"]),
            ])?);
        }
        let seeds = vec![likes_xy, knows_yz, single(&[("Tag", &["$X"])])?];
        let cfg = MineConfig {
            budget: 6,
            max_edges: if kb.len() <= 60 { 3 } else { 2 },
            seed: i as u64,
            ..MineConfig::default()
        };
        let mined =
            mine_patterns(&Snapshot::from(kb.clone()), &seeds, &cfg).map_err(|e| format!("kb {i} mining: {e}"))?;
        for p in &mined.patterns {
            let b = brute_frequency(kb, p);
            ensure((p.frequency - b).abs() <= TOL, || {
                format!("kb {i}: mined frequency {} vs brute force {b}", p.frequency)
            })?;
            checked += 1;
        }
        for p in hand {
            let p = p.evaluated(kb).map_err(err)?;
            let b = brute_frequency(kb, &p);
            ensure((p.frequency - b).abs() <= TOL, || {
                format!("kb {i}: frequency {} vs brute force {b}", p.frequency)
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "mining: {checked} pattern frequencies match brute force on {} kbs",
        kbs.len()
    ))
}

fn chaining() -> Result<String, String> {
    let abc = formats::load::<MetagraphFile>(&fixture("abc.json")).map_err(err)?.1;
    let (s_ab, s_bc, s_b, s_c) = (0.8, 0.9, 0.5, 0.6);
    let oracle = s_ab * s_bc + (1.0 - s_ab) * (s_c - s_b * s_bc) / (1.0 - s_b);
    let target = Statement::implication("A", "C");
    let back = backward_chain_tv(&Snapshot::from(abc.clone()), &target, &Rule::ALL, 20, 42).map_err(err)?;
    let fwd = forward_chain(&Snapshot::from(abc), &Rule::ALL, 10, ChainExecutor::Greedy, 42).map_err(err)?;
    let fwd_tv = fwd.kb.tv(&target).ok_or("forward chaining never derived A->C")?;
    ensure((back.tv.strength() - oracle).abs() <= TOL, || {
        format!("backward s = {}, expected {oracle}", back.tv.strength())
    })?;
    ensure((fwd_tv.strength() - oracle).abs() <= TOL, || {
        format!("forward s = {}, expected {oracle}", fwd_tv.strength())
    })?;
    ensure((back.tv.confidence() - fwd_tv.confidence()).abs() <= TOL, || {
        format!(
            "confidence backward {} vs forward {}",
            back.tv.confidence(),
            fwd_tv.confidence()
        )
    })?;
    Ok(format!(
        "backchain A->C s = {:.4} = forward deduction",
        back.tv.strength()
    ))
}

fn attention() -> Result<String, String> {
    let likes = formats::load::<MetagraphFile>(&fixture("likes.json")).map_err(err)?.1;
    let mut kbs = vec![likes];
    kbs.extend((0..10).map(|s| random_kb(8 + s as usize, 20 + 3 * s as usize, 700 + s)));
    let mut transfers = 0;
    for (i, kb) in kbs.iter().enumerate() {
        let before: f64 = kb.atoms().map(|a| a.sti()).sum();
        for seed in 0..5 {
            let out = ecan_run(
                &Snapshot::from(kb.clone()),
                &links_from_edges(kb),
                0.5,
                100,
                &Vec::new(),
                seed,
            )
            .map_err(err)?;
            let after: f64 = out.sti.values().sum();
            let graph_after: f64 = out.graph.atoms().map(|a| a.sti()).sum();
            ensure(
                (after - before).abs() <= TOL && (graph_after - before).abs() <= TOL,
                || format!("kb {i} seed {seed}: STI {before} -> {after}"),
            )?;
            transfers += out.transfers.len();
        }
    }
    Ok(format!(
        "ECAN: total STI conserved over {} runs of 100 steps ({transfers} transfers)",
        kbs.len() * 5
    ))
}

fn onemax_runs() -> Result<String, String> {
    let file = EvolveFile::default();
    let variation = formats::Fixture::validate(&file).map_err(|i| i.message)?;
    let mut solved = 0;
    let mut worst = 0;
    for seed in 0..100u64 {
        let pop = random_population(file.population, 8, &onemax, derive_seed(seed, "evolve/population"));
        let out = evolve(onemax, pop, variation, 2000, derive_seed(seed, "evolve/run")).map_err(err)?;
        if out.best.fitness >= 8.0 {
            solved += 1;
            worst = worst.max(out.found_at);
        }
    }
    ensure(solved >= 95, || format!("OneMax(8) solved in {solved}/100 seeds"))?;
    Ok(format!(
        "OneMax(8) solved in {solved}/100 seeds (latest at evaluation {worst})"
    ))
}

pub fn check() -> Outcome {
    let parts = [clustering()?, mining()?, chaining()?, attention()?, onemax_runs()?];
    Ok(parts.join("; "))
}
