use cogpat_core::metagraph::{AtomId, AtomSpec, TypedMetagraph};
use cogpat_core::rng;
use rand::Rng;

/// Every metagraph with `nodes` named nodes followed by `edges` binary
/// links, each link targeting an ordered pair of earlier atoms.
pub fn enumerate(nodes: usize, edges: usize) -> Vec<TypedMetagraph> {
    let mut base = TypedMetagraph::new();
    for i in 0..nodes {
        base.add_atom(AtomSpec::node("N").named(&format!("n{i}")).with_sti(i as f64 + 1.0))
            .expect("node");
    }
    let mut out = vec![base];
    for _ in 0..edges {
        let mut next = Vec::new();
        for g in &out {
            let n = g.len() as u32;
            for a in 0..n {
                for b in 0..n {
                    let mut h = g.clone();
                    h.add_atom(AtomSpec::link("E", &[AtomId(a), AtomId(b)])).expect("link");
                    next.push(h);
                }
            }
        }
        out = next;
    }
    out
}

/// All enumerated shapes with at most `max_atoms` atoms and at least one
/// node.
pub fn small_graphs(max_atoms: usize) -> Vec<TypedMetagraph> {
    let mut out = Vec::new();
    for total in 1..=max_atoms {
        for nodes in 1..=total {
            out.extend(enumerate(nodes, total - nodes));
        }
    }
    out
}

/// A random metagraph with `atoms` atoms: a few nodes, then links of arity
/// 1 to 3 over earlier atoms, with mixed edge types.
pub fn random_graph(atoms: usize, seed: u64) -> TypedMetagraph {
    let mut r = rng::seeded(seed);
    let mut g = TypedMetagraph::new();
    let nodes = r.gen_range(1..=atoms.clamp(1, 3));
    for i in 0..nodes {
        let sti = r.gen_range(0..5) as f64;
        g.add_atom(AtomSpec::node("N").named(&format!("n{i}")).with_sti(sti))
            .expect("node");
    }
    while g.len() < atoms {
        let arity = r.gen_range(1..=3);
        let n = g.len() as u32;
        let targets: Vec<AtomId> = (0..arity).map(|_| AtomId(r.gen_range(0..n))).collect();
        let ty = ["E", "F"][r.gen_range(0..2)];
        g.add_atom(AtomSpec::link(ty, &targets).with_sti(r.gen_range(0..3) as f64))
            .expect("link");
    }
    g
}

/// A knowledge base of `concepts` named concepts and `edges` links over
/// them: binary `Likes`/`Knows` and unary `Tag`.
pub fn random_kb(concepts: usize, edges: usize, seed: u64) -> TypedMetagraph {
    let mut r = rng::seeded(seed);
    let mut g = TypedMetagraph::new();
    let ids: Vec<AtomId> = (0..concepts)
        .map(|i| {
            g.add_atom(
                AtomSpec::node("Concept")
                    .named(&format!("c{i}"))
                    .with_sti(r.gen_range(0..4) as f64),
            )
            .expect("node")
        })
        .collect();
    for _ in 0..edges {
        let pick = |r: &mut rng::SeededRng| ids[r.gen_range(0..ids.len())];
        let spec = match r.gen_range(0..5) {
            0 => AtomSpec::link("Tag", &[pick(&mut r)]),
            1 | 2 => AtomSpec::link("Knows", &[pick(&mut r), pick(&mut r)]),
            _ => AtomSpec::link("Likes", &[pick(&mut r), pick(&mut r)]),
        };
        g.add_atom(spec).expect("link");
    }
    g
}
