//! Solving a decision problem as a chronomorphism: the subproblem dag is
//! produced by a futu-unfold (decision → action → chance → decision) and
//! collapsed by a memoized fold of the Bellman algebra.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{best_of, enumerate, Dds, DdsError, ValueFunction, DEFAULT_CELL_BUDGET};
use crate::metagraph::AtomSpec;
use crate::morphisms::{chrono, Algebra, AtomView, Child, Coalgebra, Layer};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Seed {
    Root,
    Decide(usize, String),
}

#[derive(Debug, Clone, PartialEq)]
struct Bellman {
    value: f64,
    label: Option<String>,
    argmax: Vec<String>,
}

impl Bellman {
    fn plain(value: f64) -> Self {
        Self {
            value,
            label: None,
            argmax: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChronoSolve {
    pub table: ValueFunction,
    pub memo_hits: u64,
    /// Atoms the unfold emitted (decision, action and chance nodes).
    pub expansions: usize,
}

pub fn chrono_solve<P: Dds>(p: &P) -> Result<ChronoSolve, DdsError> {
    chrono_solve_with(p, DEFAULT_CELL_BUDGET)
}

pub fn chrono_solve_with<P: Dds>(p: &P, budget: usize) -> Result<ChronoSolve, DdsError> {
    let en = enumerate(p, budget)?;
    let n = p.stages();
    let mut layers: BTreeMap<Seed, Layer<Seed>> = BTreeMap::new();
    let mut roots = Vec::new();
    for (i, row) in en.stages.iter().enumerate() {
        let t = i + 1;
        for cell in row {
            let acts = cell
                .actions
                .iter()
                .map(|(akey, x)| {
                    let reward = p.reward(t, &cell.state, x);
                    let chances = if t == n {
                        Vec::new()
                    } else {
                        p.transition(t, &cell.state, x)
                            .into_iter()
                            .map(|(pr, s)| {
                                Child::now(
                                    "Chance",
                                    Layer::with_children(
                                        AtomSpec::node("Chance").with_lti(pr),
                                        alloc::vec![Child::seed("Decide", Seed::Decide(t + 1, p.state_key(&s)),)],
                                    ),
                                )
                            })
                            .collect()
                    };
                    Child::now(
                        "Act",
                        Layer::with_children(AtomSpec::node("Act").named(akey).with_sti(reward), chances),
                    )
                })
                .collect();
            let seed = Seed::Decide(t, cell.key.clone());
            layers.insert(
                seed.clone(),
                Layer::with_children(AtomSpec::node("Decide").named(&cell.key), acts),
            );
            roots.push(Child::seed("Decide", seed));
        }
    }
    layers.insert(Seed::Root, Layer::with_children(AtomSpec::node("Root"), roots));
    let layers = Arc::new(layers);
    let coalgebra = Coalgebra::new(move |s: &Seed| layers.get(s).cloned()).sharing();

    let alpha = p.discount();
    let algebra = Algebra::new(
        Bellman::plain(0.0),
        move |atom: &AtomView<'_>, kids: &[Option<Bellman>]| match atom.type_label() {
            "Decide" => {
                let qs: Vec<(String, f64)> = kids
                    .iter()
                    .flatten()
                    .map(|b| (b.label.clone().unwrap_or_default(), b.value))
                    .collect();
                let e = best_of(&qs);
                Bellman {
                    value: e.value,
                    label: None,
                    argmax: e.argmax,
                }
            }
            "Act" => {
                let value = if alpha == 0.0 {
                    atom.sti()
                } else {
                    let mut cont = 0.0;
                    for k in kids {
                        cont += k.as_ref().map_or(f64::NEG_INFINITY, |b| b.value);
                    }
                    atom.sti() + alpha * cont
                };
                Bellman {
                    value,
                    label: atom.name().map(String::from),
                    argmax: Vec::new(),
                }
            }
            "Chance" => {
                let pr = atom.lti();
                let f = kids
                    .first()
                    .and_then(|k| k.as_ref())
                    .map_or(f64::NEG_INFINITY, |b| b.value);
                Bellman::plain(if pr > 0.0 { pr * f } else { 0.0 })
            }
            _ => Bellman::plain(0.0),
        },
        |a: &Bellman, _: &Bellman| a.clone(),
    );

    let out = chrono(Seed::Root, &coalgebra, &algebra, usize::MAX)?;
    let mut table = ValueFunction {
        stages: n,
        table: BTreeMap::new(),
    };
    for (seed, b) in out.memo {
        if let Seed::Decide(t, key) = seed {
            table.table.insert(
                (t, key),
                super::ValueEntry {
                    value: b.value,
                    argmax: b.argmax,
                },
            );
        }
    }
    Ok(ChronoSolve {
        table,
        memo_hits: out.memo_hits,
        expansions: out.expansions,
    })
}
