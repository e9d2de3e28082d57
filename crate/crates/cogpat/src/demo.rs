//! Built-in coalgebras and algebras used by `morph demo` and the tests.

use cogpat_core::metagraph::AtomSpec;
use cogpat_core::morphisms::{Algebra, AtomView, Child, Coalgebra, Layer};

/// Unfolds `n` into the Fibonacci call dag, sharing repeated seeds.
pub fn fib_coalgebra() -> Coalgebra<u32> {
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

/// Leaves named `1` count 1, inner atoms sum their children.
pub fn fib_algebra() -> Algebra<u64> {
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

/// Number of root-to-atom paths: `1 + Σ children`, roots added.
pub fn size_algebra() -> Algebra<u64> {
    Algebra::new(
        0,
        |_: &AtomView<'_>, kids: &[Option<u64>]| 1 + kids.iter().flatten().sum::<u64>(),
        |x: &u64, y: &u64| x + y,
    )
    .declare_associative()
}

/// `F(n)` by iteration.
pub fn fib(n: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}
