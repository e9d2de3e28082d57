//! Acceptance gate: one line per criterion, nonzero exit if any fails.

mod cofo;
mod cog;
mod dds;
mod gen;
mod morph;
mod relalg;
mod subpattern;

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

pub type Outcome = Result<String, String>;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// `Err(msg)` unless `cond`.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    check: fn() -> Outcome,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "Galois theorem suites",
        limit: Duration::from_secs(30),
        check: relalg::check,
    },
    Criterion {
        id: 2,
        name: "greedy vs DP gap",
        limit: Duration::from_secs(10),
        check: dds::check_gap,
    },
    Criterion {
        id: 3,
        name: "stochastic DP convergence",
        limit: Duration::from_secs(60),
        check: dds::check_sdp,
    },
    Criterion {
        id: 4,
        name: "fold-order invariance",
        limit: Duration::from_secs(10),
        check: morph::check_order,
    },
    Criterion {
        id: 5,
        name: "memory-carrying scheme equivalence",
        limit: Duration::from_secs(10),
        check: morph::check_schemes,
    },
    Criterion {
        id: 6,
        name: "COFO monotone narrowing",
        limit: Duration::from_secs(30),
        check: cofo::check,
    },
    Criterion {
        id: 7,
        name: "cognitive-instance oracles",
        limit: Duration::from_secs(180),
        check: cog::check,
    },
    Criterion {
        id: 8,
        name: "suspend/resume determinism",
        limit: Duration::from_secs(10),
        check: morph::check_resume,
    },
    Criterion {
        id: 9,
        name: "subpattern alignment",
        limit: Duration::from_secs(10),
        check: subpattern::check,
    },
];

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let timing = format!("{:.2}s / {}s", elapsed.as_secs_f64(), c.limit.as_secs());
        let result = match result {
            Ok(d) if elapsed > c.limit => Err(format!("over time limit; {d}")),
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {} PASS {}: {detail} ({timing})", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {}: {detail} ({timing})", c.id, c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
