//! Core algorithms for cognitive-pattern decision systems.
//!
//! The crate is `no_std` (with `alloc`): every module here is a pure
//! computation over in-memory values. File formats, the command-line tool and
//! anything else touching the operating system live in the `cogpat` crate.
//!
//! Module map:
//!
//! - [`metagraph`]: typed metagraph storage, joins, sampling, snapshots.
//! - [`morphisms`]: folds, unfolds, their memoized variants, the fused
//!   chronomorphism, and a suspendable step executor.
//! - [`dds`]: discrete decision systems and their greedy, exact, sampled and
//!   chronomorphism-based solvers.
//! - [`cofo`]: promising sets, entropy quality and the dataset-building
//!   decision process.
//! - [`relalg`]: finite relation algebra and the greedy / dynamic-programming
//!   inclusion checks.
//! - [`cogkit`]: inference, clustering, pattern mining, evolution and
//!   attention spreading built on the pieces above.
//! - [`subpattern`]: simplicity measures, mutual associativity audits and
//!   subpattern hierarchies.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod cofo;
pub mod cogkit;
pub mod dds;
pub mod math;
pub mod metagraph;
pub mod morphisms;
pub mod relalg;
pub mod rng;
pub mod subpattern;
pub mod tv;

pub use metagraph::{AtomId, Snapshot, TypedMetagraph};
pub use tv::TruthValue;
