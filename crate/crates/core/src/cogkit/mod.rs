//! Cognitive algorithms as decision processes over metagraph snapshots:
//! truth-value inference, forward and backward chaining, agglomerative
//! clustering, pattern mining, evolutionary search and importance
//! spreading.

mod chain;
mod cluster;
mod ecan;
mod evolve;
mod mine;
mod pln;

use alloc::string::String;
use thiserror::Error;

use crate::dds::DdsError;
use crate::metagraph::MgError;

pub use chain::{
    backward_chain_tv, forward_chain, BackwardOutcome, Bid, BidLabel, BidNode, ChainExecutor, ChainStep, ForwardOutcome,
};
pub use cluster::{
    agglomerate, canonical as canonical_partition, logical_entropy, neg_mean_within, partitions_into, Agglomeration,
    ClusterExecutor, Clustering, Distances, Merge, MergeDds, Partition, EXACT_LIMIT,
};
pub use ecan::{ecan_run, links_from_edges, EcanOutcome, Transfer, UtilityTrace};
pub use evolve::{evolve, onemax, random_population, EvolveOutcome, Genotype, Variation};
pub use mine::{
    clause, clause_key, conjoin, disjoin, frequency, independence_estimate, mine_patterns, rename_apart, EdgeSpec,
    Expansion, MineConfig, MineExecutor, MineOutcome, MineStep, Pattern, MAX_CLAUSE_EDGES, VARIABLE,
};
pub use pln::{
    abduction, cwig, cwig_with, deduction, induction, inversion, reversible_audit, Kb, RoundTrip, Rule, Statement,
    CWIG_PANELS, DEFAULT_PRIOR, EQUIVALENCE, IMPLICATION,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CogError {
    #[error("formula singularity: {0}")]
    Singularity(&'static str),
    #[error("knowledge base holds no statements")]
    NoStatements,
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid pattern: {0}")]
    Pattern(String),
    #[error("every sampling weight is zero")]
    EmptySupport,
    #[error(transparent)]
    Metagraph(#[from] MgError),
    #[error(transparent)]
    Dds(#[from] DdsError),
}
