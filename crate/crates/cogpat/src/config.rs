//! Run configuration shared by every subcommand.

use std::fs;
use std::path::PathBuf;

use thiserror::Error;

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "COGPAT_SEED";
pub const DEFAULT_OUT: &str = "cogpat-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Executor {
    Greedy,
    Dp,
    Sdp,
    Chrono,
}

impl Executor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Executor::Greedy => "greedy",
            Executor::Dp => "dp",
            Executor::Sdp => "sdp",
            Executor::Chrono => "chrono",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{SEED_ENV}={0:?} is not an unsigned integer")]
    SeedEnv(String),
    #[error("fixture {0} does not exist or is not a file")]
    Fixture(PathBuf),
    #[error("output directory {}: {message}", path.display())]
    Out { path: PathBuf, message: String },
}

/// `--seed`, else `COGPAT_SEED`, else [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, ConfigError> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v.trim().parse().map_err(|_| ConfigError::SeedEnv(v.to_string())),
        (None, None) => Ok(DEFAULT_SEED),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// Subcommand path, e.g. `dds compare`.
    pub command: String,
    pub fixtures: Vec<PathBuf>,
    pub seed: u64,
    pub instances: Option<usize>,
    pub budget: Option<usize>,
    pub out: PathBuf,
    pub executor: Option<Executor>,
}

impl RunConfig {
    /// Check every input path and create the output directory.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for f in &self.fixtures {
            if !f.is_file() {
                return Err(ConfigError::Fixture(f.clone()));
            }
        }
        if self.out.exists() && !self.out.is_dir() {
            return Err(ConfigError::Out {
                path: self.out.clone(),
                message: "exists and is not a directory".into(),
            });
        }
        fs::create_dir_all(&self.out).map_err(|e| ConfigError::Out {
            path: self.out.clone(),
            message: e.to_string(),
        })
    }
}
