//! Command-line interface.
//!
//! `cogpat <group> <command> [flags]`. Exit status is 0 on success, 1 when a
//! check fails or a computation errors, and 2 on usage errors, including
//! unreadable or malformed fixtures.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cogpat_core::cofo::CofoError;
use cogpat_core::cogkit::CogError;
use cogpat_core::dds::DdsError;
use cogpat_core::metagraph::MgError;
use cogpat_core::morphisms::MorphError;
use cogpat_core::relalg::{Reading, RelError};
use cogpat_core::subpattern::SubError;
use serde_json::json;
use thiserror::Error;

use crate::commands;
use crate::config::{resolve_seed, ConfigError, Executor, RunConfig, DEFAULT_OUT, SEED_ENV};
use crate::formats::FormatError;
use crate::report::Artifacts;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cogpat",
    version,
    about = "Decision systems, recursion schemes and cognitive-algorithm oracles"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Input fixture (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub fixture: Option<PathBuf>,
    /// Seed for every stochastic path; falls back to COGPAT_SEED, then 42.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Directory for artifacts.
    #[arg(long, global = true, value_name = "DIR", default_value = DEFAULT_OUT)]
    pub out: PathBuf,
    /// Number of random instances (relalg suites).
    #[arg(long, global = true, value_name = "N")]
    pub instances: Option<usize>,
    /// Work budget: rollouts, steps, expansions or evaluations.
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub executor: Option<Executor>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Staged decision systems.
    #[command(subcommand)]
    Dds(DdsCmd),
    /// Combinatory-operation based function optimization.
    #[command(subcommand)]
    Cofo(CofoCmd),
    /// Relation-algebra theorem checks.
    #[command(subcommand)]
    Relalg(RelalgCmd),
    /// Cognitive-algorithm instances.
    #[command(subcommand)]
    Cog(CogCmd),
    /// Subpattern hierarchies and mutual associativity.
    #[command(subcommand)]
    Subpattern(SubpatternCmd),
    /// Suspendable recursion-scheme runs.
    #[command(subcommand)]
    Morph(MorphCmd),
}

#[derive(Debug, Subcommand)]
pub enum DdsCmd {
    /// Solve with one executor (default dp).
    Solve,
    /// Greedy, exact, chrono and sampled values side by side.
    Compare,
}

#[derive(Debug, Subcommand)]
pub enum CofoCmd {
    /// Build a dataset by following one executor's choices.
    Run,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReadingArg {
    Converse,
    Literal,
}

impl From<ReadingArg> for Reading {
    fn from(r: ReadingArg) -> Self {
        match r {
            ReadingArg::Converse => Reading::Converse,
            ReadingArg::Literal => Reading::Literal,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum RelalgCmd {
    /// Greedy theorem on random instances, or on a fixture.
    VerifyGreedy,
    /// Dynamic-programming theorem on random instances, or on a fixture.
    VerifyDp {
        /// Monotonicity reading used as the precondition gate.
        #[arg(long, value_enum)]
        reading: Option<ReadingArg>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CogCmd {
    /// Forward chaining (executor greedy or sdp).
    Chain {
        /// Rule set file; all rules when absent.
        #[arg(long, value_name = "PATH")]
        rules: Option<PathBuf>,
    },
    /// Backward truth-value chaining towards a target statement.
    Backchain {
        /// `A`, `A->B`, `A<->B` or `Label(A,B)`.
        #[arg(long)]
        target: String,
        #[arg(long, value_name = "PATH")]
        rules: Option<PathBuf>,
    },
    /// Agglomerative clustering (executor greedy or dp).
    Cluster,
    /// Pattern mining (executor greedy or sdp).
    Mine {
        /// Seed patterns; one single-edge pattern per edge type when absent.
        #[arg(long, value_name = "PATH")]
        seeds: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        min_freq: f64,
        #[arg(long, default_value_t = 2)]
        max_edges: usize,
    },
    /// Evolutionary search on OneMax.
    Evolve,
    /// Attention spreading along edges.
    Ecan {
        /// STI moved per step.
        #[arg(long, default_value_t = 1.0)]
        amount: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SubpatternCmd {
    /// Mutual-associativity audit of every operator pair.
    Audit,
    /// Subpattern dag of the fixture items.
    Dag,
    /// Align a clustering merge trace with the block-union dag.
    Align,
}

#[derive(Debug, Subcommand)]
pub enum MorphCmd {
    /// Solo and interleaved chrono and fold runs, plus a staleness probe.
    Demo {
        /// Fibonacci index for the chronomorphism.
        #[arg(long, default_value_t = 10)]
        n: u32,
        /// Frames per slice when interleaving.
        #[arg(long, default_value_t = 3)]
        slice: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Compute(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Format(_) => EXIT_USAGE,
            CliError::Compute(_) | CliError::Check(_) => EXIT_CHECK,
        }
    }
}

pub(crate) fn compute(e: impl Display) -> CliError {
    CliError::Compute(e.to_string())
}

macro_rules! compute_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                compute(e)
            }
        }
    )*};
}

compute_from!(DdsError, CofoError, RelError, CogError, SubError, MorphError, MgError);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Need {
    Optional,
    Required,
}

/// Which global flags a command reads.
pub(crate) struct Uses {
    pub fixture: Need,
    pub instances: bool,
    pub budget: bool,
    pub executors: &'static [Executor],
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dds(DdsCmd::Solve) => "dds solve",
            Command::Dds(DdsCmd::Compare) => "dds compare",
            Command::Cofo(CofoCmd::Run) => "cofo run",
            Command::Relalg(RelalgCmd::VerifyGreedy) => "relalg verify-greedy",
            Command::Relalg(RelalgCmd::VerifyDp { .. }) => "relalg verify-dp",
            Command::Cog(CogCmd::Chain { .. }) => "cog chain",
            Command::Cog(CogCmd::Backchain { .. }) => "cog backchain",
            Command::Cog(CogCmd::Cluster) => "cog cluster",
            Command::Cog(CogCmd::Mine { .. }) => "cog mine",
            Command::Cog(CogCmd::Evolve) => "cog evolve",
            Command::Cog(CogCmd::Ecan { .. }) => "cog ecan",
            Command::Subpattern(SubpatternCmd::Audit) => "subpattern audit",
            Command::Subpattern(SubpatternCmd::Dag) => "subpattern dag",
            Command::Subpattern(SubpatternCmd::Align) => "subpattern align",
            Command::Morph(MorphCmd::Demo { .. }) => "morph demo",
        }
    }

    pub(crate) fn uses(&self) -> Uses {
        use Executor::*;
        let (fixture, instances, budget, executors): (Need, bool, bool, &'static [Executor]) = match self {
            Command::Dds(DdsCmd::Solve) => (Need::Required, false, true, &[Greedy, Dp, Sdp, Chrono]),
            Command::Dds(DdsCmd::Compare) => (Need::Required, false, true, &[]),
            Command::Cofo(CofoCmd::Run) => (Need::Required, false, true, &[Greedy, Dp, Sdp, Chrono]),
            Command::Relalg(_) => (Need::Optional, true, false, &[]),
            Command::Cog(CogCmd::Chain { .. }) => (Need::Required, false, true, &[Greedy, Sdp]),
            Command::Cog(CogCmd::Backchain { .. }) => (Need::Required, false, true, &[]),
            Command::Cog(CogCmd::Cluster) => (Need::Required, false, false, &[Greedy, Dp]),
            Command::Cog(CogCmd::Mine { .. }) => (Need::Required, false, true, &[Greedy, Sdp]),
            Command::Cog(CogCmd::Evolve) => (Need::Optional, false, true, &[]),
            Command::Cog(CogCmd::Ecan { .. }) => (Need::Required, false, true, &[]),
            Command::Subpattern(SubpatternCmd::Align) => (Need::Required, false, false, &[Greedy, Dp]),
            Command::Subpattern(_) => (Need::Required, false, false, &[]),
            Command::Morph(_) => (Need::Optional, false, true, &[]),
        };
        Uses {
            fixture,
            instances,
            budget,
            executors,
        }
    }

    /// Input files named by command-specific flags.
    fn extra_inputs(&self) -> Vec<PathBuf> {
        match self {
            Command::Cog(CogCmd::Chain { rules: Some(p) })
            | Command::Cog(CogCmd::Backchain { rules: Some(p), .. })
            | Command::Cog(CogCmd::Mine { seeds: Some(p), .. }) => vec![p.clone()],
            _ => Vec::new(),
        }
    }
}

fn check_flags(cmd: &Command, g: &GlobalArgs) -> Result<(), CliError> {
    let name = cmd.name();
    let uses = cmd.uses();
    if uses.fixture == Need::Required && g.fixture.is_none() {
        return Err(CliError::Usage(format!("{name} needs --fixture")));
    }
    if g.instances.is_some() && !uses.instances {
        return Err(CliError::Usage(format!("{name} does not use --instances")));
    }
    if g.instances == Some(0) {
        return Err(CliError::Usage("--instances must be at least 1".into()));
    }
    if g.budget.is_some() && !uses.budget {
        return Err(CliError::Usage(format!("{name} does not use --budget")));
    }
    if let Some(e) = g.executor {
        if !uses.executors.contains(&e) {
            let allowed: Vec<&str> = uses.executors.iter().map(Executor::as_str).collect();
            return Err(CliError::Usage(if allowed.is_empty() {
                format!("{name} does not use --executor")
            } else {
                format!("{name} supports --executor {}, not {}", allowed.join("|"), e.as_str())
            }));
        }
    }
    Ok(())
}

/// Shared state of one command execution.
pub(crate) struct Ctx {
    pub cfg: RunConfig,
    pub art: Artifacts,
    pub lines: Vec<String>,
}

impl Ctx {
    pub fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn budget_or(&self, default: usize) -> usize {
        self.cfg.budget.unwrap_or(default)
    }

    pub fn executor_or(&self, default: Executor) -> Executor {
        self.cfg.executor.unwrap_or(default)
    }
}

/// Result of one invocation with its captured output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse `args` (program name first) and execute, capturing output.
/// `env_seed` stands in for the `COGPAT_SEED` variable.
pub fn invoke<I, T>(args: I, env_seed: Option<&str>) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Invocation {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Invocation {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut lines = Vec::new();
    match execute(cli, env_seed, &mut lines) {
        Ok(()) => Invocation {
            code: EXIT_OK,
            stdout: join_lines(&lines),
            stderr: String::new(),
        },
        Err(e) => Invocation {
            code: e.exit_code(),
            stdout: join_lines(&lines),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn join_lines(lines: &[String]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

/// Entry point for the binary: reads `COGPAT_SEED`, prints, returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(SEED_ENV).ok();
    let inv = invoke(args, env.as_deref());
    print!("{}", inv.stdout);
    eprint!("{}", inv.stderr);
    inv.code
}

/// Validate flags and paths, run the command, write `run.json`.
pub fn execute(cli: Cli, env_seed: Option<&str>, lines: &mut Vec<String>) -> Result<(), CliError> {
    let Cli { global, command } = cli;
    check_flags(&command, &global)?;
    let seed = resolve_seed(global.seed, env_seed)?;
    let mut fixtures: Vec<PathBuf> = global.fixture.iter().cloned().collect();
    fixtures.extend(command.extra_inputs());
    let cfg = RunConfig {
        command: command.name().to_string(),
        fixtures,
        seed,
        instances: global.instances,
        budget: global.budget,
        out: global.out.clone(),
        executor: global.executor,
    };
    cfg.validate()?;
    let mut ctx = Ctx {
        art: Artifacts::new(&cfg.out),
        cfg,
        lines: Vec::new(),
    };
    let fixture = global.fixture.clone();
    let result = commands::dispatch(&mut ctx, &command, fixture.as_deref());
    let status = match &result {
        Ok(()) => "ok",
        Err(CliError::Check(_)) => "check-failed",
        Err(_) => "error",
    };
    if !matches!(
        result,
        Err(CliError::Usage(_) | CliError::Format(_) | CliError::Config(_))
    ) {
        let written: Vec<String> = ctx
            .art
            .written()
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        let manifest = json!({
            "command": ctx.cfg.command,
            "inputs": ctx.cfg.fixtures.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "seed": ctx.cfg.seed,
            "instances": ctx.cfg.instances,
            "budget": ctx.cfg.budget,
            "executor": ctx.cfg.executor.map(|e| e.as_str()),
            "artifacts": written,
            "status": status,
        });
        ctx.art.json("run.json", &manifest)?;
    }
    lines.append(&mut ctx.lines);
    result
}
