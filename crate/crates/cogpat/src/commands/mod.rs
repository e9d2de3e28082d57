//! One handler per subcommand.

mod cofo;
mod cog;
mod dds;
mod morph;
mod relalg;
mod subpattern;

use std::path::Path;

use crate::cli::{CliError, CofoCmd, CogCmd, Command, Ctx, DdsCmd, MorphCmd, RelalgCmd, SubpatternCmd};

/// Absolute tolerance for value comparisons in checks.
pub(crate) const TOL: f64 = 1e-9;

pub(crate) fn dispatch(ctx: &mut Ctx, cmd: &Command, fixture: Option<&Path>) -> Result<(), CliError> {
    let need = |f: Option<&Path>| {
        f.map(Path::to_path_buf)
            .ok_or_else(|| CliError::Usage("missing --fixture".into()))
    };
    match cmd {
        Command::Dds(DdsCmd::Solve) => dds::solve(ctx, &need(fixture)?),
        Command::Dds(DdsCmd::Compare) => dds::compare(ctx, &need(fixture)?),
        Command::Cofo(CofoCmd::Run) => cofo::run(ctx, &need(fixture)?),
        Command::Relalg(RelalgCmd::VerifyGreedy) => relalg::verify_greedy(ctx, fixture),
        Command::Relalg(RelalgCmd::VerifyDp { reading }) => relalg::verify_dp(ctx, fixture, reading.map(Into::into)),
        Command::Cog(CogCmd::Chain { rules }) => cog::chain(ctx, &need(fixture)?, rules.as_deref()),
        Command::Cog(CogCmd::Backchain { target, rules }) => {
            cog::backchain(ctx, &need(fixture)?, target, rules.as_deref())
        }
        Command::Cog(CogCmd::Cluster) => cog::cluster(ctx, &need(fixture)?),
        Command::Cog(CogCmd::Mine {
            seeds,
            min_freq,
            max_edges,
        }) => cog::mine(ctx, &need(fixture)?, seeds.as_deref(), *min_freq, *max_edges),
        Command::Cog(CogCmd::Evolve) => cog::evolve(ctx, fixture),
        Command::Cog(CogCmd::Ecan { amount }) => cog::ecan(ctx, &need(fixture)?, *amount),
        Command::Subpattern(SubpatternCmd::Audit) => subpattern::audit(ctx, &need(fixture)?),
        Command::Subpattern(SubpatternCmd::Dag) => subpattern::dag(ctx, &need(fixture)?),
        Command::Subpattern(SubpatternCmd::Align) => subpattern::align(ctx, &need(fixture)?),
        Command::Morph(MorphCmd::Demo { n, slice }) => morph::demo(ctx, fixture, *n, *slice),
    }
}

/// `Err(Check)` listing every failed condition, if any.
pub(crate) fn verdict(failures: Vec<String>) -> Result<(), CliError> {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failures.join("; ")))
    }
}
