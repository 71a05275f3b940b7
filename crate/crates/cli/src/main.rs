mod commands;
mod load;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use infocausal::ErrorCategory;

use commands::*;

/// Causal structure discovery with information measures.
#[derive(Debug, Parser)]
#[command(name = "infocausal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Information of each observation and pairwise (conditional) dependences.
    Info(InfoArgs),
    /// Structure search over the given observations.
    Pc(PcArgs),
    /// Markov chains of transformed texts.
    Exp1(Exp1Args),
    /// Four-node networks built from shared corpus segments.
    Exp2(Exp2Args),
    /// Independence threshold from a null distribution.
    Calibrate(CalibrateArgs),
    /// Axiom, semi-graphoid and Markov-condition checks.
    Verify(VerifyArgs),
    /// LZ components and greedy grammar of one string.
    Inspect(InspectArgs),
    /// Writes the texts of a transformer chain, one file per node.
    Chain(ChainArgs),
}

/// Exit codes follow the BSD sysexits convention.
fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Input => 65,
        ErrorCategory::Io => 74,
        ErrorCategory::Config => 78,
        ErrorCategory::Internal => 70,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Info(a) => info(a),
        Command::Pc(a) => pc(a),
        Command::Exp1(a) => exp1(a),
        Command::Exp2(a) => exp2(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Verify(a) => verify(a),
        Command::Inspect(a) => inspect(a),
        Command::Chain(a) => chain(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.category()))
        }
    }
}

/// Worker count when neither `--jobs` nor `$INFOCAUSAL_JOBS` is set.
pub(crate) fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
