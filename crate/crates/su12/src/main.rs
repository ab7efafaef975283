use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use su12::{execute, Command, RunConfig};

/// SU(1,2) interferometer: algebra checks, phase sensitivity, weight
/// optimization, figure tables and the Fock-space cross-check.
///
/// Exit status: 0 success, 1 a check failed, 2 usage or config error,
/// 3 engine guard (Fock leakage or a zero-phase limit that will not settle).
#[derive(Debug, Parser)]
#[command(name = "su12", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Parameter file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one parameter; repeatable, applied after --config.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Directory for fig<N>.csv and summary.txt.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Leave the timestamp comment out of written files.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Check the commutation table, adjoint matrices and group closure.
    LieVerify,
    /// Phase sensitivity of the weighted estimator s·n12 + t·n13 + r·n14.
    Sensitivity,
    /// Grid search for the best detection weights.
    Optimize,
    /// Write the table behind figure N (3 to 8).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(3..=8))]
        n: u8,
    },
    /// Compare the Gaussian pipeline with the truncated Fock simulation.
    OracleCheck,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::LieVerify => Command::LieVerify,
        Cmd::Sensitivity => Command::Sensitivity,
        Cmd::Optimize => Command::Optimize,
        Cmd::Figure { n } => Command::Figure(n),
        Cmd::OracleCheck => Command::OracleCheck,
    };
    let run = RunConfig { command, config_path: cli.config, overrides: cli.set, output_dir: cli.out, timestamp: !cli.no_timestamp };
    match execute(&run) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("su12: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
