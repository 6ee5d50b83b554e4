//! Config-driven scenarios, parameter sweeps and fits on top of
//! `homsim-core`.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 invalid configuration,
//! arguments or data (nothing is written), 3 file I/O failure.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use commands::fit::FitModel;
use commands::sweep::{Axis, SweepRange};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "homsim",
    version,
    about = "Two-photon interference simulations, sweeps and fits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario; writes histogram.csv, summary.json and run.log.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides rng.seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Step one parameter over a range; writes sweep.csv and run.log.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        /// start:stop:steps, both ends included.
        #[arg(long, allow_hyphen_values = true)]
        range: SweepRange,
        #[arg(long)]
        out: PathBuf,
        /// Overrides rng.seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit a model to CSV data (x, y[, y_error]); writes a JSON report.
    Fit {
        #[arg(long, value_enum)]
        model: FitModel,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate { config, out, seed } => commands::simulate::run(config, out, *seed),
        Command::Sweep {
            config,
            axis,
            range,
            out,
            seed,
        } => commands::sweep::run(config, *axis, *range, out, *seed),
        Command::Fit { model, data, out } => commands::fit::run(*model, data, out),
    }
}

/// Parses arguments, runs the command and reports failures on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
