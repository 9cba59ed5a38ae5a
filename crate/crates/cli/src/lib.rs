//! Library side of the `qmi` command-line tool.
//!
//! Exit codes: 0 on success, 1 when a check or experiment reports a failure,
//! 2 on invalid input, 3 when a bound diverges or a computation fails to
//! converge.

pub mod args;
mod commands;
pub mod output;

use std::ffi::OsString;

use anyhow::Result;
use clap::Parser;

use args::{load_config, Cli, Command};

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ChecksFailed,
    Divergent,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::ChecksFailed => 1,
            Outcome::Divergent => 3,
        }
    }
}

/// Exit code for an error: 3 for numerical non-convergence, 2 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let diverged = err.chain().any(|e| {
        matches!(
            e.downcast_ref::<qmi::Error>(),
            Some(qmi::Error::NonConvergence(_))
        )
    });
    if diverged {
        3
    } else {
        2
    }
}

/// Merges the config file into the parsed flags and dispatches.
pub fn run(cli: Cli) -> Result<Outcome> {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Bound(p) => commands::bound::run(p.or(load_config(config)?)),
        Command::Figure { name, params } => {
            commands::figure::run(name, params.or(load_config(config)?))
        }
        Command::Check { suite, params } => {
            commands::check::run(suite, params.or(load_config(config)?))
        }
        Command::Optimize(p) => commands::optimize::run(p.or(load_config(config)?)),
        Command::TwoSeed(p) => commands::two_seed::run(p.or(load_config(config)?)),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code, reporting errors on stderr.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(outcome) => outcome.code(),
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    }
}
