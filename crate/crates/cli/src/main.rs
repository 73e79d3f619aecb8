//! `assoc` command-line entry point.
//!
//! Exit codes: 0 success, 1 domain errors (out-of-vocabulary queries,
//! unsatisfiable preconditions), 2 I/O, format and usage errors. Results go
//! to stdout or `--out`; diagnostics go to stderr.

mod args;
mod cmds;
mod config;

use clap::Parser;

use args::{Cli, Command};
use config::ConfigFile;

/// Error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    /// Domain error: the request cannot be satisfied (exit 1).
    pub fn domain(message: String) -> Self {
        CliError { code: 1, message }
    }

    /// I/O or format error (exit 2).
    pub fn io(message: String) -> Self {
        CliError { code: 2, message }
    }
}

impl From<assoc_core::kb::KbError> for CliError {
    fn from(e: assoc_core::kb::KbError) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<assoc_core::embed::EmbedError> for CliError {
    fn from(e: assoc_core::embed::EmbedError) -> Self {
        use assoc_core::embed::EmbedError::*;
        match e {
            OutOfVocabulary { .. } | InvalidQuery(_) => CliError::domain(e.to_string()),
            _ => CliError::io(e.to_string()),
        }
    }
}

impl From<assoc_core::reasoner::ReasonerError> for CliError {
    fn from(e: assoc_core::reasoner::ReasonerError) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<assoc_core::wander::WanderError> for CliError {
    fn from(e: assoc_core::wander::WanderError) -> Self {
        use assoc_core::wander::WanderError::*;
        match e {
            UnwanderableStart | UndefinedDistance => CliError::domain(e.to_string()),
            Reasoner(inner) => inner.into(),
        }
    }
}

impl From<assoc_core::creativity::CreativityError> for CliError {
    fn from(e: assoc_core::creativity::CreativityError) -> Self {
        use assoc_core::creativity::CreativityError::*;
        match e {
            DuplicateQueryWords(_) => CliError::domain(e.to_string()),
            Embed(inner) => inner.into(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(args) => cmds::ingest(args, &config),
        Command::Select(args) => cmds::select(args, &config),
        Command::Reason(args) => cmds::reason_cmd(args, &config),
        Command::Wander(args) => cmds::wander_cmd(args, &config),
        Command::Frat(args) => cmds::frat(args, &config),
        Command::FratBench(args) => cmds::frat_bench(args, &config),
    }
}

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .init();
    if let Err(err) = run(cli) {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
}
