mod cli;
mod commands;
mod config;
mod pipeline;

use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::config::FileConfig;
use crate::pipeline::Common;

/// Why a command stopped; each kind has its own exit status.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Conformance(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Conformance(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Conformance(m) => f.write_str(m),
        }
    }
}

impl From<qbind::Error> for Failure {
    fn from(e: qbind::Error) -> Self {
        match e {
            qbind::Error::Numerical(_) | qbind::Error::Degenerate(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = FileConfig::load(cli.common.config.as_deref())?;
    let common = Common::resolve(&cli.common, &file.common);
    match cli.command {
        Command::Generate(args) => commands::generate::run(&args, &file, &common),
        Command::Train(args) => commands::train::run(&args, &file, &common),
        Command::Grid(args) => commands::grid::run(&args, &file, &common),
        Command::InspectCircuit(args) => commands::inspect::run(&args, &file),
        Command::Gradcheck(args) => commands::gradcheck::run(&args, &file, &common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
