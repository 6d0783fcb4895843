//! `plap`: command-line front end of the numerical laboratory.
//!
//! Human-readable summaries go to standard output; data artifacts are written
//! only to the paths given with `--out`-style flags, and each run that writes
//! artifacts appends a line to a `manifest.jsonl`.
//!
//! Exit status: 0 on success, 1 on numerical failure (or a failed
//! verification), 2 on usage errors and unreadable inputs, 3 when a
//! mathematical precondition is violated.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod manifest;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::{CliError, CliResult, RunRecord};
use crate::manifest::RunManifest;

fn dispatch(command: &Command) -> CliResult<RunRecord> {
    match command {
        Command::Exponents(a) => commands::exponents(a),
        Command::Solve(a) => commands::solve(a),
        Command::Stability(a) => commands::stability(a),
        Command::Transform(a) => commands::transform(a),
        Command::Audit(a) => commands::audit(a),
        Command::VerifyTheorems(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let record = match dispatch(&cli.command) {
        Ok(record) => record,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Some(path) = RunManifest::location(cli.manifest.as_deref(), &record.outputs) {
        let manifest = RunManifest::new(
            record.command,
            record.params,
            record.nonlinearity,
            record.config,
            record.outputs,
            start.elapsed().as_secs_f64(),
        );
        if let Err(e) = manifest.append(&path) {
            let e = CliError::Core(e.into());
            eprintln!("error: cannot append manifest {}: {e}", path.display());
            return ExitCode::from(e.exit_code());
        }
    }
    ExitCode::SUCCESS
}
