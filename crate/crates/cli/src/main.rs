//! `cm-entropy`: evaluate the family's entropies, run the verification
//! suites and scan the log-convexity question for `c < 0`.
//!
//! Exit codes: 0 pass, 1 mathematical violation, 2 usage or validation error.

mod args;
mod commands;
mod report;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, OutputArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cm_entropy::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write report: {0}")]
    Io(#[from] io::Error),
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => fs::write(path, text)?,
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            // reader went away, e.g. `| head`
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
            other => other?,
        },
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let start = std::time::Instant::now();
    let (out, (mut report, code)) = match &cli.command {
        Command::Eval(a) => (&a.output, commands::eval(a)?),
        Command::Deriv(a) => (&a.output, commands::deriv(a)?),
        Command::Check(a) => (&a.output, commands::check(a)?),
        Command::ScanConjecture(a) => (&a.output, commands::scan_conjecture(a)?),
        Command::Sweep(a) => (&a.output, commands::sweep(a)?),
    };
    if out.timing && report.wall_time.is_none() {
        report.wall_time = Some(start.elapsed());
    }
    emit(out, &report.render(out.format))?;
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
