//! Command-line front end: analytic curves, outage probabilities,
//! Monte-Carlo runs and the verification suite.
//!
//! Exit codes: 0 success, 1 invariant breach in `verify`, 2 invalid input,
//! 3 numeric or I/O failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use args::{Cli, Command, OutputArgs};
use error::{CliError, CliResult};
use output::{write_to, Output};

fn emit(out: Output, args: &OutputArgs) -> CliResult<()> {
    write_to(args.out.as_deref(), &out.render(args.format))?;
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let verbose = cli.verbose > 0;
    let note = |s: &args::SystemArgs| {
        if let Some(n) = s.zf_rho_note() {
            eprintln!("{n}");
        }
    };
    match &cli.command {
        Command::Edges(a) => emit(commands::edges(a)?, &a.output),
        Command::Rate(a) => {
            note(&a.system);
            emit(commands::rate(a)?, &a.output)
        }
        Command::Pdf(a) => {
            note(&a.system);
            emit(commands::pdf(a)?, &a.output)
        }
        Command::Outage(a) => {
            note(&a.system);
            emit(commands::outage_cmd(a)?, &a.output)
        }
        Command::Weights(a) => {
            note(&a.system);
            emit(commands::weights(a)?, &a.output)
        }
        Command::Mc(a) => {
            note(&a.system);
            let files = commands::mc(a, verbose)?;
            eprintln!("wrote {}", files.histogram.display());
            eprintln!("wrote {}", files.summary.display());
            if let Some(w) = files.weights {
                eprintln!("wrote {}", w.display());
            }
            Ok(())
        }
        Command::Verify(a) => {
            let report = commands::run_verify(a)?;
            write_to(None, &report.render(a.format))?;
            if let Some(path) = &a.report {
                write_to(Some(path), &report.to_json())?;
            }
            if report.pass() {
                Ok(())
            } else {
                let failed: Vec<&str> =
                    report.families.iter().filter(|f| !f.pass()).map(|f| f.name).collect();
                Err(CliError::Verify(failed.join(", ")))
            }
        }
    }
}
