//! `slsdist` — command-line workbench for SLS SAT runtime distributions.

mod args;
mod commands;
mod errors;
mod io_util;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is a
            // usage error.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let result = match &cli.command {
        Command::Generate(a) => commands::generate::run(a),
        Command::Extend(a) => commands::extend::run(a),
        Command::Solve(a) => commands::solve::run(a),
        Command::Experiment(a) => commands::experiment::run(a),
        Command::Fit(a) => commands::fit::run_fit(a),
        Command::Goftest(a) => commands::fit::run_goftest(a),
        Command::RestartAnalyze(a) => commands::restart::run(a),
        Command::SimulateShares(a) => commands::shares::run(a),
        Command::Check(c) => commands::check::run(c),
    };

    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
