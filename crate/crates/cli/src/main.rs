mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => match output::emit(&cli, &outcome) {
            Ok(()) if outcome.verdict => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(2),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            let negative = matches!(e.downcast_ref::<rankpres::Error>(), Some(rankpres::Error::NotAPreserver(_)));
            ExitCode::from(if negative { 2 } else { 1 })
        }
    }
}
