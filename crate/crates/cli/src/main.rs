use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use markov_cli::args::Cli;
use markov_cli::{run, ExitStatus};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(ExitStatus::Usage.code() as u8),
            };
        }
    };

    let status = match run(&cli.command, &cli.run) {
        Ok(outcome) => {
            for n in &outcome.notes {
                eprintln!("mkseries: {n}");
            }
            let written = match &cli.run.output {
                Some(path) => std::fs::write(path, &outcome.body),
                None => std::io::stdout().write_all(outcome.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("mkseries: cannot write report: {e}");
                return ExitCode::from(74);
            }
            outcome.status
        }
        Err(e) => {
            eprintln!("mkseries: {e}");
            e.status
        }
    };
    ExitCode::from(status.code() as u8)
}
