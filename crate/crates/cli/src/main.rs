use causalthermo_cli::app::{run, Cli};
use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
