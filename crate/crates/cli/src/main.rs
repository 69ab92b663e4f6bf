use std::process::ExitCode;

use clap::Parser;
use pivotality_cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors by itself.
    let cli = Cli::parse();
    ExitCode::from(run(&cli) as u8)
}
