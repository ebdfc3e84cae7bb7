use std::process::ExitCode;

use clap::Parser;
use greybox_cli::cli::{run, Cli};
use greybox_cli::exit;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit::code_for(&err))
        }
    }
}
