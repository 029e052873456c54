use std::process::ExitCode;

use clap::Parser;
use zeta_mds_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.stage.exit_code())
        }
    }
}
