// SPDX-License-Identifier: MIT OR Apache-2.0

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = npid_cli::Cli::parse();
    match npid_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("npid: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
