use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use ealab_cli::{commands::stdout_result, execute, Cli, UsageError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = execute(&cli, &mut out).and_then(|()| out.flush().map_err(Into::into));
    match stdout_result(result) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
