use std::process::ExitCode;

use clap::Parser;
use plap_cli::{run, Cli};

fn main() -> ExitCode {
    // usage errors are input errors (1); clap's own default of 2 is taken
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("plap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
