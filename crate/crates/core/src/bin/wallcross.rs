use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use wallcross::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => {
            let _ = std::io::stdout().write_all(o.text.as_bytes());
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
