use std::process::ExitCode;

use clap::Parser;
use wasa_service::cli::{run, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let code = run(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
