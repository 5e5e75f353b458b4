use std::process::ExitCode;

use clap::Parser;
use rewlab_cli::commands::{run, Cli, UsageError, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!("{}", out.render(cli.global.json));
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<UsageError>().is_some() { EXIT_USAGE } else { 1 };
            ExitCode::from(code as u8)
        }
    }
}
