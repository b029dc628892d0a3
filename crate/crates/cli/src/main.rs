use std::io::Write;
use std::process::ExitCode;

use antpath_cli::commands::Command;
use antpath_cli::EXIT_CHECK_FAILED;
use clap::Parser;

/// Simulations of ant reinforcement processes on weighted graphs.
#[derive(Debug, Parser)]
#[command(name = "antpath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command.run() {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = serde_json::to_writer_pretty(&mut out, &outcome.summary) {
                if !e.is_io() {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            let _ = writeln!(out);
            if outcome.check_failed {
                eprintln!("error: checks failed");
                ExitCode::from(EXIT_CHECK_FAILED as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
