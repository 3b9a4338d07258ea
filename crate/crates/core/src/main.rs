use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lca_tfa::experiment::{identity_table, run_path, OUTPUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "lca-tfa", version, about = "Time-frequency experiments on finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    #[command(after_help = format!("The output directory can be overridden with {OUTPUT_DIR_ENV}."))]
    Run { config: PathBuf },
    /// Print every registered check with its default tolerance.
    ListIdentities,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListIdentities => {
            print!("{}", identity_table());
            ExitCode::SUCCESS
        }
        Command::Run { config } => {
            let (code, outcome) = run_path(&config);
            match outcome {
                Ok(summary) => {
                    for c in &summary.checks {
                        let status = if c.passed { "pass" } else { "FAIL" };
                        println!("{status} {:<28} {:>12.3e} <= {:.1e}", c.id, c.value, c.tolerance);
                    }
                    if !summary.passed {
                        eprintln!("failed checks: {}", summary.failures.join(", "));
                    }
                }
                Err(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(code as u8)
        }
    }
}
