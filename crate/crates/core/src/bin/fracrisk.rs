use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fracrisk::cli::{load, run, Command};

/// Generalized fractional counting and risk process toolkit.
#[derive(Parser)]
#[command(name = "fracrisk", version)]
struct Args {
    /// Command to run.
    #[arg(value_enum)]
    command: Command,
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding `[sim] seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output prefix, overriding `[output] prefix`.
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result =
        load(args.command, &args.config, args.seed, args.out).and_then(|config| run(&config));
    match result {
        Ok(out) => {
            println!("{}", out.csv.display());
            println!("{}", out.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fracrisk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
