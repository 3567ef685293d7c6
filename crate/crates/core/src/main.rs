//! `saccel`: run the named experiments from a JSON config.
//!
//! Exit status: 0 when every gated report passed, 1 when one failed,
//! 2 for an invalid config or an I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use saccel::experiments::{self, ExperimentConfig};

#[derive(Parser)]
#[command(name = "saccel", about = "Monte Carlo laboratory for stochastic acceleration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. `--set ensemble_size=200`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory; defaults to the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available experiments.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { json } => {
            if json {
                println!("{}", experiments::list_json());
            } else {
                print!("{}", experiments::list_text());
            }
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("saccel {}", experiments::VERSION);
            ExitCode::SUCCESS
        }
        Command::Run { config, sets, threads, out } => {
            let seed = std::env::var("SACCEL_SEED").ok();
            let result = ExperimentConfig::load(&config, seed.as_deref(), &sets)
                .and_then(|c| experiments::run(&c, out.as_deref(), threads));
            match result {
                Ok(summary) => {
                    for r in &summary.outcome.reports {
                        let verdict = match (r.is_gating(), r.passed) {
                            (false, _) => "info",
                            (true, true) => "pass",
                            (true, false) => "FAIL",
                        };
                        eprintln!("{verdict:>4}  {:<40} {:.6}", r.name, r.estimate);
                    }
                    eprintln!("wrote {}", summary.out_dir.display());
                    if summary.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("saccel: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
