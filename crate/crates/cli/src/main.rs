use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use proxplay_cli::runner::{self, RunOptions, CATALOG};
use proxplay_cli::Scenario;

/// Play, stop and Q operators over prox-regular sets.
#[derive(Parser)]
#[command(name = "proxplay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and run its experiments.
    Run {
        scenario: PathBuf,
        /// Overrides the scenario's output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides the refinement levels of every experiment that has them.
        #[arg(long)]
        levels: Option<u32>,
        /// Overrides the seed of every sampled experiment.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        quiet: bool,
    },
    /// Parse and check a scenario without solving it.
    Validate { scenario: PathBuf },
    /// List the characteristic sets and their prox-regularity radii.
    Catalog,
}

fn execute(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run {
            scenario,
            output_dir,
            levels,
            seed,
            quiet,
        } => {
            let sc = Scenario::load(&scenario)?;
            let opts = RunOptions {
                output_dir,
                levels,
                seed,
            };
            let outcome = runner::run(&sc, &opts)?;
            if !quiet {
                println!("trajectory: {}", outcome.trajectory_csv.display());
                for r in &outcome.reports {
                    println!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.name);
                }
                println!("report: {}", outcome.report_txt.display());
            }
            Ok(if outcome.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Validate { scenario } => {
            let sc = Scenario::load(&scenario)?;
            print!("{}", runner::summary(&sc)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Catalog => {
            print!("{CATALOG}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    // usage errors are operational errors (exit 1); 2 is reserved for failed experiments
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
