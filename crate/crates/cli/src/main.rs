use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vrcfr::experiment::{self, ExperimentError, RunConfig};

/// Runs MCCFR variance-reduction experiments and writes CSV results.
#[derive(Parser)]
#[command(name = "vrcfr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of a config; writes seed-<n>/metrics.csv, manifest.txt, profile.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mean and 95% CI per checkpoint over runs with matching checkpoints.
    Aggregate {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train, freeze, and write per-pair counterfactual value variance.
    Variance {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Best-response values and exploitability of a profile CSV.
    Bestresponse {
        #[arg(long)]
        game: String,
        #[arg(long)]
        profile: PathBuf,
    },
}

fn load_config(path: &PathBuf) -> Result<RunConfig, ExperimentError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Run { config, out } => {
            let config = load_config(&config)?;
            for run in experiment::run_experiment(&config, &out)? {
                let last = run.rows.last().expect("at least one checkpoint");
                println!(
                    "seed {}: iteration {} exploitability {}",
                    last.seed, last.iteration, last.exploitability
                );
            }
        }
        Command::Aggregate { inputs, out } => {
            let rows = experiment::aggregate(&inputs, &out)?;
            println!("wrote {} checkpoints to {}", rows.len(), out.display());
        }
        Command::Variance { config, out } => {
            let config = load_config(&config)?;
            for (seed, report) in config.seeds.iter().zip(experiment::run_variance(&config, &out)?) {
                println!("seed {seed}: mean cfv variance {}", report.mean);
            }
        }
        Command::Bestresponse { game, profile } => {
            let r = experiment::best_response_report(&game, &profile)?;
            println!("best_response_p1={}", r.player_one);
            println!("best_response_p2={}", r.player_two);
            println!("exploitability={}", r.exploitability);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
