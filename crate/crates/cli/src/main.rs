use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rmtnet_cli::{commands, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "rmtnet", version, about = "Reject-aware multi-task credit scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the data and model seeds.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset with a simulated approval policy.
    GenData(Common),
    /// Fit the configured models and save snapshots.
    Train(Common),
    /// Score saved snapshots on the test split.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Directory holding the snapshots; defaults to --out.
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Re-render table.txt from metrics.json in --out.
    Summary {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Every model over every seed and epsilon of the [bench] section;
    /// --seed narrows the run to that one seed.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Worker threads; 0 uses every available core.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    Ok(match common.seed {
        Some(seed) => config.with_seed(seed),
        None => config,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenData(common) => {
            let facts = commands::gen_data(&load(&common)?, &common.out)?;
            for r in &facts.ratios {
                println!(
                    "policy {}: {} rows, rejection ratio {:.4}, default ratio approved {} rejected {}",
                    r.policy,
                    r.rows,
                    r.rejection_ratio,
                    fmt_ratio(r.approved_default_ratio),
                    fmt_ratio(r.rejected_default_ratio)
                );
            }
        }
        Command::Train(common) => {
            for f in commands::train(&load(&common)?, &common.out)? {
                println!(
                    "{}: best epoch {}, validation KS {:.4}",
                    f.kind, f.log.best_epoch, f.log.best_val_ks
                );
            }
        }
        Command::Evaluate { common, models } => {
            let models = models.unwrap_or_else(|| common.out.clone());
            let file = commands::evaluate(&load(&common)?, &models, &common.out)?;
            print!("{}", commands::render_summary(&file));
        }
        Command::Summary { out } => print!("{}", commands::summary(&out)?),
        Command::Bench { common, jobs } => {
            let jobs = if jobs == 0 {
                std::thread::available_parallelism().map_or(1, usize::from)
            } else {
                jobs
            };
            let mut config = load(&common)?;
            if let Some(seed) = common.seed {
                config.bench.seeds = vec![seed];
            }
            let file = commands::bench(&config, jobs, &common.out)?;
            print!("{}", commands::render_summary(&file));
        }
    }
    Ok(())
}

fn fmt_ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
