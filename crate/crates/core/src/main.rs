use std::path::PathBuf;
use std::process::ExitCode;

use afsa_beam::harness::{self, AlgorithmChoice, ExperimentConfig, Sweep, SweepAxis};
use anyhow::Context;
use clap::{Args, Parser, Subcommand};

/// Beam training for RIS-assisted ISAC with artificial fish swarms, PSO and ACO.
#[derive(Parser)]
#[command(name = "afsa-beam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Run a config across values of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Config file path, or the name of a shipped config (paper_fig2, ..., desk).
    config: String,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    algorithm: Option<AlgorithmChoice>,
    /// Give PSO and ACO the echo budget AFSA used on the same seed.
    #[arg(long)]
    budget_match: bool,
}

impl Common {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut config =
            harness::resolve_config(&self.config).with_context(|| format!("loading config `{}`", self.config))?;
        if let Some(n) = self.seeds {
            config.n_seeds = n;
        }
        if let Some(dir) = &self.out {
            config.output.dir = dir.clone();
        }
        if let Some(kind) = self.algorithm {
            config.algorithm.kind = kind;
        }
        if self.budget_match {
            config.algorithm.budget_match = true;
        }
        Ok(config)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match cli.command {
        Command::Run { common } => common.load()?,
        Command::Sweep { common, axis, values } => {
            let mut config = common.load()?;
            config.sweep = Some(Sweep { axis, values });
            config
        }
    };
    config.validate()?;
    let records = harness::run_experiment(&config)?;
    let summary = harness::summarize(&records)?;
    for row in &summary {
        let point = match row.sweep_value {
            Some(v) => format!(" {}={v}", row.sweep_axis.map_or("", |a| a.name())),
            None => String::new(),
        };
        println!(
            "{:<5}{point}  median {:.4e} W ({:.2} dB)  feasible {:.0}%  iters-to-95 {}",
            row.algorithm,
            row.median_fitness_w,
            row.median_fitness_db,
            100.0 * row.feasibility_rate,
            row.median_iters_to_95
        );
    }
    println!("wrote {} runs to {}", records.len(), config.output.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
