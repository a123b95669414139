use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "wez", version, about = "Maximum launch range simulation and surrogate pipeline")]
pub struct Cli {
    /// Print the default configuration of one kind as JSON and exit.
    #[arg(long, value_enum, value_name = "KIND")]
    pub print_config: Option<ConfigKind>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConfigKind {
    /// Design bounds, size, seed and maximin iterations (`design --config`).
    Design,
    /// Missile and simulator constants (`simulate --missile`).
    Missile,
    /// Filter rules (`filter --rules`, `stats --rules`).
    Filter,
    /// Training hyperparameters and split (`train --config`).
    Train,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximin Latin hypercube design over the scenario variables.
    Design {
        #[arg(long)]
        samples: usize,
        /// Falls back to WEZ_SEED, then the config file, then 0.
        #[arg(long, env = "WEZ_SEED")]
        seed: Option<u64>,
        /// Maximin swap attempts.
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label every design row with its maximum launch range.
    Simulate {
        #[arg(long)]
        design: PathBuf,
        /// Missile configuration; built-in defaults when omitted.
        #[arg(long)]
        missile: Option<PathBuf>,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Descriptive statistics and the correlation matrix of a dataset.
    Stats {
        #[arg(long)]
        data: PathBuf,
        /// Apply the filter rules first.
        #[arg(long)]
        filter: bool,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Activation floor, upper fence and plausibility rules.
    Filter {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Train the surrogate on a filtered dataset.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Metrics report; defaults to metrics.json beside the model.
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Also run k-fold cross-validation on the training partition.
        #[arg(long)]
        cv: bool,
        /// Seeds both the split and the network; falls back to WEZ_SEED.
        #[arg(long, env = "WEZ_SEED")]
        seed: Option<u64>,
    },
    /// Predicted maximum range from -60 to +60 deg off-boresight in 0.5 deg steps.
    Sweep {
        #[arg(long)]
        model: PathBuf,
        /// Base scenario JSON; its rgt_tgt is ignored.
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}
