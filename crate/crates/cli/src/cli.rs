use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qbind::circuit::{AnsatzId, Encoding};
use qbind::model::Architecture;

#[derive(Debug, Parser)]
#[command(name = "qbind", version, about = "Hybrid quantum regression experiments")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML file with per-command sections; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 means one per core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset in the sample CSV format.
    Generate(GenerateArgs),
    /// Train one variant and write its history and checkpoint.
    Train(TrainArgs),
    /// Train a grid of variants and write per-architecture reports.
    Grid(GridArgs),
    /// Print a circuit's gate listing and complexity metrics.
    InspectCircuit(InspectArgs),
    /// Compare analytic gradients against central differences for every variant.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output file; defaults to `<out>/samples.csv`.
    #[arg(long, value_name = "PATH")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct DataArgs {
    /// Training CSV, split into train and test sides.
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    /// Extra evaluation set, `NAME=PATH` or just `PATH`; repeatable.
    #[arg(long = "eval", value_name = "NAME=PATH")]
    pub evals: Vec<String>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Size of the synthetic set used when no `--data` is given.
    #[arg(long, value_name = "N")]
    pub synthetic: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct TrainingArgs {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long = "lr")]
    pub lr_init: Option<f64>,
    #[arg(long)]
    pub lr_min: Option<f64>,
    #[arg(long = "patience")]
    pub scheduler_patience: Option<usize>,
    #[arg(long = "factor")]
    pub scheduler_factor: Option<f64>,
    #[arg(long = "threshold")]
    pub improvement_threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub architecture: Option<Architecture>,
    #[arg(long)]
    pub ansatz: Option<AnsatzId>,
    #[arg(long)]
    pub encoding: Option<Encoding>,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    pub architectures: Option<Vec<Architecture>>,
    #[arg(long, value_delimiter = ',')]
    pub ansatze: Option<Vec<AnsatzId>>,
    #[arg(long, value_delimiter = ',')]
    pub encodings: Option<Vec<Encoding>>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Build the models and report parameter counts without training.
    #[arg(long)]
    pub construct_only: bool,
    /// Override a baseline RMSE, `NAME=VALUE`; repeatable.
    #[arg(long = "baseline", value_name = "NAME=VALUE")]
    pub baseline: Vec<String>,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub ansatz: Option<AnsatzId>,
    #[arg(long)]
    pub encoding: Option<Encoding>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Compare against the published complexity rows; exits 3 on mismatch.
    #[arg(long)]
    pub check_table1: bool,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Random draws per variant.
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Central-difference step.
    #[arg(long)]
    pub step: Option<f64>,
}
