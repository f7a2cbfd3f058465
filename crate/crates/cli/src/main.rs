//! `qmag` — command-line driver for the noisy-circuit / CNN surrogate
//! experiment pipeline.
//!
//! Subcommands cover the full loop: `gen` simulates random Trotter circuits
//! into JSONL datasets, `train` fits a convolutional regressor, `eval`
//! scores models and baselines as CSV, `scatter` dumps per-circuit
//! predictions, and `sweep` loops generate→train→eval over `p_noise` or the
//! training-set size.
//!
//! Every command is deterministic given `--seed` (bitwise-identical output
//! files on reruns, independent of `--threads`). Exit codes: 0 success,
//! 2 usage error, 3 I/O or file-format error, 4 numerical failure.

mod cmd_eval;
mod cmd_gen;
mod cmd_scatter;
mod cmd_sweep;
mod cmd_train;
mod common;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "qmag",
    version,
    about = "Simulate noisy Trotterized Ising circuits and train magnetization surrogates"
)]
pub struct Cli {
    /// Master random seed; all randomness derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads for simulation (0 = one per core). Results do not
    /// depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// JSON noise-model configuration file (defaults to the built-in model).
    #[arg(long, global = true, value_name = "PATH")]
    pub noise_config: Option<PathBuf>,

    /// JSON chip-graph override file (defaults to the built-in 16-qubit
    /// device graph).
    #[arg(long, global = true, value_name = "PATH")]
    pub chip: Option<PathBuf>,

    /// Output file written by the subcommand.
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a dataset of simulated circuit records (JSONL).
    Gen(GenArgs),
    /// Train a CNN regressor on a dataset (model file + history JSON).
    Train(TrainArgs),
    /// Score models and baselines on a test dataset (CSV).
    Eval(EvalArgs),
    /// Per-circuit predictions for scatter plots (CSV).
    Scatter(ScatterArgs),
    /// Loop generate→train→eval over p_noise or the training-set size (CSV).
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum ConfigArg {
    #[value(alias = "a")]
    A,
    #[value(alias = "b")]
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputsArg {
    /// Channels [q/10, theta, z_noisy].
    Hybrid,
    /// Channels [q/10, theta].
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    /// Kraus trajectory averaging of exact per-qubit <Z>.
    Trajectory,
    /// Trajectory sampling with single-shot bitstring readout.
    Shots,
    /// Exact density-matrix evolution (small sections only).
    Density,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    F64,
    F32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepVarArg {
    /// Two-qubit noise scale p_noise.
    PNoise,
    /// Training-set size K_train.
    KTrain,
}

/// Estimator selection shared by commands that simulate noise.
#[derive(Args, Clone, Copy, Debug)]
pub struct EstimatorFlags {
    /// Noisy-expectation estimator.
    #[arg(long, value_enum, default_value_t = EstimatorArg::Trajectory)]
    pub estimator: EstimatorArg,

    /// Trajectories per circuit for the trajectory estimator.
    #[arg(long, default_value_t = 512)]
    pub n_traj: usize,

    /// Shots per circuit for the shots estimator.
    #[arg(long, default_value_t = 4096)]
    pub n_shots: usize,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Circuit configuration: A (spatial angles) or B (temporal angles).
    #[arg(long, value_enum)]
    pub config: ConfigArg,

    /// Section sizes, e.g. "6..10" (inclusive) or "4,6,7".
    #[arg(long, value_name = "SIZES")]
    pub n: String,

    /// Trotter layers P.
    #[arg(long)]
    pub layers: usize,

    /// Number of records to generate.
    #[arg(long)]
    pub k: usize,

    /// Two-qubit noise scale in [0, 1] (overrides the config file value).
    #[arg(long, value_name = "P")]
    pub p_noise: Option<f64>,

    #[command(flatten)]
    pub est: EstimatorFlags,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Training dataset (JSONL).
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Validation dataset (JSONL); when absent a fraction of --data is
    /// held out.
    #[arg(long, value_name = "PATH")]
    pub val: Option<PathBuf>,

    /// Held-out validation fraction used when --val is absent.
    #[arg(long, default_value_t = 0.1)]
    pub val_frac: f64,

    /// Input channels fed to the network.
    #[arg(long, value_enum, default_value_t = InputsArg::Hybrid)]
    pub inputs: InputsArg,

    /// Maximum training epochs.
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,

    #[arg(long, default_value_t = 256)]
    pub batch_size: usize,

    /// Epochs without validation improvement before early stopping.
    #[arg(long, default_value_t = 10)]
    pub patience: usize,

    /// Adam learning rate.
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,

    /// Training float width.
    #[arg(long, value_enum, default_value_t = PrecisionArg::F64)]
    pub precision: PrecisionArg,

    /// Path for the loss-history JSON (default: "<out>.history.json").
    #[arg(long, value_name = "PATH")]
    pub history: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Model file(s) to score; repeat the flag for several models.
    #[arg(long, value_name = "PATH", required = true)]
    pub model: Vec<PathBuf>,

    /// Test dataset (JSONL).
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Also score the zero-noise-extrapolation baseline (re-simulates each
    /// test circuit at scale factors 1,2,3).
    #[arg(long)]
    pub zne: bool,

    /// Noise scale for the ZNE baseline; defaults to the records' value.
    #[arg(long, value_name = "P")]
    pub p_noise: Option<f64>,

    #[command(flatten)]
    pub est: EstimatorFlags,
}

#[derive(Args, Debug)]
pub struct ScatterArgs {
    /// Model whose predictions fill the "cnn" column.
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,

    /// Test dataset (JSONL).
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,

    /// Noise scale for the ZNE column; defaults to the records' value.
    #[arg(long, value_name = "P")]
    pub p_noise: Option<f64>,

    #[command(flatten)]
    pub est: EstimatorFlags,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Swept variable.
    #[arg(long, value_enum)]
    pub var: SweepVarArg,

    /// Comma-separated swept values, e.g. "0,0.25,0.5,1.0".
    #[arg(long, value_name = "LIST")]
    pub values: String,

    #[arg(long, value_enum)]
    pub config: ConfigArg,

    /// Training section sizes, e.g. "4..7".
    #[arg(long, value_name = "SIZES")]
    pub n: String,

    /// Test section size.
    #[arg(long)]
    pub n_test: usize,

    #[arg(long)]
    pub layers: usize,

    /// Training records per run (fixed when sweeping p_noise).
    #[arg(long, default_value_t = 5000)]
    pub k: usize,

    /// Test records per run.
    #[arg(long, default_value_t = 500)]
    pub k_test: usize,

    /// Comma-separated repetition seeds.
    #[arg(long, default_value = "1,2,3")]
    pub seeds: String,

    /// Fixed noise scale when sweeping k_train.
    #[arg(long, value_name = "P")]
    pub p_noise: Option<f64>,

    /// Also score the ZNE baseline per swept point.
    #[arg(long)]
    pub zne: bool,

    /// Held-out validation fraction.
    #[arg(long, default_value_t = 0.1)]
    pub val_frac: f64,

    #[arg(long, default_value_t = 200)]
    pub epochs: usize,

    #[arg(long, default_value_t = 256)]
    pub batch_size: usize,

    #[arg(long, default_value_t = 10)]
    pub patience: usize,

    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,

    #[arg(long, value_enum, default_value_t = PrecisionArg::F64)]
    pub precision: PrecisionArg,

    #[command(flatten)]
    pub est: EstimatorFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignore failure: the global pool can only be set once (e.g. tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen::run(&cli, args),
        Command::Train(args) => cmd_train::run(&cli, args),
        Command::Eval(args) => cmd_eval::run(&cli, args),
        Command::Scatter(args) => cmd_scatter::run(&cli, args),
        Command::Sweep(args) => cmd_sweep::run(&cli, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_usage() {
                ExitCode::from(2)
            } else if err.is_io() {
                ExitCode::from(3)
            } else {
                ExitCode::from(4)
            }
        }
    }
}
