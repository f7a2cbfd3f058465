//! Helpers shared by the subcommands: argument parsing, file loading,
//! metric aggregation, and CSV assembly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qmag_core::chip::ChipGraph;
use qmag_core::circuits::Config;
use qmag_core::cnn::{
    predict_batch, save_model, train, ArchSpec, CnnModel, InputKind, TrainHistory, TrainParams,
};
use qmag_core::dataset::{circuit_from_record, derive_seed, CircuitRecord};
use qmag_core::metrics::EvalReport;
use qmag_core::noise::{NoiseConfig, NoiseModel};
use qmag_core::scalar::{dbl, Real};
use qmag_core::sim::Estimator;
use qmag_core::zne::{zne_estimate, ZneOptions, DEFAULT_SCALE_FACTORS};
use qmag_core::{Error, Result};

use crate::{Cli, ConfigArg, EstimatorArg, EstimatorFlags, InputsArg, PrecisionArg};

/// Seed streams carved from a command's master seed with
/// [`qmag_core::dataset::derive_seed`], so that independent random decisions
/// never share a generator.
pub mod streams {
    /// Epoch shuffling during training.
    pub const SHUFFLE: u64 = 1;
    /// Train/validation split.
    pub const VAL_SPLIT: u64 = 2;
    /// Base for per-record ZNE re-simulation.
    pub const ZNE: u64 = 3;
    /// Training-set generation (sweep runs).
    pub const GEN_TRAIN: u64 = 10;
    /// Test-set generation (sweep runs).
    pub const GEN_TEST: u64 = 11;
    /// Hybrid-model weight initialization (sweep runs).
    pub const MODEL_HYBRID: u64 = 13;
    /// Classical-model weight initialization (sweep runs).
    pub const MODEL_CLASSICAL: u64 = 14;
    /// Hybrid-model epoch shuffling (sweep runs).
    pub const SHUFFLE_HYBRID: u64 = 15;
    /// Classical-model epoch shuffling (sweep runs).
    pub const SHUFFLE_CLASSICAL: u64 = 16;
}

/// Returns `--out`, or a usage error naming the flag.
pub fn require_out(cli: &Cli) -> Result<&Path> {
    cli.out
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("--out <PATH> is required".into()))
}

/// Loads the chip graph from `--chip`, falling back to the built-in device.
pub fn load_graph(cli: &Cli) -> Result<ChipGraph> {
    match &cli.chip {
        Some(path) => ChipGraph::from_json_file(path),
        None => Ok(ChipGraph::device()),
    }
}

/// Loads `--noise-config` (or the default model) and applies the `p_noise`
/// override when given.
pub fn load_noise_config(cli: &Cli, p_noise: Option<f64>) -> Result<NoiseConfig> {
    let mut config = match &cli.noise_config {
        Some(path) => NoiseConfig::from_json_file(path)?,
        None => NoiseConfig::default(),
    };
    if let Some(p) = p_noise {
        config.p_noise = p;
    }
    Ok(config)
}

pub fn config_of(arg: ConfigArg) -> Config {
    match arg {
        ConfigArg::A => Config::A,
        ConfigArg::B => Config::B,
    }
}

pub fn input_kind_of(arg: InputsArg) -> InputKind {
    match arg {
        InputsArg::Hybrid => InputKind::Hybrid,
        InputsArg::Classical => InputKind::Classical,
    }
}

pub fn estimator_of(flags: &EstimatorFlags) -> Estimator {
    match flags.estimator {
        EstimatorArg::Trajectory => Estimator::Trajectory {
            n_traj: flags.n_traj,
        },
        EstimatorArg::Shots => Estimator::Shots {
            n_shots: flags.n_shots,
        },
        EstimatorArg::Density => Estimator::Density,
    }
}

fn invalid<T>(what: &str, text: &str) -> Result<T> {
    Err(Error::InvalidParameter(format!("{what}: {text:?}")))
}

/// Parses section sizes given as an inclusive range `"a..b"` or a comma
/// list `"a,b,c"`.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let (Ok(lo), Ok(hi)) = (lo.trim().parse::<usize>(), hi.trim().parse::<usize>()) else {
            return invalid("bad size range", text);
        };
        if lo > hi {
            return invalid("empty size range", text);
        }
        return Ok((lo..=hi).collect());
    }
    let sizes: Vec<usize> = text
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .or_else(|_| invalid("bad size list", text))?;
    if sizes.is_empty() {
        return invalid("empty size list", text);
    }
    Ok(sizes)
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|part| part.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .or_else(|_| invalid("bad value list", text))?;
    if values.is_empty() {
        return invalid("empty value list", text);
    }
    Ok(values)
}

pub fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    let values: Vec<u64> = text
        .split(',')
        .map(|part| part.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .or_else(|_| invalid("bad seed list", text))?;
    if values.is_empty() {
        return invalid("empty seed list", text);
    }
    Ok(values)
}

/// Writes `text` to `path`, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Default sibling path for auxiliary files: `<out>` plus `suffix`.
pub fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

/// One row of an evaluation CSV: metrics of `method` on the slice of the
/// test set with section size `n` (`None` = every record).
pub struct MetricRow {
    pub n: Option<usize>,
    pub method: String,
    pub report: EvalReport<f64>,
    pub seed: u64,
}

impl MetricRow {
    pub fn n_label(&self) -> String {
        match self.n {
            Some(n) => n.to_string(),
            None => "all".into(),
        }
    }
}

/// Computes per-size rows plus an overall row for one method.
///
/// `ns`, `y`, and `y_hat` are parallel: section size, target, and prediction
/// of each test record. Rows are ordered by ascending `n`, overall row last.
pub fn method_rows(
    ns: &[usize],
    y: &[f64],
    y_hat: &[f64],
    method: &str,
    seed: u64,
) -> Result<Vec<MetricRow>> {
    if ns.len() != y.len() || y.len() != y_hat.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: y_hat.len(),
        });
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &n) in ns.iter().enumerate() {
        groups.entry(n).or_default().push(i);
    }
    let mut rows = Vec::new();
    if groups.len() > 1 {
        for (&n, indices) in &groups {
            let yg: Vec<f64> = indices.iter().map(|&i| y[i]).collect();
            let pg: Vec<f64> = indices.iter().map(|&i| y_hat[i]).collect();
            rows.push(MetricRow {
                n: Some(n),
                method: method.into(),
                report: EvalReport::new(&yg, &pg)?,
                seed,
            });
        }
    }
    rows.push(MetricRow {
        n: None,
        method: method.into(),
        report: EvalReport::new(y, y_hat)?,
        seed,
    });
    Ok(rows)
}

pub const METRIC_HEADER: &str = "n,method,r2,one_minus_r2,pearson,k_test,seed";

pub fn metric_csv_line(row: &MetricRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        row.n_label(),
        row.method,
        row.report.r2,
        row.report.one_minus_r2,
        row.report.pearson,
        row.report.k_test,
        row.seed
    )
}

/// Resolves the noise scale for re-simulation: an explicit `--p-noise` wins,
/// otherwise every record must agree on the scale it was generated with.
pub fn resolve_p_noise(records: &[CircuitRecord<f64>], flag: Option<f64>) -> Result<f64> {
    if let Some(p) = flag {
        return Ok(p);
    }
    let first = records.first().ok_or(Error::EmptyInput)?;
    if records.iter().any(|r| r.p_noise != first.p_noise) {
        return Err(Error::InvalidParameter(
            "records were generated with mixed p_noise values; pass --p-noise".into(),
        ));
    }
    Ok(first.p_noise)
}

/// Runs zero-noise extrapolation on every record's circuit, in record order.
///
/// Record `i` uses an RNG seeded from `derive_seed(seed_base, i)`, so the
/// result is deterministic and independent of thread scheduling.
pub fn zne_predictions(
    records: &[CircuitRecord<f64>],
    graph: &ChipGraph,
    noise: &NoiseModel<f64>,
    estimator: Estimator,
    seed_base: u64,
) -> Result<Vec<f64>> {
    let options = ZneOptions {
        scale_factors: DEFAULT_SCALE_FACTORS.to_vec(),
        estimator,
    };
    records
        .par_iter()
        .enumerate()
        .map(|(i, record)| {
            let circuit = circuit_from_record(record, graph)?.transpile()?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed_base, i as u64));
            Ok(zne_estimate(&circuit, noise, &options, &mut rng)?.extrapolated)
        })
        .collect()
}

/// Returns the configuration shared by every record, or a usage error when
/// the dataset mixes configurations.
pub fn dataset_config(records: &[CircuitRecord<f64>]) -> Result<Config> {
    let first = records.first().ok_or(Error::EmptyInput)?;
    if records.iter().any(|r| r.config != first.config) {
        return Err(Error::InvalidParameter(
            "dataset mixes circuit configurations".into(),
        ));
    }
    Ok(first.config)
}

/// One CNN training job: data, reproducibility seeds, and hyperparameters.
/// Datasets are always simulated in `f64`; `precision` picks the width used
/// for the network itself.
pub struct FitRequest<'a> {
    pub precision: PrecisionArg,
    pub kind: InputKind,
    /// Seeds the weight initialization.
    pub model_seed: u64,
    /// Seeds the epoch shuffling.
    pub shuffle_seed: u64,
    pub params: TrainParams,
    pub train: &'a [CircuitRecord<f64>],
    pub val: &'a [CircuitRecord<f64>],
    /// Records to predict after training (may be empty).
    pub test: &'a [CircuitRecord<f64>],
    /// Model file to write, if any.
    pub save_to: Option<&'a Path>,
}

pub struct FitOutcome {
    /// Predictions on `test`, in order, widened to `f64`.
    pub predictions: Vec<f64>,
    pub history: TrainHistory,
    pub param_count: usize,
}

/// Trains a freshly initialized network per `request` and predicts the test
/// records with the restored best weights.
pub fn fit(request: &FitRequest) -> Result<FitOutcome> {
    match request.precision {
        PrecisionArg::F64 => fit_generic::<f64>(request),
        PrecisionArg::F32 => fit_generic::<f32>(request),
    }
}

fn fit_generic<T: Real>(request: &FitRequest) -> Result<FitOutcome> {
    let config = dataset_config(request.train)?;
    let arch = ArchSpec::default_for(config, request.kind);
    let mut model = CnnModel::<T>::new(arch, request.model_seed)?;
    let convert =
        |records: &[CircuitRecord<f64>]| -> Vec<CircuitRecord<T>> {
            records.iter().map(CircuitRecord::convert).collect()
        };
    let train_records = convert(request.train);
    let val_records = convert(request.val);
    let mut rng = ChaCha8Rng::seed_from_u64(request.shuffle_seed);
    let history = train(
        &mut model,
        &train_records,
        &val_records,
        &request.params,
        &mut rng,
    )?;
    let predictions = predict_batch(&model, &convert(request.test))?
        .into_iter()
        .map(dbl)
        .collect();
    if let Some(path) = request.save_to {
        save_model(&model, path)?;
    }
    Ok(FitOutcome {
        predictions,
        history,
        param_count: model.param_count(),
    })
}

/// Prints a `mean ± std` summary of `1 - R^2` per `(n, method)` group for
/// every group with more than one seed. `std` is the sample standard
/// deviation over seeds.
pub fn print_seed_summary(rows: &[MetricRow]) {
    let mut groups: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.n_label(), row.method.clone()))
            .or_default()
            .push(row.report.one_minus_r2);
    }
    for ((n, method), values) in &groups {
        if values.len() < 2 {
            continue;
        }
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        println!(
            "n={n} method={method}: 1-R^2 = {mean:.6} +/- {:.6} over {} seeds",
            var.sqrt(),
            values.len()
        );
    }
}
