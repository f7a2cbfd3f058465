//! `qmag sweep` — generate→train→eval loops over a swept variable.
//!
//! For every `(value, seed)` pair the command simulates fresh train/test
//! sets, trains one hybrid and one classical model, and scores both against
//! the noisy baseline (and optionally ZNE) on the held-out test size. The
//! long-form CSV has one row per `(value, seed, method)`.
//!
//! Within one repetition seed the circuits are identical across swept
//! values — record seeds depend only on the seed and the record index — so
//! sweeping `p-noise` varies the noise on a fixed circuit population and
//! sweeping `k-train` grows the training set by extension.

use std::time::Instant;

use qmag_core::cnn::{AdamParams, InputKind, TrainParams};
use qmag_core::dataset::{derive_seed, generate, split, CircuitRecord, GenerateParams};
use qmag_core::metrics::EvalReport;
use qmag_core::{Error, Result};

use crate::cmd_eval::method_name;
use crate::common::{self, streams, FitRequest};
use crate::{Cli, SweepArgs, SweepVarArg};

const SWEEP_HEADER: &str = "var,value,n,method,r2,one_minus_r2,pearson,k_test,seed";

struct RunResult {
    method: &'static str,
    report: EvalReport<f64>,
}

pub fn run(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let out = common::require_out(cli)?;
    if !(0.0..1.0).contains(&args.val_frac) {
        return Err(Error::InvalidParameter(format!(
            "--val-frac must be in [0, 1), got {}",
            args.val_frac
        )));
    }
    let graph = common::load_graph(cli)?;
    let sizes = common::parse_sizes(&args.n)?;
    let seeds = common::parse_u64_list(&args.seeds)?;
    let values = common::parse_f64_list(&args.values)?;
    if args.var == SweepVarArg::KTrain {
        for &v in &values {
            if v < 1.0 || v.fract() != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "k-train values must be positive integers, got {v}"
                )));
            }
        }
    }
    let (var_name, config) = match args.var {
        SweepVarArg::PNoise => ("p_noise", common::config_of(args.config)),
        SweepVarArg::KTrain => ("k_train", common::config_of(args.config)),
    };
    let estimator = common::estimator_of(&args.est);
    let params = TrainParams {
        adam: AdamParams {
            learning_rate: args.lr,
            ..AdamParams::default()
        },
        batch_size: args.batch_size,
        max_epochs: args.epochs,
        patience: args.patience,
    };

    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for &value in &values {
        for &rep_seed in &seeds {
            let start = Instant::now();
            let results = run_one(cli, args, &graph, &sizes, config, estimator, &params, value, rep_seed)?;
            let value_label = match args.var {
                SweepVarArg::KTrain => format!("{}", value as u64),
                SweepVarArg::PNoise => format!("{value}"),
            };
            let mut summary = String::new();
            for r in &results {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    var_name,
                    value_label,
                    args.n_test,
                    r.method,
                    r.report.r2,
                    r.report.one_minus_r2,
                    r.report.pearson,
                    r.report.k_test,
                    rep_seed
                ));
                summary.push_str(&format!(" {}={:.4}", r.method, r.report.one_minus_r2));
            }
            println!(
                "sweep {var_name}={value_label} seed={rep_seed}: 1-R^2{summary} ({:.2}s)",
                start.elapsed().as_secs_f64()
            );
        }
    }
    common::write_text(out, &csv)?;
    println!("sweep: {} runs -> {}", values.len() * seeds.len(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_one(
    cli: &Cli,
    args: &SweepArgs,
    graph: &qmag_core::chip::ChipGraph,
    sizes: &[usize],
    config: qmag_core::circuits::Config,
    estimator: qmag_core::sim::Estimator,
    params: &TrainParams,
    value: f64,
    rep_seed: u64,
) -> Result<Vec<RunResult>> {
    let master = derive_seed(cli.seed, rep_seed);
    let p_noise = match args.var {
        SweepVarArg::PNoise => Some(value),
        SweepVarArg::KTrain => args.p_noise,
    };
    let k_train = match args.var {
        SweepVarArg::KTrain => value as usize,
        SweepVarArg::PNoise => args.k,
    };
    let noise = common::load_noise_config(cli, p_noise)?.build::<f64>(graph)?;

    let gen_train = GenerateParams::new(config, sizes.to_vec(), args.layers, k_train)
        .with_estimator(estimator);
    let train_all = generate(&gen_train, graph, &noise, derive_seed(master, streams::GEN_TRAIN))?;
    let gen_test = GenerateParams::new(config, vec![args.n_test], args.layers, args.k_test)
        .with_estimator(estimator);
    let test = generate(&gen_test, graph, &noise, derive_seed(master, streams::GEN_TEST))?;

    let (train_records, val_records): (Vec<CircuitRecord<f64>>, Vec<CircuitRecord<f64>>) =
        if args.val_frac == 0.0 {
            (train_all, Vec::new())
        } else {
            let mut rng = rand::SeedableRng::seed_from_u64(derive_seed(master, streams::VAL_SPLIT));
            let (tr, va, _) = split(
                train_all,
                (1.0 - args.val_frac, args.val_frac, 0.0),
                &mut rng as &mut rand_chacha::ChaCha8Rng,
            )?;
            (tr, va)
        };

    let y: Vec<f64> = test.iter().map(|r| r.m_z_exact).collect();
    let mut results = Vec::new();
    for kind in [InputKind::Hybrid, InputKind::Classical] {
        let (model_stream, shuffle_stream) = match kind {
            InputKind::Hybrid => (streams::MODEL_HYBRID, streams::SHUFFLE_HYBRID),
            InputKind::Classical => (streams::MODEL_CLASSICAL, streams::SHUFFLE_CLASSICAL),
        };
        let outcome = common::fit(&FitRequest {
            precision: args.precision,
            kind,
            model_seed: derive_seed(master, model_stream),
            shuffle_seed: derive_seed(master, shuffle_stream),
            params: *params,
            train: &train_records,
            val: &val_records,
            test: &test,
            save_to: None,
        })?;
        results.push(RunResult {
            method: method_name(kind),
            report: EvalReport::new(&y, &outcome.predictions)?,
        });
    }

    let noisy: Vec<f64> = test.iter().map(|r| r.m_z_noisy).collect();
    results.push(RunResult {
        method: "noisy",
        report: EvalReport::new(&y, &noisy)?,
    });

    if args.zne {
        let zne = common::zne_predictions(
            &test,
            graph,
            &noise,
            estimator,
            derive_seed(master, streams::ZNE),
        )?;
        results.push(RunResult {
            method: "zne",
            report: EvalReport::new(&y, &zne)?,
        });
    }
    Ok(results)
}
