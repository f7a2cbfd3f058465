//! `qmag train` — fit a CNN regressor on a dataset and write the model
//! plus its loss history.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qmag_core::cnn::{AdamParams, TrainHistory, TrainParams};
use qmag_core::dataset::{derive_seed, read_jsonl, split, CircuitRecord};
use qmag_core::{Error, Result};

use crate::common::{self, streams, FitRequest};
use crate::{Cli, TrainArgs};

/// Contents of the `.history.json` file written next to the model.
#[derive(Serialize)]
struct HistoryFile<'a> {
    inputs: &'a str,
    precision: &'a str,
    seed: u64,
    epochs_run: usize,
    param_count: usize,
    history: &'a TrainHistory,
}

pub fn run(cli: &Cli, args: &TrainArgs) -> Result<()> {
    let out = common::require_out(cli)?;
    if !(0.0..1.0).contains(&args.val_frac) {
        return Err(Error::InvalidParameter(format!(
            "--val-frac must be in [0, 1), got {}",
            args.val_frac
        )));
    }
    let records = read_jsonl::<f64>(&args.data)?;
    let (train_records, val_records): (Vec<CircuitRecord<f64>>, Vec<CircuitRecord<f64>>) =
        match &args.val {
            Some(path) => (records, read_jsonl::<f64>(path)?),
            None if args.val_frac == 0.0 => (records, Vec::new()),
            None => {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(cli.seed, streams::VAL_SPLIT));
                let (tr, va, _) =
                    split(records, (1.0 - args.val_frac, args.val_frac, 0.0), &mut rng)?;
                (tr, va)
            }
        };

    let params = TrainParams {
        adam: AdamParams {
            learning_rate: args.lr,
            ..AdamParams::default()
        },
        batch_size: args.batch_size,
        max_epochs: args.epochs,
        patience: args.patience,
    };
    let request = FitRequest {
        precision: args.precision,
        kind: common::input_kind_of(args.inputs),
        model_seed: cli.seed,
        shuffle_seed: derive_seed(cli.seed, streams::SHUFFLE),
        params,
        train: &train_records,
        val: &val_records,
        test: &[],
        save_to: Some(out),
    };

    let start = Instant::now();
    let outcome = common::fit(&request)?;

    let history_path = args
        .history
        .clone()
        .unwrap_or_else(|| common::sibling_path(out, ".history.json"));
    let inputs_name = request.kind.to_string();
    let precision_name = match args.precision {
        crate::PrecisionArg::F64 => "f64",
        crate::PrecisionArg::F32 => "f32",
    };
    let file = HistoryFile {
        inputs: &inputs_name,
        precision: precision_name,
        seed: cli.seed,
        epochs_run: outcome.history.train_loss.len(),
        param_count: outcome.param_count,
        history: &outcome.history,
    };
    common::write_text(&history_path, &format!("{}\n", serde_json::to_string_pretty(&file)?))?;

    println!(
        "train: {} inputs, {} parameters, {} epochs (best {} @ val MSE {:.6e}) -> {} ({:.2}s)",
        inputs_name,
        outcome.param_count,
        outcome.history.train_loss.len(),
        outcome.history.best_epoch,
        outcome.history.best_val_loss,
        out.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
