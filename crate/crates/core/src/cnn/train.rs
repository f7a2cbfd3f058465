//! Mini-batch Adam training with size-bucketed batches, early stopping on
//! validation loss, and batched prediction.
//!
//! Records of different sizes cannot share a rectangular batch, so samples
//! are grouped by `(N, P)` and batches are drawn inside each group; the batch
//! order is shuffled every epoch. Early stopping keeps the weights of the
//! best validation epoch, not the last one.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::input::{assemble_batch, record_map};
use super::{AdamState, CnnModel, ForwardPass};
use crate::cnn::AdamParams;
use crate::dataset::CircuitRecord;
use crate::error::{Error, Result};
use crate::scalar::{count, dbl, Real};

/// Batch size used by [`predict_batch`].
const PREDICT_BATCH: usize = 256;

/// Training hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParams {
    pub adam: AdamParams,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Consecutive epochs without a validation improvement before stopping.
    pub patience: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            adam: AdamParams::default(),
            batch_size: 256,
            max_epochs: 200,
            patience: 10,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter(
                "batch size must be at least 1".into(),
            ));
        }
        self.adam.validate()
    }
}

/// Per-epoch losses and the early-stopping outcome of one training run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Mean squared error over the training set, per epoch (averaged over
    /// the mini-batch losses seen during the epoch).
    pub train_loss: Vec<f64>,
    /// Mean squared error over the validation set, per epoch. Equals the
    /// training loss when no validation records were supplied.
    pub val_loss: Vec<f64>,
    /// Epoch whose weights were restored.
    pub best_epoch: usize,
    pub best_val_loss: f64,
}

struct Sample<T> {
    map: Array2<T>,
    n: usize,
    p: usize,
    target: T,
}

fn prepare<T: Real>(model: &CnnModel<T>, records: &[CircuitRecord<T>]) -> Result<Vec<Sample<T>>> {
    let arch = model.arch();
    records
        .iter()
        .map(|rec| {
            if rec.config != arch.config {
                return Err(Error::ConfigMismatch {
                    got: rec.config.to_string(),
                    expected: arch.config.to_string(),
                });
            }
            let (map, n, p) = record_map(rec, arch.inputs)?;
            Ok(Sample {
                map,
                n,
                p,
                target: rec.m_z_exact,
            })
        })
        .collect()
}

fn bucket_indices<T>(samples: &[Sample<T>]) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut buckets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        buckets.entry((s.n, s.p)).or_default().push(i);
    }
    buckets
}

fn run_batch<T: Real>(
    model: &CnnModel<T>,
    samples: &[Sample<T>],
    batch: &[usize],
) -> Result<ForwardPass<T>> {
    let maps: Vec<&Array2<T>> = batch.iter().map(|&i| &samples[i].map).collect();
    let (n, p) = (samples[batch[0]].n, samples[batch[0]].p);
    let (map, dims) = assemble_batch(&maps, n, p);
    model.forward_internal(map, dims)
}

fn dataset_mse<T: Real>(
    model: &CnnModel<T>,
    samples: &[Sample<T>],
    batch_size: usize,
) -> Result<f64> {
    let mut sq_sum = 0.0;
    let mut seen = 0usize;
    for indices in bucket_indices(samples).values() {
        for chunk in indices.chunks(batch_size) {
            let pass = run_batch(model, samples, chunk)?;
            for (k, &i) in chunk.iter().enumerate() {
                let r = dbl(pass.output[k]) - dbl(samples[i].target);
                sq_sum += r * r;
                seen += 1;
            }
        }
    }
    Ok(sq_sum / seen.max(1) as f64)
}

/// Trains `model` in place and returns the loss history. The weights of the
/// epoch with the lowest validation loss are restored before returning; when
/// `val_records` is empty the training loss doubles as the stopping metric.
pub fn train<T: Real, R: Rng>(
    model: &mut CnnModel<T>,
    train_records: &[CircuitRecord<T>],
    val_records: &[CircuitRecord<T>],
    params: &TrainParams,
    rng: &mut R,
) -> Result<TrainHistory> {
    params.validate()?;
    if train_records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let train_samples = prepare(model, train_records)?;
    let val_samples = prepare(model, val_records)?;
    let buckets = bucket_indices(&train_samples);
    let mut adam = AdamState::new(params.adam, model.param_count())?;

    let mut history = TrainHistory::default();
    let mut best_flat = model.to_flat();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut stall = 0usize;

    for epoch in 0..params.max_epochs {
        let mut batches: Vec<Vec<usize>> = Vec::new();
        for indices in buckets.values() {
            let mut order = indices.clone();
            order.shuffle(rng);
            for chunk in order.chunks(params.batch_size) {
                batches.push(chunk.to_vec());
            }
        }
        batches.shuffle(rng);

        let mut sq_sum = 0.0;
        let mut seen = 0usize;
        for batch in &batches {
            let pass = run_batch(model, &train_samples, batch)?;
            let blen = batch.len();
            let inv = count::<T>(blen);
            let mut dout = Array1::<T>::zeros(blen);
            for (k, &i) in batch.iter().enumerate() {
                let r = pass.output[k] - train_samples[i].target;
                let rd = dbl(r);
                sq_sum += rd * rd;
                dout[k] = (r + r) / inv;
            }
            if !sq_sum.is_finite() {
                return Err(Error::TrainingDiverged { epoch });
            }
            seen += blen;
            let grads = model.backward_internal(&pass, &dout);
            adam.step(model, &grads)?;
        }
        let train_loss = sq_sum / seen.max(1) as f64;
        let val_loss = if val_samples.is_empty() {
            train_loss
        } else {
            dataset_mse(model, &val_samples, params.batch_size)?
        };
        if !val_loss.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        history.train_loss.push(train_loss);
        history.val_loss.push(val_loss);

        if val_loss < best_val {
            best_val = val_loss;
            best_flat = model.to_flat();
            best_epoch = epoch;
            stall = 0;
        } else {
            stall += 1;
            if stall >= params.patience.max(1) {
                break;
            }
        }
    }

    model.load_flat(&best_flat)?;
    history.best_epoch = best_epoch;
    history.best_val_loss = best_val;
    Ok(history)
}

/// Runs the model on every record, preserving input order. Records may have
/// any sizes, including sizes never seen in training.
pub fn predict_batch<T: Real>(
    model: &CnnModel<T>,
    records: &[CircuitRecord<T>],
) -> Result<Vec<T>> {
    let samples = prepare(model, records)?;
    let mut out = vec![T::zero(); samples.len()];
    for indices in bucket_indices(&samples).values() {
        for chunk in indices.chunks(PREDICT_BATCH) {
            let pass = run_batch(model, &samples, chunk)?;
            for (k, &i) in chunk.iter().enumerate() {
                let y = pass.output[k];
                if !y.is_finite() {
                    return Err(Error::NonFinitePrediction);
                }
                out[i] = y;
            }
        }
    }
    Ok(out)
}
