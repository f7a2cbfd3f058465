//! `qmag scatter` — per-circuit predictions for scatter plots.
//!
//! Writes one CSV row per test record with the exact target next to the CNN
//! prediction, the raw noisy estimate, and the ZNE estimate.

use std::time::Instant;

use qmag_core::cnn::{load_model, predict_batch, CnnModel};
use qmag_core::dataset::{derive_seed, read_jsonl};
use qmag_core::Result;

use crate::common::{self, streams};
use crate::{Cli, ScatterArgs};

pub fn run(cli: &Cli, args: &ScatterArgs) -> Result<()> {
    let out = common::require_out(cli)?;
    let records = read_jsonl::<f64>(&args.data)?;

    let start = Instant::now();
    let model: CnnModel<f64> = load_model(&args.model)?;
    let cnn = predict_batch(&model, &records)?;

    let graph = common::load_graph(cli)?;
    let p_noise = common::resolve_p_noise(&records, args.p_noise)?;
    let noise = common::load_noise_config(cli, Some(p_noise))?.build::<f64>(&graph)?;
    let zne = common::zne_predictions(
        &records,
        &graph,
        &noise,
        common::estimator_of(&args.est),
        derive_seed(cli.seed, streams::ZNE),
    )?;

    let mut csv = String::from("id,n,target,cnn,noisy,zne\n");
    for (i, record) in records.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            record.id, record.n, record.m_z_exact, cnn[i], record.m_z_noisy, zne[i]
        ));
    }
    common::write_text(out, &csv)?;

    println!(
        "scatter: {} records -> {} ({:.2}s)",
        records.len(),
        out.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
