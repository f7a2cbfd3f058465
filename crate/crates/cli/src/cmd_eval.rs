//! `qmag eval` — score trained models and baselines on a test dataset.
//!
//! Output CSV has one row per `(section size, method)` pair: the noisy
//! estimate itself, each `--model`, and optionally the ZNE baseline. When
//! several models share a method (e.g. the same architecture trained with
//! different seeds), stdout additionally reports mean ± std of `1 - R^2`
//! across them.

use std::time::Instant;

use qmag_core::cnn::{load_model, predict_batch, CnnModel, InputKind};
use qmag_core::dataset::{derive_seed, read_jsonl};
use qmag_core::Result;

use crate::common::{self, streams, MetricRow, METRIC_HEADER};
use crate::{Cli, EvalArgs};

pub fn method_name(kind: InputKind) -> &'static str {
    match kind {
        InputKind::Hybrid => "cnn_hybrid",
        InputKind::Classical => "cnn_classical",
    }
}

pub fn run(cli: &Cli, args: &EvalArgs) -> Result<()> {
    let out = common::require_out(cli)?;
    let records = read_jsonl::<f64>(&args.data)?;
    let ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    let y: Vec<f64> = records.iter().map(|r| r.m_z_exact).collect();

    let start = Instant::now();
    let mut rows: Vec<MetricRow> = Vec::new();

    let noisy: Vec<f64> = records.iter().map(|r| r.m_z_noisy).collect();
    rows.extend(common::method_rows(&ns, &y, &noisy, "noisy", cli.seed)?);

    for path in &args.model {
        let model: CnnModel<f64> = load_model(path)?;
        let predictions = predict_batch(&model, &records)?;
        rows.extend(common::method_rows(
            &ns,
            &y,
            &predictions,
            method_name(model.arch().inputs),
            model.seed(),
        )?);
    }

    if args.zne {
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
        rows.extend(common::method_rows(&ns, &y, &zne, "zne", cli.seed)?);
    }

    let mut csv = String::from(METRIC_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&common::metric_csv_line(row));
        csv.push('\n');
    }
    common::write_text(out, &csv)?;

    println!(
        "eval: {} records, {} rows -> {} ({:.2}s)",
        records.len(),
        rows.len(),
        out.display(),
        start.elapsed().as_secs_f64()
    );
    common::print_seed_summary(&rows);
    Ok(())
}
