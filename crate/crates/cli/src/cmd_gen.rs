//! `qmag gen` — simulate random circuits into a JSONL dataset.

use std::time::Instant;

use qmag_core::dataset::{generate, write_jsonl, GenerateParams};
use qmag_core::Result;

use crate::common;
use crate::{Cli, GenArgs};

pub fn run(cli: &Cli, args: &GenArgs) -> Result<()> {
    let out = common::require_out(cli)?;
    let graph = common::load_graph(cli)?;
    let noise = common::load_noise_config(cli, args.p_noise)?.build::<f64>(&graph)?;
    let params = GenerateParams::new(
        common::config_of(args.config),
        common::parse_sizes(&args.n)?,
        args.layers,
        args.k,
    )
    .with_estimator(common::estimator_of(&args.est));

    let start = Instant::now();
    let records = generate(&params, &graph, &noise, cli.seed)?;
    write_jsonl(out, &records)?;
    println!(
        "gen: {} records -> {} ({:.2}s)",
        records.len(),
        out.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
