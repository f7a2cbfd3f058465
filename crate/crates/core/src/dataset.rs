//! Dataset records: seeded generation, JSONL persistence, and splits.
//!
//! Each record captures one random circuit — its placement, angles, exact
//! magnetization, and noisy estimates — so training and evaluation never
//! re-simulate. Record `i` of a generation run is derived from
//! `derive_seed(master_seed, i)` alone, which makes datasets reproducible
//! record-by-record and independent of thread scheduling.
//!
//! Files are JSON Lines: a `{"schema":1}` header followed by one record per
//! line. Circuits always use the default `phi = -pi/2`, so a record fully
//! determines its circuit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chip::{sample_section, ChipGraph, QubitSection};
use crate::circuits::{default_phi, Circuit, Config};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::scalar::{dbl, lit, Real};
use crate::sim::{estimate_noisy, run_exact, Estimator, MAX_DENSITY_QUBITS};

/// Version tag of the JSONL record schema.
pub const SCHEMA_VERSION: u32 = 1;

/// One simulated circuit with exact and noisy magnetization data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitRecord<T> {
    /// Index of the record within its generation run.
    pub id: u64,
    pub config: Config,
    /// Section size.
    pub n: usize,
    pub p_layers: usize,
    /// Physical qubits of the section, strictly ascending.
    pub q: Vec<usize>,
    /// RX angles (per qubit for config A, per layer for config B).
    pub theta: Vec<T>,
    /// Noisy per-qubit `<Z>` estimates, section position order.
    pub z_noisy: Vec<T>,
    /// Noiseless mean magnetization (the regression target).
    pub m_z_exact: T,
    /// Mean of `z_noisy`.
    pub m_z_noisy: T,
    /// Two-qubit noise scale of the model that produced `z_noisy`.
    pub p_noise: T,
    /// How `z_noisy` was estimated.
    pub estimator_meta: Estimator,
    /// Seed that reproduces this record.
    pub seed: u64,
}

impl<T: Real> CircuitRecord<T> {
    /// Converts the record to another scalar precision. Simulation always
    /// runs in the source precision; this only narrows (or widens) the
    /// stored values, e.g. to train a single-precision model on
    /// double-precision data.
    pub fn convert<U: Real>(&self) -> CircuitRecord<U> {
        CircuitRecord {
            id: self.id,
            config: self.config,
            n: self.n,
            p_layers: self.p_layers,
            q: self.q.clone(),
            theta: self.theta.iter().map(|&x| lit::<U>(dbl(x))).collect(),
            z_noisy: self.z_noisy.iter().map(|&x| lit::<U>(dbl(x))).collect(),
            m_z_exact: lit::<U>(dbl(self.m_z_exact)),
            m_z_noisy: lit::<U>(dbl(self.m_z_noisy)),
            p_noise: lit::<U>(dbl(self.p_noise)),
            estimator_meta: self.estimator_meta,
            seed: self.seed,
        }
    }
}

/// Parameters of one generation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateParams {
    pub config: Config,
    /// Candidate section sizes, sampled uniformly per record.
    pub sizes: Vec<usize>,
    pub p_layers: usize,
    /// Number of records to generate.
    pub count: usize,
    pub estimator: Estimator,
}

impl GenerateParams {
    pub fn new(config: Config, sizes: Vec<usize>, p_layers: usize, count: usize) -> Self {
        Self {
            config,
            sizes,
            p_layers,
            count,
            estimator: Estimator::default(),
        }
    }

    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = estimator;
        self
    }
}

/// SplitMix64-style derivation of per-record seeds from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates `params.count` records on `graph` under `noise`.
///
/// Record `i` depends only on `(params, graph, noise, derive_seed(master, i))`,
/// so the output is deterministic and stable under parallel execution.
pub fn generate<T: Real>(
    params: &GenerateParams,
    graph: &ChipGraph,
    noise: &NoiseModel<T>,
    master_seed: u64,
) -> Result<Vec<CircuitRecord<T>>> {
    if params.count == 0 {
        return Err(Error::EmptyGeneration);
    }
    if params.sizes.is_empty() {
        return Err(Error::EmptyInput);
    }
    if params.p_layers == 0 {
        return Err(Error::NoLayers);
    }
    for &n in &params.sizes {
        if n < 2 || n > graph.num_qubits() {
            return Err(Error::SectionSize {
                n,
                min: 2,
                max: graph.num_qubits(),
            });
        }
        if matches!(params.estimator, Estimator::Density) && n > MAX_DENSITY_QUBITS {
            return Err(Error::QubitCap {
                n,
                cap: MAX_DENSITY_QUBITS,
            });
        }
    }
    noise.validate()?;
    (0..params.count as u64)
        .into_par_iter()
        .map(|id| generate_record(params, graph, noise, id, derive_seed(master_seed, id)))
        .collect()
}

/// Generates the single record `(id, seed)` of a run.
pub fn generate_record<T: Real>(
    params: &GenerateParams,
    graph: &ChipGraph,
    noise: &NoiseModel<T>,
    id: u64,
    seed: u64,
) -> Result<CircuitRecord<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.sizes[rng.gen_range(0..params.sizes.len())];
    let section = sample_section(graph, n, &mut rng)?;
    let circuit =
        Circuit::<T>::random(section, params.config, params.p_layers, &mut rng)?.with_seed(seed);
    // The noisy estimate uses a disjoint ChaCha stream of the same seed so
    // that circuit sampling and estimation cannot interleave.
    let mut est_rng = ChaCha8Rng::seed_from_u64(seed);
    est_rng.set_stream(1);
    record_from_circuit(&circuit, noise, &params.estimator, id, seed, &mut est_rng)
}

/// Measures `circuit` exactly and with the noisy estimator, producing a
/// record. The circuit must be logical (untranspiled); its angles must use
/// the default `phi`.
pub fn record_from_circuit<T: Real, R: Rng>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    estimator: &Estimator,
    id: u64,
    seed: u64,
    rng: &mut R,
) -> Result<CircuitRecord<T>> {
    let exact = run_exact(circuit)?;
    let transpiled = circuit.transpile()?;
    let noisy = estimate_noisy(&transpiled, noise, estimator, rng)?;
    Ok(CircuitRecord {
        id,
        config: circuit.config(),
        n: circuit.section().len(),
        p_layers: circuit.p_layers(),
        q: circuit.section().qubits().to_vec(),
        theta: circuit.theta().to_vec(),
        z_noisy: noisy.z().to_vec(),
        m_z_exact: exact.m_z(),
        m_z_noisy: noisy.m_z(),
        p_noise: noise.p_noise(),
        estimator_meta: *estimator,
        seed,
    })
}

/// Rebuilds the logical circuit a record was generated from.
pub fn circuit_from_record<T: Real>(
    record: &CircuitRecord<T>,
    graph: &ChipGraph,
) -> Result<Circuit<T>> {
    let section = QubitSection::from_qubits(graph, record.q.clone())?;
    Ok(Circuit::from_parts(
        section,
        record.config,
        record.p_layers,
        record.theta.clone(),
        default_phi(),
    )?
    .with_seed(record.seed))
}

#[derive(Serialize, Deserialize)]
struct SchemaHeader {
    schema: u32,
}

/// Writes records as JSONL with a schema header line.
pub fn write_jsonl<T: Real>(path: &Path, records: &[CircuitRecord<T>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(
        &mut w,
        &SchemaHeader {
            schema: SCHEMA_VERSION,
        },
    )?;
    w.write_all(b"\n")?;
    for record in records {
        serde_json::to_writer(&mut w, record)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Streaming JSONL reader; the schema header is checked before any record is
/// yielded.
pub fn stream_jsonl<T: Real>(
    path: &Path,
) -> Result<impl Iterator<Item = Result<CircuitRecord<T>>>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header_line = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::EmptyInput),
    };
    let header: SchemaHeader = serde_json::from_str(&header_line)?;
    if header.schema != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: header.schema,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(lines
        .filter(|line| match line {
            Ok(text) => !text.trim().is_empty(),
            Err(_) => true,
        })
        .map(|line| Ok(serde_json::from_str(&line?)?)))
}

/// Reads a whole JSONL file.
pub fn read_jsonl<T: Real>(path: &Path) -> Result<Vec<CircuitRecord<T>>> {
    stream_jsonl(path)?.collect()
}

/// Train/validation/test partitions produced by [`split`].
pub type SplitRecords<T> = (
    Vec<CircuitRecord<T>>,
    Vec<CircuitRecord<T>>,
    Vec<CircuitRecord<T>>,
);

/// Shuffles and splits records into train/validation/test partitions.
///
/// Fractions must be non-negative and sum to 1 within 1e-9. Partition sizes
/// are the rounded shares; a non-zero fraction may not end up empty.
pub fn split<T, R: Rng>(
    mut records: Vec<CircuitRecord<T>>,
    fractions: (f64, f64, f64),
    rng: &mut R,
) -> Result<SplitRecords<T>> {
    let (f1, f2, f3) = fractions;
    let sum = f1 + f2 + f3;
    if f1 < 0.0 || f2 < 0.0 || f3 < 0.0 || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadFractions(sum));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    records.shuffle(rng);
    let total = records.len();
    let n1 = ((f1 * total as f64).round() as usize).min(total);
    let n2 = ((f2 * total as f64).round() as usize).min(total - n1);
    let n3 = total - n1 - n2;
    for (fraction, size) in [(f1, n1), (f2, n2), (f3, n3)] {
        if fraction > 0.0 && size == 0 {
            return Err(Error::EmptySplit);
        }
    }
    let rest = records.split_off(n1);
    let mut middle = rest;
    let tail = middle.split_off(n2);
    Ok((records, middle, tail))
}

/// Convenience check used across tests: `m_z_noisy` must be the mean of
/// `z_noisy` and `m_z_exact` must match the rebuilt circuit.
pub fn verify_record<T: Real>(record: &CircuitRecord<T>, graph: &ChipGraph) -> Result<()> {
    if record.q.len() != record.n || record.z_noisy.len() != record.n {
        return Err(Error::LengthMismatch {
            left: record.q.len(),
            right: record.n,
        });
    }
    let mean = record
        .z_noisy
        .iter()
        .copied()
        .sum::<T>()
        / T::from_usize(record.n).expect("count fits scalar");
    if dbl((mean - record.m_z_noisy).abs()) > 1e-12 {
        return Err(Error::NonFinitePrediction);
    }
    let circuit = circuit_from_record(record, graph)?;
    let exact = run_exact(&circuit)?;
    if dbl((exact.m_z() - record.m_z_exact).abs()) > 1e-9 {
        return Err(Error::NonFinitePrediction);
    }
    Ok(())
}
