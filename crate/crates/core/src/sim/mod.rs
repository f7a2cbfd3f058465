//! Circuit execution engines.
//!
//! Four routes compute per-qubit `<Z>` expectations and their mean
//! magnetization:
//!
//! * [`run_exact`] — noiseless statevector evolution;
//! * [`run_trajectory`] — Monte-Carlo wavefunction sampling of the noise
//!   channels (one branch drawn per gate), averaged over trajectories;
//! * [`run_shots`] — trajectories followed by a single bit-string
//!   measurement each, with stochastic readout flips;
//! * [`run_density`] — exact density-matrix channel sums for small sections.
//!
//! Circuits are compiled once into a flat tape of gate kernels and channel
//! references; trajectories replay the tape with an independent RNG stream
//! per trajectory index, so results do not depend on thread count.

mod density;
mod state;

pub use density::{DensityMatrix, MAX_DENSITY_QUBITS};
pub use state::{mean_z, StateVector, MAX_STATE_QUBITS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chip::QubitSection;
use crate::circuits::{cnot_matrix, rx_matrix, rz_matrix, rzz_diagonal, Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::Cx;
use crate::noise::{KrausChannel, NoiseModel, SingleGateKind};
use crate::scalar::{count, dbl, lit, Real};

/// Default trajectory count for noisy estimates.
pub const DEFAULT_N_TRAJ: usize = 512;

/// Per-qubit `<Z>` expectations of one circuit plus their mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationSet<T> {
    z: Vec<T>,
    m_z: T,
}

impl<T: Real> ExpectationSet<T> {
    /// Clamps each entry to `[-1, 1]` and records the mean magnetization.
    pub fn from_z(z: Vec<T>) -> Self {
        let z: Vec<T> = z
            .into_iter()
            .map(|v| v.min(T::one()).max(-T::one()))
            .collect();
        let m_z = mean_z(&z);
        Self { z, m_z }
    }

    /// Per-qubit expectations in section position order.
    pub fn z(&self) -> &[T] {
        &self.z
    }

    /// Mean magnetization `m_z = mean(z)`.
    pub fn m_z(&self) -> T {
        self.m_z
    }
}

/// How noisy expectation values are estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// Monte-Carlo wavefunction average over `n_traj` trajectories.
    Trajectory { n_traj: usize },
    /// Bit-string sampling with `n_shots` measured trajectories.
    Shots { n_shots: usize },
    /// Exact density-matrix evolution (sections up to
    /// [`MAX_DENSITY_QUBITS`] qubits).
    Density,
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::Trajectory {
            n_traj: DEFAULT_N_TRAJ,
        }
    }
}

/// Trajectory estimate together with per-qubit standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryStats<T> {
    pub expectation: ExpectationSet<T>,
    /// Standard error of each `z` entry (post-readout scale).
    pub std_error: Vec<T>,
}

// --- compiled tape ---------------------------------------------------------

#[derive(Clone, Debug)]
enum TapeGate<T> {
    Single { pos: usize, m: [Cx<T>; 4] },
    DiagSingle { pos: usize, d: [Cx<T>; 2] },
    DiagTwo { hi: usize, lo: usize, d: [Cx<T>; 4] },
    Cnot { control: usize, target: usize },
}

#[derive(Clone, Copy, Debug)]
struct ChannelOp<'m, T> {
    channel: &'m KrausChannel<T>,
    /// Section position mapped to the high matrix bit (lower physical index).
    hi: usize,
    /// Section position mapped to the low matrix bit (unused for dim 2).
    lo: usize,
}

struct TapeOp<'m, T> {
    gate: TapeGate<T>,
    channel: Option<ChannelOp<'m, T>>,
}

/// Lowers a circuit into positional kernels, attaching each gate's noise
/// channel when a model is given.
fn compile<'m, T: Real>(
    circuit: &Circuit<T>,
    noise: Option<&'m NoiseModel<T>>,
) -> Result<Vec<TapeOp<'m, T>>> {
    let section = circuit.section();
    let pos = |q: usize| {
        section
            .position_of(q)
            .expect("circuit gates act on section qubits")
    };
    let mut ops = Vec::with_capacity(circuit.gates().len());
    for gate in circuit.gates() {
        let op = match *gate {
            Gate::Rx { qubit, theta } => TapeOp {
                gate: TapeGate::Single {
                    pos: pos(qubit),
                    m: rx_matrix(theta),
                },
                channel: noise
                    .and_then(|m| m.single_channel(SingleGateKind::Rx, qubit))
                    .map(|channel| ChannelOp {
                        channel,
                        hi: pos(qubit),
                        lo: 0,
                    }),
            },
            Gate::Rz { qubit, phi } => {
                let m = rz_matrix(phi);
                TapeOp {
                    gate: TapeGate::DiagSingle {
                        pos: pos(qubit),
                        d: [m[0], m[3]],
                    },
                    channel: noise
                        .and_then(|mm| mm.single_channel(SingleGateKind::Rz, qubit))
                        .map(|channel| ChannelOp {
                            channel,
                            hi: pos(qubit),
                            lo: 0,
                        }),
                }
            }
            Gate::Rzz { a, b, phi } => TapeOp {
                gate: TapeGate::DiagTwo {
                    hi: pos(a),
                    lo: pos(b),
                    d: rzz_diagonal(phi),
                },
                channel: None,
            },
            Gate::Cnot { control, target } => TapeOp {
                gate: TapeGate::Cnot {
                    control: pos(control),
                    target: pos(target),
                },
                channel: noise
                    .and_then(|m| m.cnot_channel(control, target))
                    .map(|channel| ChannelOp {
                        channel,
                        hi: pos(control.min(target)),
                        lo: pos(control.max(target)),
                    }),
            },
        };
        ops.push(op);
    }
    Ok(ops)
}

fn apply_tape_gate<T: Real>(state: &mut StateVector<T>, gate: &TapeGate<T>) {
    match gate {
        TapeGate::Single { pos, m } => state.apply_single(*pos, m),
        TapeGate::DiagSingle { pos, d } => state.apply_diag_single(*pos, d[0], d[1]),
        TapeGate::DiagTwo { hi, lo, d } => state.apply_diag_two(*hi, *lo, d),
        TapeGate::Cnot { control, target } => state.apply_cnot(*control, *target),
    }
}

fn apply_density_gate<T: Real>(rho: &mut DensityMatrix<T>, gate: &TapeGate<T>) {
    match gate {
        TapeGate::Single { pos, m } => rho.apply_single(*pos, m),
        TapeGate::DiagSingle { pos, d } => {
            let zero = Cx::new(T::zero(), T::zero());
            rho.apply_single(*pos, &[d[0], zero, zero, d[1]]);
        }
        TapeGate::DiagTwo { hi, lo, d } => {
            let zero = Cx::new(T::zero(), T::zero());
            let mut m = [zero; 16];
            for (i, v) in d.iter().enumerate() {
                m[i * 4 + i] = *v;
            }
            rho.apply_two(*hi, *lo, &m);
        }
        TapeGate::Cnot { control, target } => {
            rho.apply_two(*control, *target, &cnot_matrix::<T>());
        }
    }
}

fn noisy_tape<'m, T: Real>(
    circuit: &Circuit<T>,
    noise: &'m NoiseModel<T>,
) -> Result<Vec<TapeOp<'m, T>>> {
    if !circuit.is_transpiled() {
        return Err(Error::NotTranspiled);
    }
    noise.validate()?;
    compile(circuit, Some(noise))
}

fn apply_readout<T: Real>(section: &QubitSection, noise: &NoiseModel<T>, z: Vec<T>) -> Vec<T> {
    section
        .qubits()
        .iter()
        .zip(z)
        .map(|(&q, zq)| noise.readout(q).apply(zq))
        .collect()
}

// --- runners ----------------------------------------------------------------

/// Noiseless statevector evolution; accepts logical or transpiled circuits.
pub fn run_exact<T: Real>(circuit: &Circuit<T>) -> Result<ExpectationSet<T>> {
    let tape = compile(circuit, None)?;
    let mut state = StateVector::zero_state(circuit.section().len())?;
    for op in &tape {
        apply_tape_gate(&mut state, &op.gate);
    }
    Ok(ExpectationSet::from_z(state.expectation_z_all()))
}

/// Monte-Carlo wavefunction estimate over `n_traj` trajectories.
///
/// Requires a transpiled circuit and a CPTP noise model. The caller RNG is
/// consumed for one `u64` that seeds per-trajectory ChaCha streams, so the
/// result is independent of thread scheduling.
pub fn run_trajectory<T: Real, R: Rng>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    n_traj: usize,
    rng: &mut R,
) -> Result<ExpectationSet<T>> {
    Ok(trajectory_stats(circuit, noise, n_traj, rng)?.expectation)
}

/// As [`run_trajectory`], also returning per-qubit standard errors.
pub fn trajectory_stats<T: Real, R: Rng>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    n_traj: usize,
    rng: &mut R,
) -> Result<TrajectoryStats<T>> {
    if n_traj == 0 {
        return Err(Error::NoTrajectories);
    }
    let tape = noisy_tape(circuit, noise)?;
    let n = circuit.section().len();
    let base_seed: u64 = rng.gen();
    let samples = (0..n_traj)
        .into_par_iter()
        .map(|t| {
            let mut traj_rng = ChaCha8Rng::seed_from_u64(base_seed);
            traj_rng.set_stream(t as u64);
            one_trajectory(&tape, n, &mut traj_rng)
        })
        .collect::<Result<Vec<Vec<T>>>>()?;
    // Ordered reduction keeps results identical across thread counts.
    let denom = count::<T>(n_traj);
    let mut mean = vec![T::zero(); n];
    for sample in &samples {
        for (m, v) in mean.iter_mut().zip(sample) {
            *m += *v;
        }
    }
    for m in &mut mean {
        *m /= denom;
    }
    let mut std_error = vec![T::zero(); n];
    if n_traj > 1 {
        for sample in &samples {
            for (e, (v, m)) in std_error.iter_mut().zip(sample.iter().zip(&mean)) {
                let d = *v - *m;
                *e += d * d;
            }
        }
        for e in &mut std_error {
            *e = (*e / count::<T>(n_traj - 1) / denom).sqrt();
        }
    }
    // Readout is an affine map on expectations, so applying it after the
    // average is exact; standard errors pick up the same slope.
    let section = circuit.section();
    for (e, &q) in std_error.iter_mut().zip(section.qubits()) {
        let r = noise.readout(q);
        *e *= T::one() - r.p01 - r.p10;
    }
    let z = apply_readout(section, noise, mean);
    Ok(TrajectoryStats {
        expectation: ExpectationSet::from_z(z),
        std_error,
    })
}

fn one_trajectory<T: Real>(
    tape: &[TapeOp<'_, T>],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<T>> {
    let mut state = StateVector::zero_state(n)?;
    for op in tape {
        apply_tape_gate(&mut state, &op.gate);
        if let Some(channel_op) = &op.channel {
            sample_channel(&mut state, channel_op, rng);
        }
    }
    Ok(state.expectation_z_all())
}

/// Draws one branch of `op.channel` and applies it. Weighted branches use
/// their fixed probabilities; general Kraus branches use `|K psi|^2`.
/// Identity branches are skipped without touching the state, which makes the
/// common no-error case nearly free.
fn sample_channel<T: Real, R: Rng>(state: &mut StateVector<T>, op: &ChannelOp<'_, T>, rng: &mut R) {
    let u: f64 = rng.gen();
    let mut acc = 0.0f64;
    for branch in op.channel.branches() {
        match branch.weight {
            Some(w) => {
                acc += dbl(w);
                if u < acc {
                    if !branch.is_identity() {
                        apply_channel_matrix(state, op, &branch.matrix);
                    }
                    return;
                }
            }
            None => {
                let mut candidate = state.clone();
                apply_channel_matrix(&mut candidate, op, &branch.matrix);
                acc += dbl(candidate.norm_sqr());
                if u < acc {
                    candidate.normalize();
                    *state = candidate;
                    return;
                }
            }
        }
    }
    // Total probability is 1 up to round-off; the sliver past `acc` acts as
    // the identity.
}

fn apply_channel_matrix<T: Real>(state: &mut StateVector<T>, op: &ChannelOp<'_, T>, m: &[Cx<T>]) {
    if op.channel.dim() == 2 {
        state.apply_single(op.hi, m);
    } else {
        state.apply_two(op.hi, op.lo, m);
    }
}

/// Exact noisy expectations by density-matrix channel sums. Limited to
/// sections of at most [`MAX_DENSITY_QUBITS`] qubits.
pub fn run_density<T: Real>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
) -> Result<ExpectationSet<T>> {
    let tape = noisy_tape(circuit, noise)?;
    let mut rho = DensityMatrix::pure_zero(circuit.section().len())?;
    for op in &tape {
        apply_density_gate(&mut rho, &op.gate);
        if let Some(channel_op) = &op.channel {
            let one = [channel_op.hi];
            let two = [channel_op.hi, channel_op.lo];
            let positions: &[usize] = if channel_op.channel.dim() == 2 { &one } else { &two };
            rho.apply_channel(positions, channel_op.channel);
        }
    }
    let z = apply_readout(circuit.section(), noise, rho.expectation_z_all());
    Ok(ExpectationSet::from_z(z))
}

/// Shot-sampled estimate: each shot runs one trajectory, measures one basis
/// state, and applies stochastic readout flips to the bits.
pub fn run_shots<T: Real, R: Rng>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    n_shots: usize,
    rng: &mut R,
) -> Result<ExpectationSet<T>> {
    if n_shots == 0 {
        return Err(Error::NoShots);
    }
    let tape = noisy_tape(circuit, noise)?;
    let n = circuit.section().len();
    let readouts: Vec<_> = circuit
        .section()
        .qubits()
        .iter()
        .map(|&q| noise.readout(q))
        .collect();
    let base_seed: u64 = rng.gen();
    let outcomes = (0..n_shots)
        .into_par_iter()
        .map(|t| {
            let mut shot_rng = ChaCha8Rng::seed_from_u64(base_seed);
            shot_rng.set_stream(t as u64);
            let mut state = StateVector::zero_state(n)?;
            for op in &tape {
                apply_tape_gate(&mut state, &op.gate);
                if let Some(channel_op) = &op.channel {
                    sample_channel(&mut state, channel_op, &mut shot_rng);
                }
            }
            let mut idx = state.sample_index(&mut shot_rng);
            for (p, r) in readouts.iter().enumerate() {
                let u: f64 = shot_rng.gen();
                let flip = if idx & (1 << p) == 0 {
                    u < dbl(r.p01)
                } else {
                    u < dbl(r.p10)
                };
                if flip {
                    idx ^= 1 << p;
                }
            }
            Ok(idx)
        })
        .collect::<Result<Vec<usize>>>()?;
    let mut sums = vec![0i64; n];
    for idx in outcomes {
        for (p, s) in sums.iter_mut().enumerate() {
            *s += if idx & (1 << p) == 0 { 1 } else { -1 };
        }
    }
    let z: Vec<T> = sums
        .iter()
        .map(|&s| lit::<T>(s as f64 / n_shots as f64))
        .collect();
    Ok(ExpectationSet::from_z(z))
}

/// Runs the noisy estimator selected by `estimator`.
pub fn estimate_noisy<T: Real, R: Rng>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    estimator: &Estimator,
    rng: &mut R,
) -> Result<ExpectationSet<T>> {
    match *estimator {
        Estimator::Trajectory { n_traj } => run_trajectory(circuit, noise, n_traj, rng),
        Estimator::Shots { n_shots } => run_shots(circuit, noise, n_shots, rng),
        Estimator::Density => run_density(circuit, noise),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chip::{ChipGraph, QubitSection};
    use crate::circuits::{default_phi, Config};
    use crate::noise::{default_model, NoiseConfig, ReadoutError};

    fn section(qubits: Vec<usize>) -> QubitSection {
        QubitSection::from_qubits(&ChipGraph::device(), qubits).unwrap()
    }

    fn circuit_a(qubits: Vec<usize>, p: usize, theta: Vec<f64>) -> Circuit<f64> {
        Circuit::from_parts(section(qubits), Config::A, p, theta, default_phi()).unwrap()
    }

    #[test]
    fn single_layer_z_is_cos_theta() {
        // With one Trotter layer, z_i = cos(theta_i) exactly: the diagonal
        // RZZ layer commutes with every Z observable.
        let theta = vec![0.3, 0.9, 1.4];
        let c = circuit_a(vec![0, 1, 2], 1, theta.clone());
        let e = run_exact(&c).unwrap();
        for (z, t) in e.z().iter().zip(&theta) {
            assert!((z - t.cos()).abs() < 1e-12);
        }
        let expect_m = theta.iter().map(|t| t.cos()).sum::<f64>() / 3.0;
        assert!((e.m_z() - expect_m).abs() < 1e-12);
    }

    #[test]
    fn transpiled_and_logical_exact_runs_agree() {
        let c = circuit_a(vec![4, 6, 7, 10], 3, vec![0.2, 0.5, 0.8, 1.1]);
        let t = c.transpile().unwrap();
        let a = run_exact(&c).unwrap();
        let b = run_exact(&t).unwrap();
        for (x, y) in a.z().iter().zip(b.z()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a.m_z() - b.m_z()).abs() < 1e-12);
    }

    #[test]
    fn theta_zero_gives_unit_magnetization() {
        let c = circuit_a(vec![0, 1], 1, vec![0.0, 0.0]);
        let e = run_exact(&c).unwrap();
        assert_eq!(e.z(), &[1.0, 1.0]);
        assert_eq!(e.m_z(), 1.0);
    }

    #[test]
    fn noiseless_model_trajectory_equals_exact() {
        let c = circuit_a(vec![1, 2, 3], 2, vec![0.4, 0.7, 1.0]);
        let t = c.transpile().unwrap();
        let exact = run_exact(&c).unwrap();
        let noise = NoiseModel::<f64>::noiseless(16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = run_trajectory(&t, &noise, 4, &mut rng).unwrap();
        for (x, y) in est.z().iter().zip(exact.z()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn readout_only_noise_is_the_affine_map() {
        let mut config = NoiseConfig::default();
        config.two_qubit.depolarizing = 0.0;
        config.two_qubit.edges.clear();
        config.single_qubit.depolarizing = 0.0;
        config.readout.p01 = 0.1;
        config.readout.p10 = 0.3;
        let noise = config.build::<f64>(&ChipGraph::device()).unwrap();
        let c = circuit_a(vec![5, 8, 9], 2, vec![0.2, 0.6, 1.2]);
        let t = c.transpile().unwrap();
        let exact = run_exact(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let est = run_trajectory(&t, &noise, 3, &mut rng).unwrap();
        let r = ReadoutError::new(0.1, 0.3).unwrap();
        for (x, y) in est.z().iter().zip(exact.z()) {
            assert!((x - r.apply(*y)).abs() < 1e-12);
        }
    }

    #[test]
    fn full_cnot_depolarizing_kills_magnetization_exactly() {
        let mut config = NoiseConfig::default();
        config.two_qubit.depolarizing = 1.0;
        config.two_qubit.edges.clear();
        config.single_qubit.depolarizing = 0.0;
        config.readout.p01 = 0.0;
        config.readout.p10 = 0.0;
        let noise = config.build::<f64>(&ChipGraph::device()).unwrap();
        let c = circuit_a(vec![0, 1], 1, vec![0.5, 0.5]);
        let t = c.transpile().unwrap();
        let e = run_density(&t, &noise).unwrap();
        for z in e.z() {
            assert!(z.abs() < 1e-12);
        }
    }

    #[test]
    fn density_matches_trajectory_free_cases() {
        // With a noiseless model the density and exact routes must agree.
        let c = circuit_a(vec![10, 12, 13, 15], 3, vec![0.3, 0.6, 0.9, 1.2]);
        let t = c.transpile().unwrap();
        let noise = NoiseModel::<f64>::noiseless(16);
        let exact = run_exact(&c).unwrap();
        let dens = run_density(&t, &noise).unwrap();
        for (x, y) in dens.z().iter().zip(exact.z()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_runs_require_transpiled_circuits() {
        let c = circuit_a(vec![0, 1], 1, vec![0.5, 0.5]);
        let noise = default_model::<f64>(&ChipGraph::device());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            run_trajectory(&c, &noise, 8, &mut rng),
            Err(Error::NotTranspiled)
        ));
        assert!(matches!(run_density(&c, &noise), Err(Error::NotTranspiled)));
        assert!(matches!(
            run_shots(&c, &noise, 8, &mut rng),
            Err(Error::NotTranspiled)
        ));
    }

    #[test]
    fn estimator_counts_are_validated() {
        let c = circuit_a(vec![0, 1], 1, vec![0.5, 0.5]).transpile().unwrap();
        let noise = default_model::<f64>(&ChipGraph::device());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            run_trajectory(&c, &noise, 0, &mut rng),
            Err(Error::NoTrajectories)
        ));
        assert!(matches!(
            run_shots(&c, &noise, 0, &mut rng),
            Err(Error::NoShots)
        ));
    }

    #[test]
    fn density_cap_applies_to_large_sections() {
        let qubits = vec![0, 1, 2, 3, 5, 8, 9, 11, 14];
        let c = Circuit::from_parts(
            section(qubits),
            Config::A,
            1,
            vec![0.1; 9],
            default_phi::<f64>(),
        )
        .unwrap()
        .transpile()
        .unwrap();
        let noise = default_model::<f64>(&ChipGraph::device());
        assert!(matches!(
            run_density(&c, &noise),
            Err(Error::QubitCap { n: 9, cap: 8 })
        ));
    }

    #[test]
    fn trajectories_are_seed_deterministic() {
        let c = circuit_a(vec![2, 3, 5], 3, vec![0.3, 0.8, 1.3])
            .transpile()
            .unwrap();
        let noise = default_model::<f64>(&ChipGraph::device());
        let mut r1 = ChaCha8Rng::seed_from_u64(77);
        let mut r2 = ChaCha8Rng::seed_from_u64(77);
        let a = run_trajectory(&c, &noise, 64, &mut r1).unwrap();
        let b = run_trajectory(&c, &noise, 64, &mut r2).unwrap();
        assert_eq!(a, b);
        let mut r3 = ChaCha8Rng::seed_from_u64(78);
        let c2 = run_trajectory(&c, &noise, 64, &mut r3).unwrap();
        assert_ne!(a, c2);
    }

    #[test]
    fn shots_on_identity_circuit_read_all_ones() {
        let mut config = NoiseConfig::default();
        config.two_qubit.depolarizing = 0.0;
        config.two_qubit.edges.clear();
        config.single_qubit.depolarizing = 0.0;
        config.readout.p01 = 0.0;
        config.readout.p10 = 0.0;
        let noise = config.build::<f64>(&ChipGraph::device()).unwrap();
        let c = circuit_a(vec![0, 1], 1, vec![0.0, 0.0]).transpile().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = run_shots(&c, &noise, 100, &mut rng).unwrap();
        assert_eq!(e.z(), &[1.0, 1.0]);
        assert_eq!(e.m_z(), 1.0);
    }

    #[test]
    fn estimator_dispatch_matches_direct_calls() {
        let c = circuit_a(vec![0, 1, 2], 2, vec![0.2, 0.5, 0.9])
            .transpile()
            .unwrap();
        let noise = default_model::<f64>(&ChipGraph::device());
        let mut r1 = ChaCha8Rng::seed_from_u64(6);
        let mut r2 = ChaCha8Rng::seed_from_u64(6);
        let via_dispatch =
            estimate_noisy(&c, &noise, &Estimator::Trajectory { n_traj: 16 }, &mut r1).unwrap();
        let direct = run_trajectory(&c, &noise, 16, &mut r2).unwrap();
        assert_eq!(via_dispatch, direct);
        let dens = estimate_noisy(&c, &noise, &Estimator::Density, &mut r1).unwrap();
        assert_eq!(dens, run_density(&c, &noise).unwrap());
    }

    #[test]
    fn estimator_serde_shape() {
        let e = Estimator::Trajectory { n_traj: 512 };
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"kind":"trajectory","n_traj":512}"#);
        let back: Estimator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        assert_eq!(
            serde_json::to_string(&Estimator::Density).unwrap(),
            r#"{"kind":"density"}"#
        );
    }
}
