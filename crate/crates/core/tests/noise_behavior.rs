//! Statistical and algebraic properties of the noise pipeline that only
//! show up across module boundaries: trajectory sampling versus exact
//! density evolution, and the linear `p_noise` interpolation of the
//! channel maps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmag_core::chip::{ChipGraph, QubitSection};
use qmag_core::circuits::{default_phi, Circuit, Config};
use qmag_core::noise::{KrausChannel, NoiseConfig, SingleGateKind};
use qmag_core::sim::{run_density, trajectory_stats};

type C = Complex64;

fn device_circuit(qubits: Vec<usize>, p: usize, theta: Vec<f64>) -> Circuit<f64> {
    let graph = ChipGraph::device();
    let section = QubitSection::from_qubits(&graph, qubits).unwrap();
    Circuit::from_parts(section, Config::A, p, theta, default_phi())
        .unwrap()
        .transpile()
        .unwrap()
}

#[test]
fn trajectory_average_converges_to_the_density_matrix() {
    let graph = ChipGraph::device();
    let noise = NoiseConfig::default().build::<f64>(&graph).unwrap();
    let circuit = device_circuit(vec![1, 2, 3], 3, vec![0.3, 0.8, 1.2]);

    let exact = run_density(&circuit, &noise).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20_000);
    let stats = trajectory_stats(&circuit, &noise, 20_000, &mut rng).unwrap();

    let n = exact.z().len() as f64;
    let m_exact = exact.m_z();
    let m_traj = stats.expectation.m_z();
    // |mean of correlated errors| <= mean of the per-qubit standard errors;
    // three of those is a conservative 3-sigma band.
    let sigma_bound = stats.std_error.iter().sum::<f64>() / n;
    assert!(
        (m_traj - m_exact).abs() < 3.0 * sigma_bound,
        "trajectory mean {m_traj} vs density {m_exact} (3-sigma bound {})",
        3.0 * sigma_bound
    );
}

/// Applies a mixed-unitary channel to a dense density matrix:
/// `rho' = sum_i w_i K_i rho K_i^dag`.
fn apply_channel_dense(channel: &KrausChannel<f64>, rho: &[C]) -> Vec<C> {
    let dim = channel.dim();
    let mut out = vec![C::new(0.0, 0.0); dim * dim];
    for branch in channel.branches() {
        let w = branch.weight.unwrap_or(1.0);
        let k: Vec<C> = branch
            .matrix
            .iter()
            .map(|c| C::new(c.re, c.im))
            .collect();
        // K rho K^dag with naive triple loops.
        for r in 0..dim {
            for s in 0..dim {
                let mut acc = C::new(0.0, 0.0);
                for a in 0..dim {
                    for b in 0..dim {
                        acc += k[r * dim + a] * rho[a * dim + b] * k[s * dim + b].conj();
                    }
                }
                out[r * dim + s] += w * acc;
            }
        }
    }
    out
}

fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    // rho = A A^dag normalized to unit trace is a valid density matrix.
    let a: Vec<C> = (0..dim * dim)
        .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut rho = vec![C::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for s in 0..dim {
            for t in 0..dim {
                rho[r * dim + s] += a[r * dim + t] * a[s * dim + t].conj();
            }
        }
    }
    let trace: f64 = (0..dim).map(|r| rho[r * dim + r].re).sum();
    for v in &mut rho {
        *v /= trace;
    }
    rho
}

#[test]
fn cnot_channel_interpolates_linearly_in_p_noise() {
    let graph = ChipGraph::device();
    let build = |p: f64| NoiseConfig::with_p_noise(p).build::<f64>(&graph).unwrap();
    let (zero, one, mid) = (build(0.0), build(1.0), build(0.37));
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    for &edge in &[(0usize, 1usize), (12, 15)] {
        let rho = random_density(4, &mut rng);
        let out0 = apply_channel_dense(zero.cnot_channel(edge.0, edge.1).unwrap(), &rho);
        let out1 = apply_channel_dense(one.cnot_channel(edge.0, edge.1).unwrap(), &rho);
        let outm = apply_channel_dense(mid.cnot_channel(edge.0, edge.1).unwrap(), &rho);
        for i in 0..16 {
            let expect = (1.0 - 0.37) * out0[i] + 0.37 * out1[i];
            assert!(
                (outm[i] - expect).norm() < 1e-12,
                "edge {edge:?}, entry {i}: channel map is not affine in p_noise"
            );
        }
    }
}

#[test]
fn p_noise_zero_leaves_only_readout_error() {
    let graph = ChipGraph::device();
    let noise = NoiseConfig::with_p_noise(0.0).build::<f64>(&graph).unwrap();
    // Two-qubit channels collapse to the identity...
    for &(a, b) in graph.edges() {
        let channel = noise.cnot_channel(a, b).unwrap();
        assert!(
            (channel.identity_weight() - 1.0).abs() < 1e-15,
            "coupler ({a}, {b}) keeps noise at p_noise = 0"
        );
    }
    // ...while single-qubit depolarizing and readout stay at nominal levels.
    let rx = noise.single_channel(SingleGateKind::Rx, 0).unwrap();
    assert!(rx.identity_weight() < 1.0);
    let readout = noise.readout(0);
    assert!(readout.p01 > 0.0 && readout.p10 > 0.0);
}

#[test]
fn single_qubit_and_readout_noise_ignore_p_noise() {
    let graph = ChipGraph::device();
    let build = |p: f64| NoiseConfig::with_p_noise(p).build::<f64>(&graph).unwrap();
    let (lo, hi) = (build(0.25), build(0.75));
    for q in 0..graph.num_qubits() {
        assert_eq!(
            lo.single_channel(SingleGateKind::Rx, q),
            hi.single_channel(SingleGateKind::Rx, q)
        );
        assert_eq!(lo.readout(q), hi.readout(q));
    }
}
