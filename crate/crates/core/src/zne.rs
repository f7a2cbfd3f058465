//! Zero-noise extrapolation by unitary gate folding.
//!
//! Folding replaces a gate `G` by `G G^dag G`, which is the identity on the
//! noiseless circuit but triples that gate's noise exposure. Scale factor 3
//! folds every gate; scale factor 2 folds a uniformly chosen half of the
//! gates (`floor(count / 2)`); scale factor 1 leaves the circuit alone. A
//! Richardson polynomial through the measured values at the chosen factors
//! extrapolates the observable to zero noise.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::scalar::{count, Real};
use crate::sim::{estimate_noisy, Estimator};

/// Scale factors used by default: the identity plus both folded variants.
pub const DEFAULT_SCALE_FACTORS: [u32; 3] = [1, 2, 3];

/// Options controlling a ZNE run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZneOptions {
    /// Strictly ascending subset of `{1, 2, 3}`, at least two entries.
    pub scale_factors: Vec<u32>,
    /// Estimator used at every scale factor (same budget each).
    pub estimator: Estimator,
}

impl Default for ZneOptions {
    fn default() -> Self {
        Self {
            scale_factors: DEFAULT_SCALE_FACTORS.to_vec(),
            estimator: Estimator::default(),
        }
    }
}

/// Result of one zero-noise extrapolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZneEstimate<T> {
    pub scale_factors: Vec<u32>,
    /// Measured `m_z` at each scale factor, same order.
    pub values: Vec<T>,
    /// Richardson extrapolation of `values` to scale factor zero.
    pub extrapolated: T,
}

/// Returns a copy of `circuit` with its noise exposure scaled by `lambda`.
///
/// `lambda = 1` clones the circuit; `lambda = 3` folds every gate;
/// `lambda = 2` folds `floor(g / 2)` gates chosen uniformly without
/// replacement (positions drawn from `rng`, applied in circuit order).
/// Requires a transpiled circuit so that folding acts on the native gate
/// set.
pub fn fold_circuit<T: Real, R: Rng>(
    circuit: &Circuit<T>,
    lambda: u32,
    rng: &mut R,
) -> Result<Circuit<T>> {
    if !circuit.is_transpiled() {
        return Err(Error::NotTranspiled);
    }
    match lambda {
        1 => Ok(circuit.clone()),
        2 => {
            let g = circuit.gate_count();
            let mut chosen = rand::seq::index::sample(rng, g, g / 2).into_vec();
            chosen.sort_unstable();
            let mut flags = vec![false; g];
            for i in chosen {
                flags[i] = true;
            }
            Ok(circuit.with_gates(folded_gates(circuit.gates(), |i| flags[i])))
        }
        3 => Ok(circuit.with_gates(folded_gates(circuit.gates(), |_| true))),
        other => Err(Error::UnsupportedScaleFactor(other)),
    }
}

fn folded_gates<T: Real>(gates: &[Gate<T>], fold: impl Fn(usize) -> bool) -> Vec<Gate<T>> {
    let mut out = Vec::with_capacity(gates.len() * 3);
    for (i, gate) in gates.iter().enumerate() {
        out.push(*gate);
        if fold(i) {
            out.push(gate.dagger());
            out.push(*gate);
        }
    }
    out
}

/// Richardson extrapolation to zero: evaluates at 0 the unique polynomial of
/// degree `len - 1` through `(scale_factors[i], values[i])`.
///
/// For the default factors `(1, 2, 3)` this reduces to
/// `3 v1 - 3 v2 + v3`.
pub fn richardson<T: Real>(scale_factors: &[T], values: &[T]) -> Result<T> {
    if scale_factors.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: scale_factors.len(),
            right: values.len(),
        });
    }
    if scale_factors.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: scale_factors.len(),
        });
    }
    for (i, &a) in scale_factors.iter().enumerate() {
        for &b in &scale_factors[i + 1..] {
            if a == b {
                return Err(Error::BadScaleFactors);
            }
        }
    }
    // Lagrange basis at x = 0.
    let mut total = T::zero();
    for (i, (&xi, &vi)) in scale_factors.iter().zip(values).enumerate() {
        let mut coeff = T::one();
        for (j, &xj) in scale_factors.iter().enumerate() {
            if i != j {
                coeff = coeff * xj / (xj - xi);
            }
        }
        total += coeff * vi;
    }
    Ok(total)
}

/// Runs the full ZNE protocol on one circuit: fold at each scale factor,
/// estimate `m_z` with the same estimator budget, then extrapolate to zero.
pub fn zne_estimate<T: Real, R: Rng>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    options: &ZneOptions,
    rng: &mut R,
) -> Result<ZneEstimate<T>> {
    validate_scale_factors(&options.scale_factors)?;
    let mut values = Vec::with_capacity(options.scale_factors.len());
    for &lambda in &options.scale_factors {
        let folded = fold_circuit(circuit, lambda, rng)?;
        let estimate = estimate_noisy(&folded, noise, &options.estimator, rng)?;
        values.push(estimate.m_z());
    }
    let xs: Vec<T> = options
        .scale_factors
        .iter()
        .map(|&l| count(l as usize))
        .collect();
    let extrapolated = richardson(&xs, &values)?;
    Ok(ZneEstimate {
        scale_factors: options.scale_factors.clone(),
        values,
        extrapolated,
    })
}

fn validate_scale_factors(factors: &[u32]) -> Result<()> {
    if factors.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: factors.len(),
        });
    }
    if !factors.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::BadScaleFactors);
    }
    if let Some(&bad) = factors.iter().find(|&&l| !(1..=3).contains(&l)) {
        return Err(Error::UnsupportedScaleFactor(bad));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chip::{ChipGraph, QubitSection};
    use crate::circuits::{default_phi, Config};
    use crate::noise::NoiseModel;
    use crate::sim::run_exact;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn transpiled(qubits: Vec<usize>, p: usize, theta: Vec<f64>) -> Circuit<f64> {
        let section = QubitSection::from_qubits(&ChipGraph::device(), qubits).unwrap();
        Circuit::from_parts(section, Config::A, p, theta, default_phi())
            .unwrap()
            .transpile()
            .unwrap()
    }

    #[test]
    fn richardson_recovers_quadratics_exactly() {
        // v(x) = a + b x + c x^2 sampled at 1, 2, 3 extrapolates to a.
        let (a, b, c) = (0.37, -1.4, 0.55);
        let v = |x: f64| a + b * x + c * x * x;
        let xs = [1.0, 2.0, 3.0];
        let vs = [v(1.0), v(2.0), v(3.0)];
        let out = richardson(&xs, &vs).unwrap();
        assert!((out - a).abs() < 1e-12);
        // And the closed form 3 v1 - 3 v2 + v3 agrees.
        let closed = 3.0 * vs[0] - 3.0 * vs[1] + vs[2];
        assert!((out - closed).abs() < 1e-12);
    }

    #[test]
    fn richardson_two_points_is_linear_extrapolation() {
        let out: f64 = richardson(&[1.0, 2.0], &[1.0, 0.5]).unwrap();
        assert!((out - 1.5).abs() < 1e-12);
    }

    #[test]
    fn richardson_input_validation() {
        assert!(matches!(
            richardson(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            richardson(&[1.0], &[1.0]),
            Err(Error::TooFewPoints { .. })
        ));
        assert!(matches!(
            richardson(&[1.0, 1.0], &[0.3, 0.4]),
            Err(Error::BadScaleFactors)
        ));
    }

    #[test]
    fn folding_gate_counts() {
        let c = transpiled(vec![0, 1, 2], 2, vec![0.3, 0.6, 0.9]);
        let g = c.gate_count();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(fold_circuit(&c, 1, &mut rng).unwrap().gate_count(), g);
        assert_eq!(
            fold_circuit(&c, 2, &mut rng).unwrap().gate_count(),
            g + 2 * (g / 2)
        );
        assert_eq!(fold_circuit(&c, 3, &mut rng).unwrap().gate_count(), 3 * g);
        assert!(matches!(
            fold_circuit(&c, 4, &mut rng),
            Err(Error::UnsupportedScaleFactor(4))
        ));
        assert!(matches!(
            fold_circuit(&c, 0, &mut rng),
            Err(Error::UnsupportedScaleFactor(0))
        ));
    }

    #[test]
    fn folding_requires_transpiled_circuit() {
        let section = QubitSection::from_qubits(&ChipGraph::device(), vec![0, 1]).unwrap();
        let c = Circuit::from_parts(section, Config::A, 1, vec![0.3, 0.6], default_phi::<f64>())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(
            fold_circuit(&c, 3, &mut rng),
            Err(Error::NotTranspiled)
        ));
    }

    #[test]
    fn folded_circuits_are_noiselessly_equivalent() {
        let c = transpiled(vec![2, 3, 5, 8], 2, vec![0.25, 0.5, 0.75, 1.0]);
        let base = run_exact(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for lambda in [2, 3] {
            let folded = fold_circuit(&c, lambda, &mut rng).unwrap();
            let e = run_exact(&folded).unwrap();
            for (x, y) in e.z().iter().zip(base.z()) {
                assert!((x - y).abs() < 1e-10, "lambda = {lambda}");
            }
        }
    }

    #[test]
    fn lambda_two_selection_is_seeded() {
        let c = transpiled(vec![0, 1, 2], 3, vec![0.3, 0.6, 0.9]);
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        let a = fold_circuit(&c, 2, &mut r1).unwrap();
        let b = fold_circuit(&c, 2, &mut r2).unwrap();
        assert_eq!(a.gates(), b.gates());
    }

    #[test]
    fn zne_on_noiseless_model_returns_exact_value() {
        let c = transpiled(vec![0, 1, 2], 2, vec![0.2, 0.7, 1.2]);
        let noise = NoiseModel::<f64>::noiseless(16);
        let exact = run_exact(&c).unwrap().m_z();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let options = ZneOptions {
            scale_factors: vec![1, 2, 3],
            estimator: Estimator::Trajectory { n_traj: 2 },
        };
        let est = zne_estimate(&c, &noise, &options, &mut rng).unwrap();
        // All three values equal the exact one, so the polynomial is flat.
        for v in &est.values {
            assert!((v - exact).abs() < 1e-10);
        }
        assert!((est.extrapolated - exact).abs() < 1e-9);
    }

    #[test]
    fn zne_options_are_validated() {
        let c = transpiled(vec![0, 1], 1, vec![0.2, 0.4]);
        let noise = NoiseModel::<f64>::noiseless(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for factors in [vec![1], vec![2, 1], vec![1, 2, 4]] {
            let options = ZneOptions {
                scale_factors: factors,
                estimator: Estimator::Trajectory { n_traj: 1 },
            };
            assert!(zne_estimate(&c, &noise, &options, &mut rng).is_err());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn richardson_is_exact_on_random_quadratics(
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
            c in -2.0f64..2.0,
        ) {
            let v = |x: f64| a + b * x + c * x * x;
            let out = richardson(&[1.0, 2.0, 3.0], &[v(1.0), v(2.0), v(3.0)]).unwrap();
            prop_assert!((out - a).abs() < 1e-9);
        }
    }
}
