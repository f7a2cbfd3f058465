//! Conversion of dataset records into network input tensors.
//!
//! Channels are ordered `[q', θ, z_noisy]` with `q' = q/10`; the noisy
//! channel is dropped for classical-only models. Config A inputs are
//! one-dimensional stacks of shape `(N, C)`; config B inputs are
//! two-dimensional stacks of shape `(N, P, C)` where the per-layer angles are
//! tiled across qubits and the per-qubit channels are tiled across layers.

use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};

use super::MapDims;
use crate::circuits::Config;
use crate::dataset::CircuitRecord;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Which channels a model consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    /// Descriptors plus the noisy per-qubit magnetization: `[q', θ, z]`.
    Hybrid,
    /// Descriptors only: `[q', θ]`.
    Classical,
}

impl InputKind {
    pub fn channels(self) -> usize {
        match self {
            InputKind::Hybrid => 3,
            InputKind::Classical => 2,
        }
    }
}

impl std::fmt::Display for InputKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputKind::Hybrid => write!(f, "hybrid"),
            InputKind::Classical => write!(f, "classical"),
        }
    }
}

/// A single network input in its natural shape.
#[derive(Clone, Debug, PartialEq)]
pub enum InputTensor<T> {
    /// Config A: `(N, C)`.
    A(Array2<T>),
    /// Config B: `(N, P, C)`.
    B(Array3<T>),
}

impl<T: Real> InputTensor<T> {
    pub fn config(&self) -> Config {
        match self {
            InputTensor::A(_) => Config::A,
            InputTensor::B(_) => Config::B,
        }
    }

    pub fn channels(&self) -> usize {
        match self {
            InputTensor::A(a) => a.ncols(),
            InputTensor::B(b) => b.shape()[2],
        }
    }
}

/// Builds the input tensor for one record.
pub fn build_input<T: Real>(record: &CircuitRecord<T>, kind: InputKind) -> Result<InputTensor<T>> {
    let (map, n, p) = record_map(record, kind)?;
    match record.config {
        Config::A => Ok(InputTensor::A(map)),
        Config::B => {
            let c = kind.channels();
            let arr = map
                .into_shape_with_order((n, p, c))
                .expect("row-major reshape of (n*p, c) to (n, p, c)");
            Ok(InputTensor::B(arr))
        }
    }
}

/// Builds the flat `(spatial, C)` feature map for one record, plus its
/// spatial extents `(n, p)` with `p = 1` for config A.
pub(crate) fn record_map<T: Real>(
    record: &CircuitRecord<T>,
    kind: InputKind,
) -> Result<(Array2<T>, usize, usize)> {
    let n = record.n;
    if record.q.len() != n {
        return Err(Error::LengthMismatch {
            left: record.q.len(),
            right: n,
        });
    }
    let expected_theta = match record.config {
        Config::A => n,
        Config::B => record.p_layers,
    };
    if record.theta.len() != expected_theta {
        return Err(Error::AngleCount {
            expected: expected_theta,
            got: record.theta.len(),
        });
    }
    if kind == InputKind::Hybrid && record.z_noisy.len() != n {
        return Err(Error::LengthMismatch {
            left: record.z_noisy.len(),
            right: n,
        });
    }
    let c = kind.channels();
    let p = match record.config {
        Config::A => 1,
        Config::B => record.p_layers,
    };
    let mut map = Array2::<T>::zeros((n * p, c));
    for i in 0..n {
        let q_norm = lit::<T>(record.q[i] as f64 / 10.0);
        for j in 0..p {
            let row = i * p + j;
            map[(row, 0)] = q_norm;
            map[(row, 1)] = match record.config {
                Config::A => record.theta[i],
                Config::B => record.theta[j],
            };
            if kind == InputKind::Hybrid {
                map[(row, 2)] = record.z_noisy[i];
            }
        }
    }
    Ok((map, n, p))
}

/// Flattens an [`InputTensor`] into the internal `(spatial, C)` layout after
/// checking it matches the model's configuration.
pub(crate) fn tensor_map<T: Real>(
    input: &InputTensor<T>,
    expected: Config,
) -> Result<(Array2<T>, usize, usize)> {
    if input.config() != expected {
        return Err(Error::ConfigMismatch {
            got: input.config().to_string(),
            expected: expected.to_string(),
        });
    }
    match input {
        InputTensor::A(a) => Ok((super::into_standard(a.clone()), a.nrows(), 1)),
        InputTensor::B(b) => {
            let (n, p, c) = (b.shape()[0], b.shape()[1], b.shape()[2]);
            let flat = b
                .as_standard_layout()
                .to_owned()
                .into_shape_with_order((n * p, c))
                .expect("row-major reshape of (n, p, c) to (n*p, c)");
            Ok((flat, n, p))
        }
    }
}

/// Copies a set of equally shaped per-record maps into one batch map.
pub(crate) fn assemble_batch<T: Real>(maps: &[&Array2<T>], n: usize, p: usize) -> (Array2<T>, MapDims) {
    let c = maps.first().map_or(0, |m| m.ncols());
    let spatial = n * p;
    let mut batch = Array2::<T>::zeros((maps.len() * spatial, c));
    for (s, m) in maps.iter().enumerate() {
        batch
            .slice_mut(ndarray::s![s * spatial..(s + 1) * spatial, ..])
            .assign(m);
    }
    (
        batch,
        MapDims {
            batch: maps.len(),
            n,
            p,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Estimator;

    fn record_a(q: Vec<usize>, theta: Vec<f64>, z: Vec<f64>) -> CircuitRecord<f64> {
        let n = q.len();
        CircuitRecord {
            id: 0,
            config: Config::A,
            n,
            p_layers: 2,
            q,
            theta,
            z_noisy: z,
            m_z_exact: 0.5,
            m_z_noisy: 0.4,
            p_noise: 1.0,
            estimator_meta: Estimator::default(),
            seed: 7,
        }
    }

    fn record_b(q: Vec<usize>, p_layers: usize, theta: Vec<f64>, z: Vec<f64>) -> CircuitRecord<f64> {
        let n = q.len();
        CircuitRecord {
            id: 0,
            config: Config::B,
            n,
            p_layers,
            q,
            theta,
            z_noisy: z,
            m_z_exact: 0.5,
            m_z_noisy: 0.4,
            p_noise: 1.0,
            estimator_meta: Estimator::default(),
            seed: 7,
        }
    }

    #[test]
    fn config_a_hybrid_matches_channel_definitions() {
        let rec = record_a(vec![4, 7, 10], vec![0.3, 0.6, 0.9], vec![0.1, -0.2, 0.8]);
        let t = build_input(&rec, InputKind::Hybrid).unwrap();
        let InputTensor::A(a) = t else {
            panic!("expected config A tensor")
        };
        let expected = [
            [0.4, 0.3, 0.1],
            [0.7, 0.6, -0.2],
            [1.0, 0.9, 0.8],
        ];
        assert_eq!(a.shape(), &[3, 3]);
        for i in 0..3 {
            for c in 0..3 {
                assert!((a[(i, c)] - expected[i][c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn classical_inputs_drop_the_noisy_channel() {
        let rec = record_a(vec![4, 7, 10], vec![0.3, 0.6, 0.9], vec![0.1, -0.2, 0.8]);
        let t = build_input(&rec, InputKind::Classical).unwrap();
        assert_eq!(t.channels(), 2);
        let InputTensor::A(a) = t else {
            panic!("expected config A tensor")
        };
        assert_eq!(a.shape(), &[3, 2]);
        assert!((a[(1, 0)] - 0.7).abs() < 1e-15);
        assert!((a[(1, 1)] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn config_b_tiles_theta_across_qubits() {
        let rec = record_b(vec![2, 3], 3, vec![0.2, 0.5, 0.8], vec![0.9, -0.1]);
        let t = build_input(&rec, InputKind::Hybrid).unwrap();
        let InputTensor::B(b) = t else {
            panic!("expected config B tensor")
        };
        assert_eq!(b.shape(), &[2, 3, 3]);
        for j in 0..3 {
            // θ channel identical across the qubit axis.
            assert_eq!(b[(0, j, 1)], b[(1, j, 1)]);
        }
        for i in 0..2 {
            // q' and z channels constant along the layer axis.
            for j in 1..3 {
                assert_eq!(b[(i, 0, 0)], b[(i, j, 0)]);
                assert_eq!(b[(i, 0, 2)], b[(i, j, 2)]);
            }
        }
        assert!((b[(1, 2, 1)] - 0.8).abs() < 1e-15);
        assert!((b[(1, 0, 2)] - (-0.1)).abs() < 1e-15);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let mut rec = record_a(vec![4, 7, 10], vec![0.3, 0.6], vec![0.1, -0.2, 0.8]);
        assert!(matches!(
            build_input(&rec, InputKind::Hybrid),
            Err(Error::AngleCount { .. })
        ));
        rec.theta = vec![0.3, 0.6, 0.9];
        rec.z_noisy = vec![0.1];
        assert!(matches!(
            build_input(&rec, InputKind::Hybrid),
            Err(Error::LengthMismatch { .. })
        ));
        // Classical inputs never read z, so the same record builds fine.
        assert!(build_input(&rec, InputKind::Classical).is_ok());
    }

    #[test]
    fn serde_names_are_snake_case() {
        assert_eq!(serde_json::to_string(&InputKind::Hybrid).unwrap(), "\"hybrid\"");
        assert_eq!(
            serde_json::to_string(&InputKind::Classical).unwrap(),
            "\"classical\""
        );
    }
}
