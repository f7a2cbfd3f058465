//! Simulation and learning core for noisy Trotterized transverse-field Ising
//! circuits on a fixed 16-qubit device graph.
//!
//! The crate covers the full experiment pipeline:
//!
//! * [`chip`] — the device graph and random placement of connected sections;
//! * [`circuits`] — Trotter circuit construction and CNOT+RZ transpilation;
//! * [`noise`] — Kraus channels, the per-gate noise model, and noise scaling;
//! * [`sim`] — statevector, trajectory, shot and density-matrix estimators;
//! * [`zne`] — unitary folding and Richardson zero-noise extrapolation;
//! * [`dataset`] — record generation and JSONL persistence;
//! * [`cnn`] — a small size-generalizing convolutional regressor with Adam;
//! * [`metrics`] — MSE, coefficient of determination and Pearson correlation.
//!
//! All numerical code is generic over the scalar type through [`scalar::Real`]
//! (implemented for `f32` and `f64`); the aliases below fix the two supported
//! precisions for callers that do not need the generic forms.

pub mod chip;
pub mod circuits;
pub mod cnn;
pub mod dataset;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod scalar;
pub mod sim;
pub mod zne;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision circuit over the device graph.
pub type Circuit64 = circuits::Circuit<f64>;
/// Single-precision circuit over the device graph.
pub type Circuit32 = circuits::Circuit<f32>;
/// Double-precision per-gate noise model.
pub type NoiseModel64 = noise::NoiseModel<f64>;
/// Single-precision per-gate noise model.
pub type NoiseModel32 = noise::NoiseModel<f32>;
/// Double-precision pure state.
pub type StateVector64 = sim::StateVector<f64>;
/// Single-precision pure state.
pub type StateVector32 = sim::StateVector<f32>;
/// Double-precision dataset record.
pub type CircuitRecord64 = dataset::CircuitRecord<f64>;
/// Single-precision dataset record.
pub type CircuitRecord32 = dataset::CircuitRecord<f32>;
/// Double-precision CNN regressor.
pub type CnnModel64 = cnn::CnnModel<f64>;
/// Single-precision CNN regressor.
pub type CnnModel32 = cnn::CnnModel<f32>;
