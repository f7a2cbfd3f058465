//! Trotterized transverse-field Ising circuits and their transpiled form.
//!
//! One Trotter layer applies `RX(theta)` to every section qubit (ascending
//! physical index) followed by `RZZ(phi)` on every induced coupler
//! (lexicographic order). Config `A` uses one angle per qubit, constant in
//! time; config `B` uses one angle per layer, shared by all qubits.
//! Transpilation rewrites each `RZZ` into `CNOT - RZ - CNOT` on the same pair.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chip::{ChipGraph, QubitSection};
use crate::error::{Error, Result};
use crate::linalg::{Cx, Mat2, Mat4};
use crate::scalar::{dbl, lit, Real};

/// Angle-assignment convention for the RX layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Config {
    /// Spatially varying, time-constant: one angle per section qubit.
    A,
    /// Time varying, spatially constant: one angle per layer.
    B,
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::A => write!(f, "A"),
            Config::B => write!(f, "B"),
        }
    }
}

/// Default ZZ rotation angle, `-pi/2`.
pub fn default_phi<T: Real>() -> T {
    lit(-FRAC_PI_2)
}

/// One circuit operation on physical qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate<T> {
    Rx { qubit: usize, theta: T },
    Rz { qubit: usize, phi: T },
    Rzz { a: usize, b: usize, phi: T },
    Cnot { control: usize, target: usize },
}

impl<T: Real> Gate<T> {
    /// Inverse gate (used by noise-amplification folding).
    pub fn dagger(&self) -> Self {
        match *self {
            Gate::Rx { qubit, theta } => Gate::Rx {
                qubit,
                theta: -theta,
            },
            Gate::Rz { qubit, phi } => Gate::Rz { qubit, phi: -phi },
            Gate::Rzz { a, b, phi } => Gate::Rzz { a, b, phi: -phi },
            Gate::Cnot { control, target } => Gate::Cnot { control, target },
        }
    }

    /// Physical qubits the gate touches, in matrix-convention order.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } => vec![qubit],
            Gate::Rzz { a, b, .. } => vec![a, b],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    /// True for the two-qubit gates.
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Rzz { .. } | Gate::Cnot { .. })
    }
}

/// `RX(theta) = [[cos(t/2), -i sin(t/2)], [-i sin(t/2), cos(t/2)]]`.
pub fn rx_matrix<T: Real>(theta: T) -> Mat2<T> {
    let half = theta / lit(2.0);
    let c = Cx::new(half.cos(), T::zero());
    let ms = Cx::new(T::zero(), -half.sin());
    [c, ms, ms, c]
}

/// `RZ(phi) = diag(e^{-i phi/2}, e^{i phi/2})`.
pub fn rz_matrix<T: Real>(phi: T) -> Mat2<T> {
    let half = phi / lit(2.0);
    let zero = Cx::new(T::zero(), T::zero());
    [
        Cx::new(half.cos(), -half.sin()),
        zero,
        zero,
        Cx::new(half.cos(), half.sin()),
    ]
}

/// Diagonal of `RZZ(phi)` in the `|q_a q_b>` basis:
/// `(e^{-i phi/2}, e^{i phi/2}, e^{i phi/2}, e^{-i phi/2})`.
pub fn rzz_diagonal<T: Real>(phi: T) -> [Cx<T>; 4] {
    let half = phi / lit(2.0);
    let minus = Cx::new(half.cos(), -half.sin());
    let plus = Cx::new(half.cos(), half.sin());
    [minus, plus, plus, minus]
}

/// `RZZ(phi)` as a dense 4x4 matrix.
pub fn rzz_matrix<T: Real>(phi: T) -> Mat4<T> {
    let d = rzz_diagonal(phi);
    let zero = Cx::new(T::zero(), T::zero());
    let mut m = [zero; 16];
    for (i, v) in d.into_iter().enumerate() {
        m[i * 4 + i] = v;
    }
    m
}

/// `CNOT` with the first index as control.
pub fn cnot_matrix<T: Real>() -> Mat4<T> {
    let zero = Cx::new(T::zero(), T::zero());
    let one = Cx::new(T::one(), T::zero());
    let mut m = [zero; 16];
    m[0] = one;
    m[4 + 1] = one;
    m[2 * 4 + 3] = one;
    m[3 * 4 + 2] = one;
    m
}

/// Dense matrix of any gate, for cross-checks and channel construction.
pub fn gate_matrix<T: Real>(gate: &Gate<T>) -> Vec<Cx<T>> {
    match *gate {
        Gate::Rx { theta, .. } => rx_matrix(theta).to_vec(),
        Gate::Rz { phi, .. } => rz_matrix(phi).to_vec(),
        Gate::Rzz { phi, .. } => rzz_matrix(phi).to_vec(),
        Gate::Cnot { .. } => cnot_matrix::<T>().to_vec(),
    }
}

/// First-order Trotterization parameters for the transverse-field Ising
/// Hamiltonian `H = -J sum ZZ - h sum X` evolved to `total_time` in steps of
/// `step`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterSpec<T> {
    /// Ising coupling `J`.
    pub coupling: T,
    /// Transverse field amplitude `h`.
    pub field: T,
    /// Trotter step `delta_t`.
    pub step: T,
    /// Total evolved time; must be an integer multiple of `step`.
    pub total_time: T,
}

impl<T: Real> TrotterSpec<T> {
    pub fn new(coupling: T, field: T, step: T, total_time: T) -> Result<Self> {
        if step <= T::zero() {
            return Err(Error::NonPositiveStep);
        }
        let ratio = dbl(total_time) / dbl(step);
        if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-9 {
            return Err(Error::NonIntegerLayers {
                total: dbl(total_time),
                step: dbl(step),
            });
        }
        Ok(Self {
            coupling,
            field,
            step,
            total_time,
        })
    }

    /// Number of Trotter layers `P = total_time / step`.
    pub fn layer_count(&self) -> usize {
        (dbl(self.total_time) / dbl(self.step)).round() as usize
    }

    /// Per-layer gate angles `(phi, theta) = (-2 J dt, 2 h dt)`.
    pub fn angles(&self) -> (T, T) {
        trotter_angles(self)
    }
}

/// Gate angles of one first-order Trotter layer: `phi = -2 J dt` for every
/// `RZZ` and `theta = 2 h dt` for every `RX`.
pub fn trotter_angles<T: Real>(spec: &TrotterSpec<T>) -> (T, T) {
    let two = lit::<T>(2.0);
    (
        -two * spec.coupling * spec.step,
        two * spec.field * spec.step,
    )
}

/// A Trotter circuit placed on a section of the device graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    section: QubitSection,
    config: Config,
    p_layers: usize,
    theta: Vec<T>,
    phi: T,
    gates: Vec<Gate<T>>,
    transpiled: bool,
    seed: Option<u64>,
}

impl<T: Real> Circuit<T> {
    /// Builds the logical circuit from explicit angles.
    ///
    /// `theta` holds one entry per section qubit for config `A` and one entry
    /// per layer for config `B`; every angle must lie in `[0, pi/2]`.
    pub fn from_parts(
        section: QubitSection,
        config: Config,
        p_layers: usize,
        theta: Vec<T>,
        phi: T,
    ) -> Result<Self> {
        if p_layers == 0 {
            return Err(Error::NoLayers);
        }
        let expected = match config {
            Config::A => section.len(),
            Config::B => p_layers,
        };
        if theta.len() != expected {
            return Err(Error::AngleCount {
                expected,
                got: theta.len(),
            });
        }
        // Upper bound is loosened by a few ulps so that pi/2 itself survives
        // rounding in single precision.
        let max_theta = FRAC_PI_2 * (1.0 + 4.0 * dbl(T::epsilon()));
        if let Some(&bad) = theta
            .iter()
            .find(|&&t| t < T::zero() || dbl(t) > max_theta)
        {
            return Err(Error::AngleRange(dbl(bad)));
        }
        let mut circuit = Self {
            section,
            config,
            p_layers,
            theta,
            phi,
            gates: Vec::new(),
            transpiled: false,
            seed: None,
        };
        circuit.gates = circuit.build_gates();
        Ok(circuit)
    }

    /// Builds a circuit with angles drawn uniformly from `[0, pi/2]` and the
    /// default `phi = -pi/2`.
    pub fn random<R: Rng + ?Sized>(
        section: QubitSection,
        config: Config,
        p_layers: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if p_layers == 0 {
            return Err(Error::NoLayers);
        }
        let n_angles = match config {
            Config::A => section.len(),
            Config::B => p_layers,
        };
        let theta: Vec<T> = (0..n_angles)
            .map(|_| lit(rng.gen_range(0.0..=FRAC_PI_2)))
            .collect();
        Self::from_parts(section, config, p_layers, theta, default_phi())
    }

    fn build_gates(&self) -> Vec<Gate<T>> {
        let mut gates =
            Vec::with_capacity(self.p_layers * (self.section.len() + self.section.edges().len()));
        for layer in 0..self.p_layers {
            for (i, &q) in self.section.qubits().iter().enumerate() {
                let theta = match self.config {
                    Config::A => self.theta[i],
                    Config::B => self.theta[layer],
                };
                gates.push(Gate::Rx { qubit: q, theta });
            }
            for &(a, b) in self.section.edges() {
                gates.push(Gate::Rzz {
                    a,
                    b,
                    phi: self.phi,
                });
            }
        }
        gates
    }

    /// Rewrites every `RZZ(phi)` on `(a, b)` as `CNOT(a->b), RZ(phi) on b,
    /// CNOT(a->b)`; the decomposition is exactly unitary-equivalent, with no
    /// global-phase drift.
    pub fn transpile(&self) -> Result<Self> {
        if self.transpiled {
            return Err(Error::AlreadyTranspiled);
        }
        let mut gates = Vec::with_capacity(self.gates.len() * 3);
        for gate in &self.gates {
            match *gate {
                Gate::Rzz { a, b, phi } => {
                    gates.push(Gate::Cnot {
                        control: a,
                        target: b,
                    });
                    gates.push(Gate::Rz { qubit: b, phi });
                    gates.push(Gate::Cnot {
                        control: a,
                        target: b,
                    });
                }
                g => gates.push(g),
            }
        }
        Ok(Self {
            gates,
            transpiled: true,
            ..self.clone()
        })
    }

    pub fn section(&self) -> &QubitSection {
        &self.section
    }

    pub fn config(&self) -> Config {
        self.config
    }

    pub fn p_layers(&self) -> usize {
        self.p_layers
    }

    /// RX angles: per qubit (config A) or per layer (config B).
    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn is_transpiled(&self) -> bool {
        self.transpiled
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Provenance seed, when the circuit came from a seeded generator.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Replaces the gate list (used by folding); section, angles and flags
    /// are preserved.
    pub(crate) fn with_gates(&self, gates: Vec<Gate<T>>) -> Self {
        Self {
            gates,
            ..self.clone()
        }
    }

    /// Serializable parameter set from which the circuit can be rebuilt.
    pub fn descriptor(&self) -> CircuitDescriptor<T> {
        CircuitDescriptor {
            config: self.config,
            q: self.section.qubits().to_vec(),
            p_layers: self.p_layers,
            theta: self.theta.clone(),
            phi: self.phi,
            seed: self.seed,
        }
    }
}

/// JSON-serializable description of a logical circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitDescriptor<T> {
    pub config: Config,
    pub q: Vec<usize>,
    pub p_layers: usize,
    pub theta: Vec<T>,
    pub phi: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl<T: Real> CircuitDescriptor<T> {
    /// Rebuilds the logical circuit on `graph`.
    pub fn to_circuit(&self, graph: &ChipGraph) -> Result<Circuit<T>> {
        let section = QubitSection::from_qubits(graph, self.q.clone())?;
        let mut circuit =
            Circuit::from_parts(section, self.config, self.p_layers, self.theta.clone(), self.phi)?;
        circuit.seed = self.seed;
        Ok(circuit)
    }
}
