//! Kraus channels and the per-gate device noise model.
//!
//! Every noisy gate is followed by one [`KrausChannel`]: a single mixture of
//! branches, each either a unitary applied with a state-independent
//! probability (weighted branches) or a general Kraus operator whose branch
//! probability is state-dependent. Keeping the whole channel as one mixture —
//! rather than composing sub-channels — preserves the nominal branch
//! probabilities exactly, so e.g. an injected Pauli term keeps its configured
//! probability verbatim.
//!
//! Noise strength is scaled *per channel*: scaling by `p` keeps every
//! non-identity branch but multiplies its weight by `p`, moving the slack to
//! the identity branch. At the map level this is exact linear interpolation
//! between the identity channel (`p = 0`) and the nominal channel (`p = 1`),
//! and scaling a depolarizing channel of strength `s` by `p` yields a
//! depolarizing channel of strength `p * s`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chip::ChipGraph;
use crate::error::{Error, Result};
use crate::linalg::{identity, kron2, mat_dagger, mat_mul, max_identity_deviation, Cx, Mat2};
use crate::scalar::{dbl, lit, Real};

/// Tolerance for the completely-positive trace-preserving check.
pub const CPTP_TOL: f64 = 1e-10;

/// One branch of a Kraus channel.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausBranch<T> {
    /// `Some(p)`: unitary branch taken with state-independent probability `p`.
    /// `None`: general Kraus operator; the branch probability is `|K psi|^2`.
    pub weight: Option<T>,
    /// Row-major `dim x dim` operator.
    pub matrix: Vec<Cx<T>>,
    /// Cached flag: the matrix is exactly the identity, so trajectory
    /// sampling can skip applying it.
    identity: bool,
}

impl<T: Real> KrausBranch<T> {
    pub fn unitary(weight: T, matrix: Vec<Cx<T>>) -> Self {
        let identity = is_identity_matrix(&matrix);
        Self {
            weight: Some(weight),
            matrix,
            identity,
        }
    }

    pub fn general(matrix: Vec<Cx<T>>) -> Self {
        let identity = is_identity_matrix(&matrix);
        Self {
            weight: None,
            matrix,
            identity,
        }
    }

    /// True when the operator is exactly the identity matrix.
    pub fn is_identity(&self) -> bool {
        self.identity
    }
}

fn is_identity_matrix<T: Real>(matrix: &[Cx<T>]) -> bool {
    let dim = (matrix.len() as f64).sqrt() as usize;
    if dim * dim != matrix.len() {
        return false;
    }
    matrix.iter().enumerate().all(|(i, v)| {
        let expect = if i % (dim + 1) == 0 { T::one() } else { T::zero() };
        v.re == expect && v.im == T::zero()
    })
}

/// A quantum channel in mixed Kraus form acting on one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T> {
    dim: usize,
    branches: Vec<KrausBranch<T>>,
}

impl<T: Real> KrausChannel<T> {
    /// Builds a channel from raw branches without validating trace
    /// preservation; use [`validate_cptp`] or [`KrausChannel::checked`] to
    /// verify.
    pub fn from_branches(dim: usize, branches: Vec<KrausBranch<T>>) -> Self {
        debug_assert!(dim == 2 || dim == 4, "channels act on one or two qubits");
        for b in &branches {
            assert_eq!(b.matrix.len(), dim * dim, "branch dimension mismatch");
        }
        Self { dim, branches }
    }

    /// As [`from_branches`](Self::from_branches), but fails unless the
    /// branches satisfy the trace-preservation sum within [`CPTP_TOL`].
    pub fn checked(dim: usize, branches: Vec<KrausBranch<T>>) -> Result<Self> {
        let channel = Self::from_branches(dim, branches);
        let deviation = channel.trace_preservation_deviation();
        if deviation > lit(CPTP_TOL) {
            return Err(Error::NotTracePreserving {
                deviation: dbl(deviation),
            });
        }
        Ok(channel)
    }

    /// The do-nothing channel.
    pub fn identity_channel(dim: usize) -> Self {
        Self::from_branches(dim, vec![KrausBranch::unitary(T::one(), identity(dim))])
    }

    /// Mixture of unitaries `(weight, U)`; weights must be non-negative and
    /// sum to 1 within [`CPTP_TOL`] for the channel to validate.
    pub fn unitary_mixture(dim: usize, terms: Vec<(T, Vec<Cx<T>>)>) -> Result<Self> {
        for &(w, _) in &terms {
            if w < T::zero() || w > T::one() {
                return Err(Error::ProbabilityRange(dbl(w)));
            }
        }
        Self::checked(
            dim,
            terms
                .into_iter()
                .map(|(w, m)| KrausBranch::unitary(w, m))
                .collect(),
        )
    }

    /// Single-qubit depolarizing channel of strength `p`: identity with
    /// probability `1 - 3p/4` and each of X, Y, Z with probability `p/4`.
    pub fn depolarizing_1q(p: T) -> Result<Self> {
        if p < T::zero() || p > T::one() {
            return Err(Error::ProbabilityRange(dbl(p)));
        }
        let quarter = p / lit(4.0);
        let mut branches = vec![KrausBranch::unitary(
            T::one() - lit::<T>(3.0) * quarter,
            identity(2),
        )];
        for pauli in [Pauli::X, Pauli::Y, Pauli::Z] {
            branches.push(KrausBranch::unitary(quarter, pauli.matrix_owned().to_vec()));
        }
        Self::checked(2, branches)
    }

    /// Two-qubit depolarizing channel of strength `p`: identity with
    /// probability `1 - 15p/16` and each non-identity Pauli pair with
    /// probability `p/16`.
    pub fn depolarizing_2q(p: T) -> Result<Self> {
        if p < T::zero() || p > T::one() {
            return Err(Error::ProbabilityRange(dbl(p)));
        }
        let sixteenth = p / lit(16.0);
        let mut branches = vec![KrausBranch::unitary(
            T::one() - lit::<T>(15.0) * sixteenth,
            identity(4),
        )];
        for (a, b) in Pauli::pairs().into_iter().skip(1) {
            branches.push(KrausBranch::unitary(
                sixteenth,
                kron2(&a.matrix_owned(), &b.matrix_owned()).to_vec(),
            ));
        }
        Self::checked(4, branches)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branches(&self) -> &[KrausBranch<T>] {
        &self.branches
    }

    /// Probability mass sitting on exact-identity branches.
    pub fn identity_weight(&self) -> T {
        self.branches
            .iter()
            .filter(|b| b.is_identity())
            .filter_map(|b| b.weight)
            .fold(T::zero(), |acc, w| acc + w)
    }

    /// Max modulus deviation of `sum_k p_k U_k^dag U_k + sum_j K_j^dag K_j`
    /// from the identity.
    pub fn trace_preservation_deviation(&self) -> T {
        let mut sum = vec![Cx::new(T::zero(), T::zero()); self.dim * self.dim];
        for b in &self.branches {
            let prod = mat_mul(self.dim, &mat_dagger(self.dim, &b.matrix), &b.matrix);
            let scale = b.weight.unwrap_or_else(T::one);
            for (s, p) in sum.iter_mut().zip(prod) {
                *s += p * Cx::new(scale, T::zero());
            }
        }
        max_identity_deviation(self.dim, &sum)
    }

    /// Interpolates the channel toward the identity: the identity branch
    /// absorbs `1 - p` of the total non-identity weight, every other
    /// weighted branch is multiplied by `p`, and general Kraus operators are
    /// scaled by `sqrt(p)`. `scale(1)` is a no-op; `scale(0)` is the
    /// identity channel.
    pub fn scale(&self, p: T) -> Result<Self> {
        if p < T::zero() || p > T::one() {
            return Err(Error::PNoiseRange(dbl(p)));
        }
        if p == T::one() {
            return Ok(self.clone());
        }
        let mut identity_total = T::one() - p + p * self.identity_weight();
        // General identity branches (K = I with state-dependent weight) are
        // rare but legal; fold them into the weighted identity as |I psi|^2 = 1.
        let sqrt_p = p.sqrt();
        let mut branches = Vec::with_capacity(self.branches.len());
        for b in &self.branches {
            if b.is_identity() && b.weight.is_none() {
                identity_total += p;
                continue;
            }
            if b.is_identity() {
                continue; // already counted in identity_weight
            }
            match b.weight {
                Some(w) => {
                    let scaled = p * w;
                    if scaled > T::zero() {
                        branches.push(KrausBranch::unitary(scaled, b.matrix.clone()));
                    }
                }
                None => {
                    if p > T::zero() {
                        let m: Vec<Cx<T>> = b
                            .matrix
                            .iter()
                            .map(|v| *v * Cx::new(sqrt_p, T::zero()))
                            .collect();
                        branches.push(KrausBranch::general(m));
                    }
                }
            }
        }
        branches.insert(0, KrausBranch::unitary(identity_total, identity(self.dim)));
        Ok(Self::from_branches(self.dim, branches))
    }
}

/// True when the branch operators satisfy trace preservation within
/// [`CPTP_TOL`].
pub fn validate_cptp<T: Real>(channel: &KrausChannel<T>) -> bool {
    channel.trace_preservation_deviation() <= lit(CPTP_TOL)
}

/// Single-qubit Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Dense 2x2 matrix.
    pub fn matrix_owned<T: Real>(self) -> Mat2<T> {
        let zero = Cx::new(T::zero(), T::zero());
        let one = Cx::new(T::one(), T::zero());
        let i = Cx::new(T::zero(), T::one());
        match self {
            Pauli::I => [one, zero, zero, one],
            Pauli::X => [zero, one, one, zero],
            Pauli::Y => [zero, -i, i, zero],
            Pauli::Z => [one, zero, zero, -one],
        }
    }

    /// All 16 ordered Pauli pairs, `II` first.
    pub fn pairs() -> Vec<(Pauli, Pauli)> {
        let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let mut out = Vec::with_capacity(16);
        for a in all {
            for b in all {
                out.push((a, b));
            }
        }
        out
    }
}

/// Parses a two-character Pauli string such as `"XZ"` into the 4x4 operator
/// `P_a (x) P_b` (first character on the lower-indexed qubit).
pub fn pauli_pair_matrix<T: Real>(ops: &str) -> Result<Vec<Cx<T>>> {
    let chars: Vec<char> = ops.chars().collect();
    if chars.len() != 2 {
        return Err(Error::NoiseConfig(format!(
            "pauli term '{ops}' must have exactly two characters"
        )));
    }
    let a = Pauli::from_char(chars[0])
        .ok_or_else(|| Error::NoiseConfig(format!("unknown pauli '{}'", chars[0])))?;
    let b = Pauli::from_char(chars[1])
        .ok_or_else(|| Error::NoiseConfig(format!("unknown pauli '{}'", chars[1])))?;
    Ok(kron2(&a.matrix_owned(), &b.matrix_owned()).to_vec())
}

/// Asymmetric readout flip probabilities of one qubit.
///
/// A true 0 reads as 1 with probability `p01`; a true 1 reads as 0 with
/// probability `p10`. On expectation values this acts as the affine map
/// `z -> (1 - p01 - p10) z + (p10 - p01)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError<T> {
    pub p01: T,
    pub p10: T,
}

impl<T: Real> ReadoutError<T> {
    pub fn new(p01: T, p10: T) -> Result<Self> {
        for p in [p01, p10] {
            if p < T::zero() || p > T::one() {
                return Err(Error::ProbabilityRange(dbl(p)));
            }
        }
        if p01 + p10 > T::one() {
            return Err(Error::NoiseConfig(format!(
                "readout p01 + p10 = {} exceeds 1",
                dbl(p01 + p10)
            )));
        }
        Ok(Self { p01, p10 })
    }

    pub fn noiseless() -> Self {
        Self {
            p01: T::zero(),
            p10: T::zero(),
        }
    }

    /// Applies the affine expectation-value map.
    #[inline]
    pub fn apply(&self, z: T) -> T {
        (T::one() - self.p01 - self.p10) * z + (self.p10 - self.p01)
    }
}

/// Which single-qubit gate a channel is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SingleGateKind {
    Rx,
    Rz,
}

/// Per-gate noise model over the device graph.
///
/// CNOT channels are keyed by coupler `(a, b)` with `a < b`; single-qubit
/// channels by `(gate kind, qubit)`. `p_noise` records the cumulative noise
/// scale relative to the nominal model.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel<T> {
    num_qubits: usize,
    cnot: BTreeMap<(usize, usize), KrausChannel<T>>,
    single: BTreeMap<(SingleGateKind, usize), KrausChannel<T>>,
    readout: Vec<ReadoutError<T>>,
    p_noise: T,
}

impl<T: Real> NoiseModel<T> {
    /// A model with no noise at all (empty channel maps, zero readout error).
    pub fn noiseless(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            cnot: BTreeMap::new(),
            single: BTreeMap::new(),
            readout: vec![ReadoutError::noiseless(); num_qubits],
            p_noise: T::zero(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Channel following a CNOT on coupler `(a, b)` (order-insensitive).
    pub fn cnot_channel(&self, a: usize, b: usize) -> Option<&KrausChannel<T>> {
        self.cnot.get(&(a.min(b), a.max(b)))
    }

    /// Channel following a single-qubit gate on `q`.
    pub fn single_channel(&self, kind: SingleGateKind, q: usize) -> Option<&KrausChannel<T>> {
        self.single.get(&(kind, q))
    }

    pub fn readout(&self, q: usize) -> ReadoutError<T> {
        self.readout
            .get(q)
            .copied()
            .unwrap_or_else(ReadoutError::noiseless)
    }

    /// Cumulative two-qubit noise scale relative to the nominal model.
    pub fn p_noise(&self) -> T {
        self.p_noise
    }

    /// Validates every channel in the model.
    pub fn validate(&self) -> Result<()> {
        for channel in self.cnot.values().chain(self.single.values()) {
            let deviation = channel.trace_preservation_deviation();
            if deviation > lit(CPTP_TOL) {
                return Err(Error::NotTracePreserving {
                    deviation: dbl(deviation),
                });
            }
        }
        Ok(())
    }

    /// Returns a copy with every CNOT channel interpolated toward the
    /// identity by `p`; single-qubit and readout errors are untouched.
    pub fn scale_cnot(&self, p: T) -> Result<Self> {
        if p < T::zero() || p > T::one() {
            return Err(Error::PNoiseRange(dbl(p)));
        }
        let mut cnot = BTreeMap::new();
        for (&k, channel) in &self.cnot {
            cnot.insert(k, channel.scale(p)?);
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            cnot,
            single: self.single.clone(),
            readout: self.readout.clone(),
            p_noise: self.p_noise * p,
        })
    }
}

/// Free-function form of [`NoiseModel::scale_cnot`].
pub fn scale_cnot_noise<T: Real>(model: &NoiseModel<T>, p: T) -> Result<NoiseModel<T>> {
    model.scale_cnot(p)
}

/// Builds the default device noise model on `graph`: depolarizing strength
/// 1e-2 after every CNOT (plus an extra X(x)Z term with probability 2.7e-4 on
/// coupler (12, 15)), depolarizing 3e-4 after every single-qubit gate, and
/// symmetric 2e-2 readout errors.
pub fn default_model<T: Real>(graph: &ChipGraph) -> NoiseModel<T> {
    NoiseConfig::default()
        .build(graph)
        .expect("default noise config is valid")
}

fn default_p_noise() -> f64 {
    1.0
}

fn default_two_qubit_depol() -> f64 {
    1e-2
}

fn default_single_qubit_depol() -> f64 {
    3e-4
}

fn default_readout_p() -> f64 {
    2e-2
}

/// An extra Pauli error attached to one coupler's CNOT channel.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PauliTermConfig {
    /// Two-character Pauli string, first character on the lower qubit index.
    pub ops: String,
    pub prob: f64,
}

/// Per-coupler overrides of the CNOT channel.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EdgeNoiseConfig {
    pub pair: [usize; 2],
    /// Extra unitary Pauli branches with fixed probabilities.
    #[serde(default)]
    pub pauli_terms: Vec<PauliTermConfig>,
    /// Extra general Kraus operators, row-major 4x4 matrices of `[re, im]`
    /// pairs. Their contribution must keep the whole channel CPTP.
    #[serde(default)]
    pub kraus: Vec<Vec<[f64; 2]>>,
    /// Overrides the global two-qubit depolarizing strength on this coupler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depolarizing: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoQubitNoiseConfig {
    #[serde(default = "default_two_qubit_depol")]
    pub depolarizing: f64,
    #[serde(default)]
    pub edges: Vec<EdgeNoiseConfig>,
}

impl Default for TwoQubitNoiseConfig {
    fn default() -> Self {
        Self {
            depolarizing: default_two_qubit_depol(),
            edges: vec![EdgeNoiseConfig {
                pair: [12, 15],
                pauli_terms: vec![PauliTermConfig {
                    ops: "XZ".to_string(),
                    prob: 2.7e-4,
                }],
                kraus: Vec::new(),
                depolarizing: None,
            }],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingleQubitNoiseConfig {
    #[serde(default = "default_single_qubit_depol")]
    pub depolarizing: f64,
}

impl Default for SingleQubitNoiseConfig {
    fn default() -> Self {
        Self {
            depolarizing: default_single_qubit_depol(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReadoutNoiseConfig {
    #[serde(default = "default_readout_p")]
    pub p01: f64,
    #[serde(default = "default_readout_p")]
    pub p10: f64,
}

impl Default for ReadoutNoiseConfig {
    fn default() -> Self {
        Self {
            p01: default_readout_p(),
            p10: default_readout_p(),
        }
    }
}

/// JSON-serializable noise model description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    /// Overall two-qubit noise scale applied after building the nominal model.
    pub p_noise: f64,
    pub two_qubit: TwoQubitNoiseConfig,
    pub single_qubit: SingleQubitNoiseConfig,
    pub readout: ReadoutNoiseConfig,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            p_noise: default_p_noise(),
            two_qubit: TwoQubitNoiseConfig::default(),
            single_qubit: SingleQubitNoiseConfig::default(),
            readout: ReadoutNoiseConfig::default(),
        }
    }
}

impl NoiseConfig {
    /// Default configuration with the two-qubit noise scale set to `p`.
    pub fn with_p_noise(p: f64) -> Self {
        Self {
            p_noise: p,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Materializes the model on `graph`, validating every channel.
    pub fn build<T: Real>(&self, graph: &ChipGraph) -> Result<NoiseModel<T>> {
        if !(0.0..=1.0).contains(&self.p_noise) {
            return Err(Error::PNoiseRange(self.p_noise));
        }
        let mut overrides: BTreeMap<(usize, usize), &EdgeNoiseConfig> = BTreeMap::new();
        for edge in &self.two_qubit.edges {
            let key = (
                edge.pair[0].min(edge.pair[1]),
                edge.pair[0].max(edge.pair[1]),
            );
            if !graph.has_edge(key.0, key.1) {
                return Err(Error::NoiseConfig(format!(
                    "coupler ({}, {}) is not an edge of the device graph",
                    key.0, key.1
                )));
            }
            overrides.insert(key, edge);
        }
        let mut cnot = BTreeMap::new();
        for &(a, b) in graph.edges() {
            let spec = overrides.get(&(a, b)).copied();
            cnot.insert((a, b), build_cnot_channel::<T>(self, spec)?);
        }
        let mut single = BTreeMap::new();
        let p1: T = lit(self.single_qubit.depolarizing);
        for kind in [SingleGateKind::Rx, SingleGateKind::Rz] {
            for q in 0..graph.num_qubits() {
                single.insert((kind, q), KrausChannel::depolarizing_1q(p1)?);
            }
        }
        let readout: Vec<ReadoutError<T>> = (0..graph.num_qubits())
            .map(|_| ReadoutError::new(lit(self.readout.p01), lit(self.readout.p10)))
            .collect::<Result<_>>()?;
        let model = NoiseModel {
            num_qubits: graph.num_qubits(),
            cnot,
            single,
            readout,
            p_noise: T::one(),
        };
        model.validate()?;
        if self.p_noise == 1.0 {
            Ok(model)
        } else {
            model.scale_cnot(lit(self.p_noise))
        }
    }
}

/// Assembles one coupler's CNOT channel as a single mixture: the identity
/// remainder, fifteen depolarizing Pauli branches, any configured Pauli
/// terms at their exact probabilities, and any general Kraus operators.
fn build_cnot_channel<T: Real>(
    config: &NoiseConfig,
    spec: Option<&EdgeNoiseConfig>,
) -> Result<KrausChannel<T>> {
    let depol = spec
        .and_then(|s| s.depolarizing)
        .unwrap_or(config.two_qubit.depolarizing);
    if !(0.0..=1.0).contains(&depol) {
        return Err(Error::ProbabilityRange(depol));
    }
    let sixteenth: T = lit(depol / 16.0);
    let mut term_total = T::zero();
    let mut branches = Vec::new();
    for (a, b) in Pauli::pairs().into_iter().skip(1) {
        branches.push(KrausBranch::unitary(
            sixteenth,
            kron2(&a.matrix_owned(), &b.matrix_owned()).to_vec(),
        ));
        term_total += sixteenth;
    }
    if let Some(spec) = spec {
        for term in &spec.pauli_terms {
            if !(0.0..=1.0).contains(&term.prob) {
                return Err(Error::ProbabilityRange(term.prob));
            }
            let prob: T = lit(term.prob);
            branches.push(KrausBranch::unitary(prob, pauli_pair_matrix(&term.ops)?));
            term_total += prob;
        }
        for matrix in &spec.kraus {
            if matrix.len() != 16 {
                return Err(Error::NoiseConfig(format!(
                    "kraus operator has {} entries, expected 16",
                    matrix.len()
                )));
            }
            let m: Vec<Cx<T>> = matrix
                .iter()
                .map(|&[re, im]| Cx::new(lit(re), lit(im)))
                .collect();
            // A general operator contributes K^dag K to the trace sum; fold
            // its trace share into the identity remainder.
            let trace_share = mat_mul(4, &mat_dagger(4, &m), &m)
                .iter()
                .step_by(5)
                .fold(T::zero(), |acc, v| acc + v.re)
                / lit(4.0);
            term_total += trace_share;
            branches.push(KrausBranch::general(m));
        }
    }
    let identity_weight = T::one() - term_total;
    if identity_weight < -lit::<T>(CPTP_TOL) {
        return Err(Error::NoiseConfig(format!(
            "channel branch probabilities exceed 1 by {}",
            dbl(-identity_weight)
        )));
    }
    branches.insert(
        0,
        KrausBranch::unitary(identity_weight.max(T::zero()), identity(4)),
    );
    KrausChannel::checked(4, branches)
}
