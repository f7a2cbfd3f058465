//! Crate-wide error type.
//!
//! Variants are grouped by origin: invalid arguments and configuration,
//! numerical failures, and I/O or format problems. The CLI maps these groups
//! onto distinct process exit codes.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// All failure modes surfaced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    // --- arguments and configuration -------------------------------------
    #[error("section size {n} out of range [{min}, {max}]")]
    SectionSize { n: usize, min: usize, max: usize },
    #[error("qubit index {index} out of range for a {num_qubits}-qubit graph")]
    QubitIndex { index: usize, num_qubits: usize },
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("qubit set {0:?} does not induce a connected subgraph")]
    DisconnectedSection(Vec<usize>),
    #[error("qubit list must be strictly ascending, got {0:?}")]
    UnsortedSection(Vec<usize>),
    #[error("layer count must be at least 1")]
    NoLayers,
    #[error("expected {expected} angles, got {got}")]
    AngleCount { expected: usize, got: usize },
    #[error("angle {0} outside [0, pi/2]")]
    AngleRange(f64),
    #[error("step size must be positive")]
    NonPositiveStep,
    #[error("total time {total} is not an integer multiple of step {step}")]
    NonIntegerLayers { total: f64, step: f64 },
    #[error("circuit is already transpiled")]
    AlreadyTranspiled,
    #[error("operation requires a transpiled circuit")]
    NotTranspiled,
    #[error("p_noise {0} outside [0, 1]")]
    PNoiseRange(f64),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("noise config: {0}")]
    NoiseConfig(String),
    #[error("trajectory count must be at least 1")]
    NoTrajectories,
    #[error("shot count must be at least 1")]
    NoShots,
    #[error("unsupported noise scale factor {0}; supported factors are 1, 2 and 3")]
    UnsupportedScaleFactor(u32),
    #[error("scale factors must be distinct and ascending")]
    BadScaleFactors,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("split fractions must be non-negative and sum to 1, got sum {0}")]
    BadFractions(f64),
    #[error("non-zero split fraction produced an empty partition")]
    EmptySplit,
    #[error("record count must be at least 1")]
    EmptyGeneration,
    #[error("record config {got} does not match model config {expected}")]
    ConfigMismatch { got: String, expected: String },
    #[error("input has {got} channels but the model expects {expected}")]
    ChannelMismatch { got: usize, expected: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    // --- numerical --------------------------------------------------------
    #[error("{n} qubits exceeds the {cap}-qubit cap for this representation")]
    QubitCap { n: usize, cap: usize },
    #[error("channel is not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },
    #[error("targets have zero variance; coefficient of determination is undefined")]
    ZeroVariance,
    #[error("constant sequence; correlation is undefined")]
    ConstantInput,
    #[error("training diverged with non-finite loss at epoch {epoch}")]
    TrainingDiverged { epoch: usize },
    #[error("prediction is non-finite")]
    NonFinitePrediction,

    // --- I/O and formats ---------------------------------------------------
    #[error("dataset schema version {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid arguments or configuration rather
    /// than by data encountered mid-computation.
    pub fn is_usage(&self) -> bool {
        use Error::*;
        matches!(
            self,
            SectionSize { .. }
                | QubitIndex { .. }
                | SelfLoop(..)
                | DisconnectedGraph
                | DisconnectedSection(..)
                | UnsortedSection(..)
                | NoLayers
                | AngleCount { .. }
                | AngleRange(..)
                | NonPositiveStep
                | NonIntegerLayers { .. }
                | AlreadyTranspiled
                | NotTranspiled
                | PNoiseRange(..)
                | ProbabilityRange(..)
                | NoiseConfig(..)
                | NoTrajectories
                | NoShots
                | UnsupportedScaleFactor(..)
                | BadScaleFactors
                | TooFewPoints { .. }
                | LengthMismatch { .. }
                | EmptyInput
                | BadFractions(..)
                | EmptySplit
                | EmptyGeneration
                | ConfigMismatch { .. }
                | ChannelMismatch { .. }
                | InvalidParameter(..)
        )
    }

    /// True for I/O and file-format errors.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::SchemaVersion { .. } | Error::ModelFormat(..) | Error::Io(..) | Error::Json(..)
        )
    }
}
