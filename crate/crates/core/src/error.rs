use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("control and target both address qubit {0}")]
    ControlEqualsTarget(usize),
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitCountMismatch { expected: usize, found: usize },
    #[error("register of {0} qubits is not supported (maximum {max})", max = crate::qsim::MAX_QUBITS)]
    TooManyQubits(usize),
    #[error("feature vector is empty")]
    EmptyFeatureVector,
    #[error("invalid ansatz parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("ragged input: row {row} has length {found}, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("all points coincide; Gaussian bandwidth is zero")]
    DegenerateBandwidth,
    #[error("kernel matrix is identically zero; alignment undefined")]
    ZeroKernel,
    #[error("label {0} is not -1 or +1")]
    InvalidLabel(i64),
    #[error("neighbor count k = {k} invalid for {n} samples")]
    NeighborCount { k: usize, n: usize },
    #[error("weight count {found} does not match {expected} kernels")]
    WeightCount { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("gradient became non-finite at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("quadratic program did not converge within {iterations} sweeps")]
    QpNotConverged { iterations: usize },
    #[error("non-positive normalizer {value:e} (degenerate kernels)")]
    DegenerateKernels { value: f64 },
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("kernel matrix is not symmetric (|K_ij - K_ji| = {deviation:e})")]
    NotSymmetric { deviation: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("requested {requested} components but the fit data has rank {rank}")]
    RankDeficient { requested: usize, rank: usize },
    #[error("class {class} has {available} instances, {requested} requested")]
    InsufficientInstances {
        class: i8,
        requested: usize,
        available: usize,
    },
    #[error("digit label {0} outside 0-9")]
    DigitOutOfRange(u8),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("repeat {index} failed: {source}")]
    Repeat {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
