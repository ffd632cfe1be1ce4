use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit label {0} is not part of the labeling")]
    UnknownLabel(usize),
    #[error("qubit label {0} appears more than once")]
    DuplicateLabel(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("projectors do not form a complete orthogonal set (deviation {0:e})")]
    IncompleteProjectors(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("expectation value has imaginary residue {0:e}")]
    ComplexExpectation(f64),
    #[error("setting {0} is out of range 0..=2")]
    InvalidSetting(usize),
    #[error("bit mask 00 selects no outcome bit")]
    EmptyMask,
    #[error("inequality index {0} is out of range 1..=16")]
    InvalidIndex(usize),
    #[error("state labels {found:?} do not match a known party layout")]
    LabelMismatch { found: Vec<usize> },
    #[error("behavior is not normalized for settings ({x},{y}): total {total}")]
    Unnormalized { x: usize, y: usize, total: f64 },
    #[error("negative probability {value} in behavior")]
    NegativeProbability { value: f64 },
    #[error("integer overflow during exact elimination")]
    Overflow,
    #[error("no deterministic strategy saturates inequality {0}")]
    EmptySaturator(usize),
    #[error("inequality {index}: quantum witness reached {value}, not {expected}")]
    AttainmentFailed { index: usize, value: f64, expected: i32 },
    #[error("no Bell product reference matches the post-measurement state (best fidelity {0})")]
    NoMatchingReference(f64),
    #[error("insufficient samples: setting pair ({x},{y}) has no events")]
    InsufficientSamples { x: usize, y: usize },
    #[error("failed to parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
