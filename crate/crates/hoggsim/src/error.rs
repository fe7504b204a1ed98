//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty formula text")]
    EmptyFormula,
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("invalid literal token `{token}`")]
    InvalidLiteral { token: String },
    #[error("invalid variable count declaration `{text}`")]
    InvalidVarCount { text: String },
    #[error("variable {var} out of range 1..={max}")]
    VariableOutOfRange { var: usize, max: usize },
    #[error("formula must declare at least one variable")]
    NoVariables,
    #[error("operation undefined for a formula with no clauses")]
    NoClauses,
    #[error("{context}: {n} variables exceeds the limit of {max}")]
    TooManyVariables {
        context: &'static str,
        n: usize,
        max: usize,
    },
    #[error("bit length mismatch: {left} vs {right}")]
    BitLengthMismatch { left: usize, right: usize },
    #[error("assignment index {index} out of range for {n} bits")]
    AssignmentOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unitary: max |UU† - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not Hermitian: max |A - A†| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("diagonal entry {index} has modulus {modulus} (expected 1)")]
    NotUnitModulus { index: usize, modulus: f64 },
    #[error("state vector norm {norm} is not 1")]
    NotNormalized { norm: f64 },
    #[error("sweep size {n} outside supported range 1..={max}")]
    SweepOutOfRange { n: usize, max: usize },
    #[error("empty pulse sequence")]
    EmptySequence,
    #[error("invalid pulse token `{token}`: {reason}")]
    InvalidPulse { token: String, reason: String },
    #[error("pulse spin index {spin} exceeds system size {spins}")]
    SpinOutOfRange { spin: usize, spins: usize },
    #[error("delay event requires a defined coupling constant")]
    UndefinedCoupling,
    #[error("coupling constant must be positive, got {value}")]
    NonPositiveCoupling { value: f64 },
    #[error("delay duration must be positive and finite, got {value}")]
    InvalidDelay { value: f64 },
    #[error("unknown builtin sequence `{name}`")]
    UnknownSequence { name: String },
    #[error("unknown target operator `{name}`")]
    UnknownTarget { name: String },
    #[error("noise level must be nonnegative and finite, got {value}")]
    InvalidNoise { value: f64 },
    #[error("line intensity {index} is not finite")]
    NonFiniteLine { index: usize },
    #[error("dataset has {have} entries; expected all {want} readout settings in canonical order")]
    IncompleteDataset { have: usize, want: usize },
    #[error("dataset trace metadata must be finite, got {value}")]
    NonFiniteTrace { value: f64 },
    #[error("design matrix rank {rank} < {expected}; null space dimension {null_dim}")]
    RankDeficient {
        rank: usize,
        expected: usize,
        null_dim: usize,
    },
    #[error("least-squares solve failed: {reason}")]
    SolveFailed { reason: String },
    #[error("io error at {path}: {message}")]
    Io { path: String, message: String },
}
