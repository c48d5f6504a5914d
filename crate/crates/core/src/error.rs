use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pauli string must act on at least one qubit")]
    EmptyPauli,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("cannot parse pauli string {0:?}")]
    ParsePauli(String),

    #[error("state on {requested} qubits exceeds the cap of {cap}")]
    QubitCapExceeded { requested: usize, cap: usize },
    #[error("amplitude vector of length {len} is not a power of two")]
    BadAmplitudeCount { len: usize },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("operator {0} is not hermitian")]
    NotHermitian(String),
    #[error("observable is not involutory: {0}")]
    NotInvolutory(String),
    #[error("outcome {outcome} has zero probability")]
    ZeroProbability { outcome: i8 },

    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("invalid stabilizer code {name}: {reason}")]
    InvalidCode { name: String, reason: String },
    #[error("logical amplitudes: expected {expected}, got {got}")]
    AmplitudeCount { expected: usize, got: usize },
    #[error("projection annihilated every computational basis state")]
    ProjectionFailed,

    #[error("invalid network layout: {0}")]
    InvalidLayout(String),
    #[error("invalid operator selection for source {source_index}: {reason}")]
    InvalidSelection { source_index: usize, reason: String },
    #[error("parity conditions violated: {0}")]
    ParityViolation(String),
    #[error("no admissible phase-flip representative for source {source_index}: {reason}")]
    NoRepresentative { source_index: usize, reason: String },

    #[error("exact and closed-form values diverge: {0}")]
    CrossCheck(String),
    #[error("beta must be non-negative, got {0}")]
    NegativeBeta(f64),
    #[error("tilt degenerates: {0}")]
    DegenerateTilt(String),

    #[error("enumeration of {count} strategies exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("invalid hidden-variable strategy: {0}")]
    InvalidStrategy(String),
    #[error("classical bound exceeded: {0}")]
    BoundViolated(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("malformed scenario JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("invalid run configuration: {0}")]
    Config(String),
}
