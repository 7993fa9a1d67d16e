use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{n} qubits exceeds the dense-matrix limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("parameter vector has length {found}, circuit needs {expected}")]
    ParameterCount { expected: usize, found: usize },

    #[error("parameter slot {slot} is unbound (vector has {len} entries)")]
    UnboundSlot { slot: usize, len: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-finite energy at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}
