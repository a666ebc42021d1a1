use thiserror::Error;

/// Errors raised by the operator, compilation and simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("rep table has no entries")]
    EmptyTable,

    #[error("duplicate irrep label `{0}`")]
    DuplicateLabel(String),

    #[error("irrep `{label}` has dimension {dim}, expected at least 1")]
    InvalidDimension { label: String, dim: i64 },

    #[error("invalid casimir value `{0}`")]
    InvalidCasimir(String),

    #[error("unknown irrep label `{0}`")]
    UnknownLabel(String),

    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),

    #[error("invalid bitstring `{0}`")]
    InvalidBitstring(String),

    #[error("word step {step}: generator needs {needed} circle(s) at position {position}, only {available} present")]
    ArityMismatch {
        step: usize,
        position: usize,
        needed: usize,
        available: usize,
    },

    #[error("operator of shape {rows}x{cols} is not a square power-of-two matrix")]
    NotQubitOperator { rows: usize, cols: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("factor has no nonzero coefficient")]
    ZeroFactor,

    #[error("rotation weights are both zero")]
    ZeroWeights,

    #[error("amplitudes are not normalized (sum of squares {0})")]
    NotNormalized(f64),

    #[error("unsupported operator `{0}`")]
    UnsupportedOperator(String),

    #[error("operator has no nonzero Pauli terms")]
    ZeroOperator,

    #[error("operator acts on {0} qubits, the exact compiler supports at most 8")]
    TooManyQubits(usize),

    #[error("invalid qubit {qubit}: {reason}")]
    InvalidQubit { qubit: usize, reason: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("{op}: {label} is {computed}, expected {expected} within 0.005 rad")]
    AngleMismatch {
        op: String,
        label: String,
        computed: f64,
        expected: f64,
    },

    #[error("{op}: exact-mode residual {residual:e} exceeds 1e-10")]
    ExactResidual { op: String, residual: f64 },

    #[error("{op}: paper-mode circuit misses its factored form by {residual:e}")]
    FactoredFormResidual { op: String, residual: f64 },

    #[error("axiom `{name}` deviates by {deviation:e}")]
    AxiomViolation { name: String, deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
