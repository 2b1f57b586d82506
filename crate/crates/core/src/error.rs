use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OqwError {
    /// Operand shapes are incompatible for the requested operation.
    #[error("shape error: {0}")]
    Shape(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A dimension computation overflowed.
    #[error("size error: {0}")]
    Size(String),

    /// A structural invariant (slice disjointness, walk layout) is violated.
    #[error("validation error: {0}")]
    Validation(String),

    /// The requested model exceeds the dense-integration dimension cap.
    #[error("capacity error: dimension {dim} exceeds cap {cap}")]
    Capacity { dim: usize, cap: usize },

    /// A file could not be read or written.
    #[error("i/o error: {0}")]
    Io(String),

    /// Circuit text could not be parsed.
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
}

/// The distinct failure classes of the circuit text parser.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("qubit {qubit} out of range 1..={num_qubits}")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} used more than once in one slice")]
    OverlappingQubits(usize),
}

pub type Result<T> = std::result::Result<T, OqwError>;
