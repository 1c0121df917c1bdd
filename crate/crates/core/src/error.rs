use thiserror::Error;

/// Errors raised by constructions and verifiers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("composition of consecutive maps is not zero{} ({entries} nonzero entries)", degree.map(|d| format!(" in degree {d}")).unwrap_or_default())]
    CompositionNotZero { degree: Option<i64>, entries: usize },

    #[error("d^2 is nonzero: witness {witness}")]
    DSquareNonzero { witness: String },

    #[error("degenerate subcomplex is not closed under the differential in degree {degree}")]
    NotClosed { degree: i64 },

    #[error("differential mixes the level-0 summand with the positive part at {witness}")]
    MixingDetected { witness: String },

    #[error("size limit exceeded: {what} has {count} elements (cap {cap})")]
    SizeLimitExceeded { what: String, count: usize, cap: usize },

    #[error("H^1 of the space is nonzero over the working field (dimension {dim}); not simply connected")]
    NotSimplyConnectedProxy { dim: usize },

    #[error("label {label} in degree {degree} is not part of the basis")]
    LabelOutOfBasis { label: String, degree: i64 },

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("coefficient {0} is not defined over the working field")]
    Coefficient(String),

    #[error("generator degrees do not give a finite-type module: {0}")]
    NotFiniteType(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
