use thiserror::Error;

/// Errors raised by lattice operations.
///
/// Every variant corresponds to a violated precondition or an exceeded
/// enumeration cap; nothing here is a soft failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("Gram matrix is not symmetric")]
    NonSymmetric,
    #[error("Gram matrix is degenerate (determinant 0)")]
    Degenerate,
    #[error("unknown lattice name `{0}`")]
    UnknownName(String),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("lattice is not negative definite")]
    NotNegativeDefinite,
    #[error("lattice is not even")]
    NotEven,
    #[error("matrix is not an isometry of the lattice")]
    NotAnIsometry,
    #[error("reflection is not integral on the lattice")]
    NotIntegral,
    #[error("cannot reflect in an isotropic vector")]
    IsotropicVector,
    #[error("{what} has size {size}, above the cap {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },
    #[error("rank {rank} exceeds the cap {cap}")]
    RankCapExceeded { rank: usize, cap: usize },
    #[error("generator {0} is not stable")]
    NotStable(usize),
    #[error("enumeration exceeded the cap of {0} elements")]
    EnumerationCapExceeded(usize),
    #[error("signature obstruction: {0}")]
    SignatureObstruction(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("n must be at least 2, got {0}")]
    BadN(i64),
    #[error("lattice is not hyperbolic (signature must be (1, k))")]
    NotHyperbolic,
    #[error("controller lies on the wall of a root")]
    ControllerOnWall,
    #[error("controller must have positive square")]
    BadController,
    #[error("integer overflow in a fixed-width fast path")]
    Overflow,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
