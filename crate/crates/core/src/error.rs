use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator is not antilinear (commutation residual {0:.3e})")]
    NotAntilinear(f64),
    #[error("operator is not complex-linear (commutation residual {0:.3e})")]
    NotComplexLinear(f64),
    #[error("operator is singular (smallest singular value {0:.3e})")]
    Singular(f64),
    #[error("operator is not positive definite (eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("subspace is not standard: {0}")]
    NotStandard(String),
    #[error("modular relation J Delta J Delta = 1 violated (residual {0:.3e})")]
    ModularRelationViolated(f64),
    #[error("norm bound ||C|| < 1 violated (||C|| = {0})")]
    NormBoundViolated(f64),
    #[error("conjugation mismatch (residual {0:.3e})")]
    ConjugationMismatch(f64),
    #[error("subspace not contained (residual {0:.3e})")]
    NotContained(f64),
    #[error("invalid group pair: {0}")]
    InvalidGroup(String),
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("representation is not irreducible (commutant dimension {0})")]
    NotIrreducible(usize),
    #[error("algebra dimension exceeds cap {0}")]
    DimensionOverflow(usize),
    #[error("vector is not cyclic and separating (cyclic: {cyclic}, separating: {separating})")]
    NotCyclicSeparating { cyclic: bool, separating: bool },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("not a subalgebra (residual {0:.3e})")]
    NotSubalgebra(f64),
    #[error("operator is not isometric (residual {0:.3e})")]
    NotIsometric(f64),
    #[error("Lorentz part violates the metric (residual {0:.3e})")]
    NotLorentz(f64),
    #[error("element is not in the proper Poincare group")]
    NotProper,
    #[error("causal complement not representable: {0}")]
    Unsupported(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("inner function not decaying: |B({re}+{im}i)| = {modulus}")]
    NotDecaying { re: f64, im: f64, modulus: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("empty series")]
    EmptySeries,
    #[error("json: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
