//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building or evaluating symbols,
/// forms, families and cochains.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymError {
    #[error("dimension {0} is not supported (expected 1..={max})", max = crate::MAX_DIM)]
    Dimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("term of degree {degree} is not of the form order - j with 0 <= j <= depth (order {order}, depth {depth})")]
    DegreeOutOfRange { degree: String, order: String, depth: u32 },
    #[error("orders {0} and {1} do not differ by an integer")]
    IncompatibleOrders(String, String),
    #[error("a polynomial term without cut-off must have radial power 0")]
    UncutRadial,
    #[error("symbol is not windowed in x")]
    NotWindowed,
    #[error("expected a form of degree {expected}, got {got}")]
    FormDegree { expected: usize, got: usize },
    #[error("coefficient order {got} does not match form order minus |J| = {expected}")]
    FormCoefficientOrder { expected: String, got: String },
    #[error("truncation depth {got} is below the required {required}")]
    InsufficientTruncation { required: u32, got: u32 },
    #[error("homogeneous component evaluated at xi = 0 with negative degree")]
    Domain,
    #[error("quadrature did not reach tolerance {tol:e} (error estimate {err:e}) within {max_subdiv} subdivisions")]
    Quadrature { tol: f64, err: f64, max_subdiv: usize },
    #[error("invalid quadrature parameters: {0}")]
    QuadratureSpec(String),
    #[error("order of the family must be non-constant (slope 0)")]
    ConstantFamily,
    #[error("holomorphic factor must start with 1")]
    FamilyNormalisation,
    #[error("cochain expects {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, SymError>;
