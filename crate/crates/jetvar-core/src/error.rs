use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("{0} applied to a Grassmann-odd expression")]
    OddArgument(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("degree error: {0}")]
    DegreeError(String),
    #[error("degree overflow: {r} + {s} exceeds dimension {dim}")]
    DegreeOverflow { r: usize, s: usize, dim: usize },
    #[error("vector field is not projectable")]
    NotProjectable,
    #[error("vector field component of order {needed} requested but only order {declared} is declared")]
    OrderExceeded { needed: usize, declared: usize },
    #[error("wrong kind: {0}")]
    KindError(String),
    #[error("metric is singular")]
    SingularMetric,
    #[error("order error: {0}")]
    OrderError(String),
    #[error("form is not d_H-closed")]
    NotClosed,
    #[error("coefficients are not polynomial")]
    NonPolynomial,
    #[error("no antiderivative found up to jet order {0}")]
    NoAntiderivative(usize),
    #[error("algebra has no invariant bilinear form")]
    MissingBilinearForm,
    #[error("lagrangian is not gauge invariant: {0}")]
    NotInvariant(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
