use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("maximum span property fails at index tuple {indices:?}")]
    MaxSpan { indices: Vec<usize> },
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("invalid snake: {0}")]
    InvalidSnake(String),
    #[error("snake {to} is not reachable from {from} by tail and diamond moves")]
    NotReachable { from: String, to: String },
    #[error("zero coordinate {0}")]
    ZeroCoordinate(String),
    #[error("markings do not define the same apartment")]
    DifferentApartments,
    #[error("every permutation has infinite cost")]
    InfeasibleAssignment,
    #[error("point does not lie on the slice sum(x) = 1")]
    OffSlice,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("index pairs are not combinatorially separating")]
    NotSeparating,
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("parse error: {0}")]
    Parse(String),
}
