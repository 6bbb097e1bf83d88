use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("degenerate cell {cell}: non-positive measure from edge lengths")]
    DegenerateCell { cell: usize },
    #[error("simplex inequality violated in cell {cell}")]
    SimplexInequality { cell: usize },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("invalid field: {0}")]
    Field(String),
    #[error("conformal factor must be positive, got {value} at vertex {vertex}")]
    NonPositiveFactor { vertex: usize, value: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("mesh is not tagged as a round ball or disk")]
    NotRoundBall,
}

pub type Result<T> = std::result::Result<T, Error>;
