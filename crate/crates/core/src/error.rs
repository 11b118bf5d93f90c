use thiserror::Error;

use crate::indices::IndexKind;
use crate::pcm::Position;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the engine. Cell coordinates are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix order {n} is too small (need n >= 3)")]
    OrderTooSmall { n: usize },

    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("entry ({i},{j}) must be a positive finite number")]
    NonPositiveEntry { i: usize, j: usize },

    #[error("entries ({i},{j}) and ({j},{i}) are not reciprocal")]
    ReciprocityViolation { i: usize, j: usize },

    #[error("matrix orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("no random index stored for n = {n}")]
    MissingRandomIndex { n: usize },

    #[error("power iteration did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("threshold {value} is out of range for {kind}")]
    ThresholdOutOfRange { kind: IndexKind, value: f64 },

    #[error("scale bound must be a finite number >= 1, got {0}")]
    InvalidBound(f64),

    #[error("pinned entry at {position} (log value {value}) lies outside [-{bound}, {bound}]")]
    InadmissibleSpec {
        position: Position,
        value: f64,
        bound: f64,
    },

    #[error("position {0} is not an upper-triangle cell of this matrix")]
    InvalidPosition(Position),

    #[error("inadmissible query: {0}")]
    InadmissibleQuery(String),

    #[error("work estimate {estimate} subproblems exceeds the budget of {budget}")]
    WorkBudgetExceeded { estimate: u64, budget: u64 },

    #[error("search deadline reached after {subproblems} subproblems")]
    Timeout { subproblems: u64 },

    #[error("branch and bound node limit of {nodes} reached")]
    BranchLimit { nodes: u64 },
}
