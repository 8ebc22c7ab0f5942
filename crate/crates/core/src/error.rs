use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The payoff matrix is not a coordination game. Indices are zero-based:
    /// `A[row][column] >= A[column][column]` for `row != column`.
    #[error("not a coordination game: A[{row}][{column}] >= A[{column}][{column}] (rows/columns zero-based)")]
    NotCoordination { row: usize, column: usize },

    /// A point with a zero coordinate was passed to an evaluator that needs
    /// the relative interior of the simplex.
    #[error("point is on the simplex boundary: {0}")]
    BoundaryPoint(String),

    /// An iterative method failed to converge.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A problem was configured without any seed nodes on the grid.
    #[error("seed set has no grid nodes")]
    EmptySeedSet,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
