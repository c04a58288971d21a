use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("non-positive price at row {row}, ticker {ticker}")]
    NonPositivePrice { row: usize, ticker: String },

    #[error("unparseable number {value:?} at row {row}, column {column}")]
    Parse {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not a probability vector: {0}")]
    NotProbability(String),

    #[error("ambiguity set is empty")]
    EmptyAmbiguitySet,

    #[error("survival violated at scenario {scenario}: 1 + K'x = {wealth_factor}")]
    NonSurvival { scenario: usize, wealth_factor: f64 },

    #[error("degenerate interval [{x_min}, {x_max}]")]
    DegenerateInterval { x_min: f64, x_max: f64 },

    #[error("linear program is infeasible: {0}")]
    Infeasible(String),

    #[error("linear program is unbounded: {0}")]
    Unbounded(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// True for failures of the optimization itself rather than of its inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_)
                | Error::Unbounded(_)
                | Error::Solver(_)
                | Error::NonSurvival { .. }
                | Error::EmptyAmbiguitySet
        )
    }
}
