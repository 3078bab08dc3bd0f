use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("weak learner selection failed: {0}")]
    Selection(String),

    #[error("root search did not converge after {iterations} iterations (best iterate {best})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("no sign change found for x in (0, {limit}]")]
    NoRoot { limit: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error at line {line}: {message}")]
    Schema { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by malformed or inconsistent data files.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Schema { .. } | Error::Io(_) | Error::Json(_)
        )
    }
}
