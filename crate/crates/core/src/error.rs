use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violates an operation precondition (non-finite yield,
    /// non-positive price, bad parameter).
    #[error("domain error: {0}")]
    Domain(String),

    /// A lookup fell outside a cached table's range.
    #[error("{value} outside table range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    /// The data cannot support the requested estimate (e.g. constant series).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// Weighted design matrix is rank deficient.
    #[error("singular fit: {0}")]
    Singular(String),

    /// Too few observations for the requested polynomial degree.
    #[error("rank error: need at least {needed} distinct points, got {got}")]
    Rank { needed: usize, got: usize },

    /// Malformed text input; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(message: impl Into<String>) -> Error {
    Error::Domain(message.into())
}

pub(crate) fn ensure_finite(value: f64, what: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_positive(value: f64, what: &str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{what} must be positive, got {value}")))
    }
}
