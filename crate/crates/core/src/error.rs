use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point lies outside the open unit bidisc (or disc).
    #[error("point {0} lies outside the open unit disc")]
    Domain(String),
    /// An operation was called with arguments outside its documented range.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Missing or inconsistent configuration (family params, quadrature rules, check params).
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed textual input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// Power iteration ran out of iterations.
    #[error("operator norm did not converge after {iterations} iterations (last estimate {value}, residual {residual})")]
    NotConverged {
        value: f64,
        iterations: usize,
        residual: f64,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
