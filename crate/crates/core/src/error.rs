/// Errors raised by the library.
///
/// The variants are grouped so that a front end can map them onto
/// distinct exit statuses: bad input, numeric preconditions, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input: invalid maps, unknown preset, bad configuration values.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A numeric precondition of a rule or bound does not hold
    /// (divergent kernel exponent, zero separation, singular point, ...).
    #[error("numeric precondition violated: {0}")]
    Precondition(String),

    /// An integrand returned NaN or infinity. `y` is set for double integrals.
    #[error("integrand returned a non-finite value at {}", describe_nodes(.x, .y))]
    NonFinite { x: [f64; 2], y: Option<[f64; 2]> },

    /// Failure while reading or writing reports.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV encoding or decoding failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// Experiment configuration could not be parsed.
    #[error("config parse error: {0}")]
    Config(String),

    /// An error raised while computing one row of a convergence study.
    #[error("level {ell}: {source}")]
    Row {
        ell: usize,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numeric,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Invalid(_) | Error::Config(_) => ErrorKind::Config,
            Error::Precondition(_) | Error::NonFinite { .. } => ErrorKind::Numeric,
            Error::Io(_) | Error::Csv(_) => ErrorKind::Io,
            Error::Row { source, .. } => source.kind(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

fn describe_nodes(x: &[f64; 2], y: &Option<[f64; 2]>) -> String {
    match y {
        None => format!("node ({}, {})", x[0], x[1]),
        Some(y) => format!("node pair ({}, {}), ({}, {})", x[0], x[1], y[0], y[1]),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
