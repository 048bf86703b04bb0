use thiserror::Error;

/// Errors raised across the library.
///
/// Variants fall into two families that the command-line front end maps to
/// distinct exit codes: configuration problems (bad parameters, domain or
/// support mismatches) and numeric problems (non-convergence, divergent
/// moments, degenerate slopes).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} lies outside the domain {domain}")]
    Domain { value: f64, domain: String },

    #[error("target {target} is outside the image [{lo}, {hi}] of the bracket")]
    OutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("moment of order {order} diverges: {detail}")]
    Divergent { order: u32, detail: String },

    #[error("degenerate slope: minimum |g'| = {0} is not strictly positive")]
    DegenerateSlope(f64),

    #[error("derivative of the generator vanishes at {0}")]
    SingularDerivative(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("{context}: {message}")]
    Io { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by the CLI for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Configuration,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NumericFailure(_)
            | Error::Divergent { .. }
            | Error::DegenerateSlope(_)
            | Error::SingularDerivative(_)
            | Error::Degenerate(_) => ErrorClass::Numeric,
            Error::InvalidParameter(_)
            | Error::Domain { .. }
            | Error::OutOfRange { .. }
            | Error::Precondition(_)
            | Error::Configuration(_)
            | Error::Io { .. } => ErrorClass::Configuration,
        }
    }

    /// Process exit code: 2 for configuration errors, 3 for numeric ones.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Configuration => 2,
            ErrorClass::Numeric => 3,
        }
    }

    pub fn io(context: impl Into<String>, err: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            message: err.to_string(),
        }
    }
}
