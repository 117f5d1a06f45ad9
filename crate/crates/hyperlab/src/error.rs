use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("singular metric at rho={rho}: {detail}")]
    SingularMetric { rho: f64, detail: String },
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("non-finite value at t={time}: {detail}")]
    NonFinite { time: f64, detail: String },
    #[error("support violation: {0}")]
    Support(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("too few samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("empty state")]
    EmptyState,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error("step failed at t={time}: {source}")]
    Step {
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
