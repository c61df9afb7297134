use thiserror::Error;

use crate::field::FieldContext;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an admissible prime")]
    InvalidPrime(u64),

    #[error("field mismatch: {0} vs {1}")]
    ContextMismatch(FieldContext, FieldContext),

    #[error("division by an element indistinguishable from zero{}", fmt_prec(.precision))]
    DivisionByApparentZero { precision: Option<i64> },

    #[error("invalid precision {0}")]
    InvalidPrecision(i64),

    #[error("negative valuation {0} where an integral element is required")]
    NegativeValuation(i64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular modulo the uniformizer")]
    SingularResidue,

    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("no admissible update index: {0}")]
    BasinViolation(String),

    #[error("rank-one update denominator vanishes at precision {precision}")]
    InvertibilityFailure { precision: i64 },

    #[error("initial data not admissible: {0}")]
    Admissibility(String),

    #[error("no convergence after {iterations} iterations (last valuation {last})")]
    NonConvergence { iterations: usize, last: String },

    #[error("iteration {iteration}, step {step}: {name} has interval {got}, expected {expected}")]
    IntervalMismatch { iteration: usize, step: String, name: String, expected: String, got: String },

    #[error("predicted valuation {predicted} exceeded at iteration {iteration}")]
    UnderPrediction { iteration: usize, predicted: i64 },

    #[error("iteration {iteration}: observed valuation {observed} but oracle says {expected}")]
    OracleMismatch { iteration: usize, expected: i64, observed: String },

    #[error("oracle valuations exhausted at iteration {0}")]
    OracleExhausted(usize),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("io: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// The error underneath any added context.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root_cause(),
            e => e,
        }
    }
}

fn fmt_prec(p: &Option<i64>) -> String {
    match p {
        Some(c) => format!(" at absolute precision {c}"),
        None => " (exact zero)".to_string(),
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidArgument(format!("json: {e}"))
    }
}
