use std::fmt;

/// Errors produced anywhere in the ingest, metric, embedding and fitting pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: cannot parse {token:?} as a positive decimal")]
    Parse { line: usize, token: String },

    #[error("line {line}: value {value} does not exceed the previous value {previous}")]
    Monotonicity {
        line: usize,
        previous: f64,
        value: f64,
    },

    #[error("input contains no values")]
    EmptyInput,

    #[error("invalid window: m = {m} with {available} zeros available")]
    InvalidWindow { m: usize, available: usize },

    #[error("|t| = {t} is outside the guaranteed range |t| <= {limit}")]
    Range { t: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("objects ({i}, {j}): {source}")]
    AtPair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{n} objects need a {bytes}-byte dense distance matrix; the limit is {limit} objects")]
    TooLarge { n: usize, bytes: usize, limit: usize },

    #[error("eigensolver did not converge within {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("requested {requested} dimensions but only {available} strictly positive eigenvalues exist")]
    DimensionUnavailable { requested: usize, available: usize },

    #[error("series is identically zero after centering")]
    DegenerateSeries,

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("component {p}: {source}")]
    Component {
        p: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn precondition(msg: impl fmt::Display) -> Self {
        Error::Precondition(msg.to_string())
    }

    pub(crate) fn at_pair(self, i: usize, j: usize) -> Self {
        Error::AtPair {
            i,
            j,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_component(self, p: usize) -> Self {
        Error::Component {
            p,
            source: Box::new(self),
        }
    }

    /// Innermost error, unwrapping pair and component context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPair { source, .. } | Error::Component { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
