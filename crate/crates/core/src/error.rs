use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The distribution cannot be used here (e.g. Mellin transform of a
    /// sign-indefinite law).
    #[error("unsupported distribution for {op}: {detail}")]
    Unsupported { op: &'static str, detail: String },

    /// A required moment does not exist.
    #[error("moment of order {order} does not exist: {detail}")]
    Existence { order: i64, detail: String },

    #[error("cumulated coefficient overflow: |c| = {magnitude:e} exceeds {limit:e}")]
    Overflow { magnitude: f64, limit: f64 },

    #[error("degree guard: {degree} exceeds maximum {max}")]
    DegreeGuard { degree: usize, max: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("ill-conditioned Gram matrix at degree {0}")]
    IllConditioned(usize),

    #[error("model `{model}` is singular at {detail}")]
    Singularity { model: String, detail: String },

    #[error("optimizer did not converge after {evaluations} evaluations (best objective {objective:e})")]
    NonConvergence { evaluations: usize, objective: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
