use thiserror::Error;

pub type Result<T> = std::result::Result<T, FlowError>;

#[derive(Debug, Error)]
pub enum FlowError {
    /// Invalid grid, scenario or parameter choice.
    #[error("configuration error: {0}")]
    Config(String),

    /// A field or argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A step produced a nonpositive or non-finite value.
    #[error("stability error at t = {t}: node {node} has value {value}")]
    Stability { t: f64, node: usize, value: f64 },

    /// Step-size halving could not recover positivity.
    #[error("fatal instability at t = {t}, node {node}, after {halvings} halvings")]
    FatalInstability { t: f64, node: usize, halvings: u32 },

    #[error("numerical error: {0}")]
    Numerical(String),

    /// The barrier was evaluated at or beyond its extinction time.
    #[error("barrier expired: t = {t} >= t0 = {t0}")]
    Extinction { t: f64, t0: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
