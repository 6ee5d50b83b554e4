use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative or adaptive procedure gave up before reaching its tolerance.
    /// `estimate` is the best value available at that point.
    #[error("no convergence after {steps} steps (estimate {estimate:e}, error {error:e})")]
    Convergence {
        estimate: f64,
        error: f64,
        steps: usize,
    },

    /// Inconsistent configuration, for example overlapping integration windows.
    #[error("configuration error: {0}")]
    Config(String),

    /// The normal equations of a least-squares problem are rank deficient.
    #[error("singular normal equations: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
