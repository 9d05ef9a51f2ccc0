use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// One or more parameter invariants failed; every violation is listed.
    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("quadrature did not converge (achieved relative error {achieved:.3e})")]
    Quadrature { achieved: f64 },

    #[error("no crossing before horizon t = {horizon:.6e}")]
    HorizonExceeded { horizon: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
