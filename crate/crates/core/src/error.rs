use thiserror::Error;

/// Errors raised by the closed-form kernels and the dense oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested geometry is valid but the measure is not defined on it.
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    /// The dense oracle would exceed its configured size cap.
    #[error("oracle capacity exceeded: {vertices} vertices > cap {cap}")]
    Capacity { vertices: u64, cap: u64 },

    /// A computed quantity violated an invariant it must satisfy by construction.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
