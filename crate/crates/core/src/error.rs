use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Exhaustive enumeration would exceed the configured number of increments.
    #[error("enumeration cap exceeded: {requested} total increments requested, limit is {limit}")]
    CapExceeded { limit: u32, requested: u64 },

    /// A site configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
