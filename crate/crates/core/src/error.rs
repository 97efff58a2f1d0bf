use thiserror::Error;

/// Crate-wide error type.
///
/// The variants separate bad inputs (`Domain`), violated operation
/// preconditions or failed output contracts (`Contract`), exceeded
/// enumeration budgets (`Capacity`) and instance-size guards (`SizeGuard`),
/// since callers (notably the CLI) map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn size_guard(msg: impl Into<String>) -> Self {
        Error::SizeGuard(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
