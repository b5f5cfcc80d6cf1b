use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("enumeration needs {needed} items, cap is {cap}")]
    EnumerationCap { needed: u128, cap: u128 },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error("infeasible construction ({parameter}): {reason}")]
    Infeasible { parameter: &'static str, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn infeasible(parameter: &'static str, reason: impl Into<String>) -> Self {
        Error::Infeasible { parameter, reason: reason.into() }
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
