//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the library. Every variant records the module that
/// produced it so front ends can report a stable, module-qualified code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input; lists every violation that was found.
    #[error("{module}: invalid input: {}", .violations.join("; "))]
    Validation {
        module: &'static str,
        violations: Vec<String>,
    },
    /// The input is well formed but an algorithm's precondition does not hold.
    #[error("{module}: precondition failed: {message}")]
    Precondition {
        module: &'static str,
        message: String,
    },
    /// The request is outside what the implementation supports (e.g. dimension).
    #[error("{module}: unsupported: {message}")]
    Unsupported {
        module: &'static str,
        message: String,
    },
    /// The input is lower dimensional where full dimension is required.
    #[error("{module}: degenerate input: {message}")]
    Degenerate {
        module: &'static str,
        message: String,
    },
    /// A configured size cap would be exceeded.
    #[error("{module}: limit exceeded: {message}")]
    Limit {
        module: &'static str,
        message: String,
    },
}

impl Error {
    pub(crate) fn validation(module: &'static str, violations: Vec<String>) -> Self {
        Error::Validation { module, violations }
    }

    pub(crate) fn precondition(module: &'static str, message: impl Into<String>) -> Self {
        Error::Precondition {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn unsupported(module: &'static str, message: impl Into<String>) -> Self {
        Error::Unsupported {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn degenerate(module: &'static str, message: impl Into<String>) -> Self {
        Error::Degenerate {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn limit(module: &'static str, message: impl Into<String>) -> Self {
        Error::Limit {
            module,
            message: message.into(),
        }
    }

    /// Module-qualified code such as `quantkernel.precondition`.
    pub fn code(&self) -> String {
        let (module, kind) = match self {
            Error::Validation { module, .. } => (module, "validation"),
            Error::Precondition { module, .. } => (module, "precondition"),
            Error::Unsupported { module, .. } => (module, "unsupported"),
            Error::Degenerate { module, .. } => (module, "degenerate"),
            Error::Limit { module, .. } => (module, "limit"),
        };
        format!("{module}.{kind}")
    }

    /// True for input validation failures (as opposed to precondition failures).
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. })
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
