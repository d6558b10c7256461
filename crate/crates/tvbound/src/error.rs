//! Crate-wide error type and result alias.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An atom list violated the distribution invariants.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A text input (sample file, CSV, config) failed to parse.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    /// Brute-force sign-vector enumeration was asked for more draws than
    /// the guard allows.
    #[error("brute-force enumeration supports at most {cap} draws, got {m}")]
    EnumerationCap { m: usize, cap: usize },

    /// The greedy packing construction exhausted its candidate budget
    /// before reaching the required family size.
    #[error("packing construction reached {achieved} members, needed {target}")]
    PackingConstruction { achieved: usize, target: usize },

    /// An experiment config failed validation; all violations are listed.
    #[error("invalid experiment config: {}", .0.join("; "))]
    ConfigValidation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
