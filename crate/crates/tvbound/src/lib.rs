//! Fully empirical confidence bounds for learning discrete distributions
//! in total variation, built around two sample-only statistics: the
//! square-root count statistic Φ and the exact empirical Rademacher
//! complexity of the boolean class.
//!
//! The crate provides the statistics themselves, distribution-side
//! oracle quantities for calibration, deviation bounds at confidence
//! 1 − δ, minimax lower-bound constructions, and a seeded Monte Carlo
//! engine that audits every bound's coverage.

pub mod bounds;
pub mod cli;
pub mod dist;
pub mod empirical;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod minimax;
pub mod oracle;
pub mod rademacher;
pub mod sampling;

pub use dist::Distribution;
pub use error::{Error, Result};
