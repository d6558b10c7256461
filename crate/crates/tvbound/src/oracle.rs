//! Distribution-side comparators that require knowing μ: the split-sum
//! quantity Λ_m, the two-sided expectation bracket it induces on
//! E[TV(μ̂_m, μ)], and upper envelopes for E[Φ_m] and high-probability Φ_m.
//!
//! Λ_m(μ) = Σ_{μ(j) < 1/m} μ(j) + (1/(2√m))·Σ_{μ(j) ≥ 1/m} √μ(j); atoms
//! with mass exactly 1/m belong to the square-root sum.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};

/// Λ_m split into its two sums: `small_atom_mass` collects atoms below
/// 1/m at face value, `large_atom_term` is the scaled square-root sum
/// over the rest, and `lambda` is their total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaReport {
    pub m: usize,
    pub small_atom_mass: f64,
    pub large_atom_term: f64,
    pub lambda: f64,
}

impl LambdaReport {
    pub const CSV_HEADER: &'static str = "m,small_atom_mass,large_atom_term,lambda";

    pub fn to_csv_row(&self) -> String {
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{}",
            self.m, self.small_atom_mass, self.large_atom_term, self.lambda
        );
        row
    }
}

/// The expectation bracket ¼Λ_m − 1/(4√m) ≤ E[TV(μ̂_m, μ)] ≤ Λ_m.
/// `lower` is reported raw — it may be negative, in which case `vacuous`
/// is set and a display layer may clamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BkSandwich {
    pub m: usize,
    pub lower: f64,
    pub upper: f64,
    pub vacuous: bool,
}

fn require_proper(d: &Distribution) -> Result<()> {
    if !d.is_proper() {
        return Err(Error::param(
            "d",
            format!(
                "requires a proper distribution; total mass {}",
                d.total_mass()
            ),
        ));
    }
    Ok(())
}

fn require_positive_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::param("m", "sample size must be at least 1"));
    }
    Ok(())
}

/// Λ_m(μ) with its two sums reported separately. Atoms with mass exactly
/// 1/m go to the square-root sum.
pub fn lambda_m(d: &Distribution, m: usize) -> Result<LambdaReport> {
    require_proper(d)?;
    require_positive_m(m)?;
    let threshold = 1.0 / m as f64;
    let mut small = 0.0;
    let mut root_sum = 0.0;
    for &(_, mass) in d.atoms() {
        if mass < threshold {
            small += mass;
        } else {
            root_sum += mass.sqrt();
        }
    }
    let large = root_sum / (2.0 * (m as f64).sqrt());
    Ok(LambdaReport {
        m,
        small_atom_mass: small,
        large_atom_term: large,
        lambda: small + large,
    })
}

/// The bracket (¼Λ_m − 1/(4√m), Λ_m) on E[TV(μ̂_m, μ)], valid for m ≥ 2.
pub fn bk_sandwich(d: &Distribution, m: usize) -> Result<BkSandwich> {
    if m < 2 {
        return Err(Error::param("m", "the expectation bracket needs m >= 2"));
    }
    let lambda = lambda_m(d, m)?.lambda;
    let lower = 0.25 * lambda - 0.25 / (m as f64).sqrt();
    Ok(BkSandwich {
        m,
        lower,
        upper: lambda,
        vacuous: lower < 0.0,
    })
}

/// The deterministic envelope (1/m)·Σ_i min{√(m·μ(i)), m·μ(i)}, which
/// sits between E[Φ_m] and 2Λ_m.
pub fn expected_phi_upper(d: &Distribution, m: usize) -> Result<f64> {
    require_proper(d)?;
    require_positive_m(m)?;
    let mf = m as f64;
    let mut sum = 0.0;
    for &(_, mass) in d.atoms() {
        sum += (mf * mass).sqrt().min(mf * mass);
    }
    Ok(sum / mf)
}

/// The high-probability envelope 2Λ_m + √(ln(1/δ)/m) that Φ_m stays
/// below with probability at least 1 − δ. Natural logarithm.
pub fn phi_high_prob_bound(d: &Distribution, m: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} is outside (0, 1)")));
    }
    require_positive_m(m)?;
    let lambda = lambda_m(d, m)?.lambda;
    Ok(2.0 * lambda + ((1.0 / delta).ln() / m as f64).sqrt())
}
