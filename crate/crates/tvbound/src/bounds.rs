//! Confidence bounds on TV(μ̂_m, μ) at level 1 − δ, computed from the
//! sample alone. Two take the square-root statistic Φ directly; three
//! route through the exact empirical Rademacher complexity R̂. All use
//! the natural logarithm and are reported raw — a negative lower bound
//! is flagged `vacuous`, never clamped.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::empirical::{phi, EmpiricalMeasure};
use crate::error::{Error, Result};
use crate::rademacher::RademacherReport;

/// Which bound expression a report carries. The serialized names are a
/// wire contract: `thm1_upper`, `thm2_lower`, `lemma31_upper`,
/// `lemma33_lower`, `remark_lower`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Φ + 3√(ln(2/δ)/(2m)) — upper bound from the sample statistic.
    Thm1Upper,
    /// Φ/(4√2) − 3√(ln(2/δ)/m) — lower bound from the sample statistic.
    Thm2Lower,
    /// 2R̂ + 3√(ln(2/δ)/(2m)) — upper bound from the Rademacher complexity.
    Lemma31Upper,
    /// R̂/2 − 3√(ln(2/δ)/m) — lower bound from the Rademacher complexity.
    Lemma33Lower,
    /// R̂/2 − 1/(4√m) − (3/2)√(ln(2/δ)/(2m)) — sharper three-term lower bound.
    RemarkLower,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [
        BoundKind::Thm1Upper,
        BoundKind::Thm2Lower,
        BoundKind::Lemma31Upper,
        BoundKind::Lemma33Lower,
        BoundKind::RemarkLower,
    ];

    pub fn wire_name(self) -> &'static str {
        match self {
            BoundKind::Thm1Upper => "thm1_upper",
            BoundKind::Thm2Lower => "thm2_lower",
            BoundKind::Lemma31Upper => "lemma31_upper",
            BoundKind::Lemma33Lower => "lemma33_lower",
            BoundKind::RemarkLower => "remark_lower",
        }
    }

    /// Upper kinds bound TV from above (coverage means TV ≤ value);
    /// lower kinds bound it from below (coverage means TV ≥ value).
    pub fn is_upper(self) -> bool {
        matches!(self, BoundKind::Thm1Upper | BoundKind::Lemma31Upper)
    }

    /// Whether the bound consumes Φ (`false` means it consumes R̂).
    pub fn uses_phi(self) -> bool {
        matches!(self, BoundKind::Thm1Upper | BoundKind::Thm2Lower)
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.wire_name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.wire_name() == text.trim())
            .ok_or_else(|| Error::param("kind", format!("unknown bound kind {text:?}")))
    }
}

/// One evaluated bound: the statistic it consumed (Φ or R̂), the bound
/// value at confidence 1 − δ, and whether the value is vacuous
/// (negative, for lower kinds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub m: usize,
    pub delta: f64,
    pub statistic: f64,
    pub bound_value: f64,
    pub vacuous: bool,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "kind,m,delta,statistic,bound_value,vacuous";

    pub fn to_csv_row(&self) -> String {
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{},{},{}",
            self.kind, self.m, self.delta, self.statistic, self.bound_value, self.vacuous
        );
        row
    }

    /// Re-evaluates the bound expression from the stored fields; equals
    /// `bound_value` bit for bit.
    pub fn recompute(&self) -> f64 {
        bound_formula(self.kind, self.m, self.delta, self.statistic)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} is outside (0, 1)")));
    }
    Ok(())
}

fn bound_formula(kind: BoundKind, m: usize, delta: f64, statistic: f64) -> f64 {
    let mf = m as f64;
    let log_term = (2.0 / delta).ln();
    match kind {
        BoundKind::Thm1Upper => statistic + 3.0 * (log_term / (2.0 * mf)).sqrt(),
        BoundKind::Thm2Lower => statistic / (4.0 * 2f64.sqrt()) - 3.0 * (log_term / mf).sqrt(),
        BoundKind::Lemma31Upper => 2.0 * statistic + 3.0 * (log_term / (2.0 * mf)).sqrt(),
        BoundKind::Lemma33Lower => statistic / 2.0 - 3.0 * (log_term / mf).sqrt(),
        BoundKind::RemarkLower => {
            statistic / 2.0 - 0.25 / mf.sqrt() - 1.5 * (log_term / (2.0 * mf)).sqrt()
        }
    }
}

/// Evaluates `kind` at confidence 1 − δ from an already-extracted
/// statistic (Φ for the Φ-based kinds, R̂ for the rest).
pub fn bound_from_statistic(
    kind: BoundKind,
    m: usize,
    delta: f64,
    statistic: f64,
) -> Result<BoundReport> {
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::param("m", "sample size must be at least 1"));
    }
    let bound_value = bound_formula(kind, m, delta, statistic);
    Ok(BoundReport {
        kind,
        m,
        delta,
        statistic,
        bound_value,
        vacuous: bound_value < 0.0,
    })
}

/// Upper bound Φ + 3√(ln(2/δ)/(2m)).
pub fn tv_upper_thm1(e: &EmpiricalMeasure, delta: f64) -> Result<BoundReport> {
    bound_from_statistic(BoundKind::Thm1Upper, e.m(), delta, phi(e))
}

/// Lower bound Φ/(4√2) − 3√(ln(2/δ)/m).
pub fn tv_lower_thm2(e: &EmpiricalMeasure, delta: f64) -> Result<BoundReport> {
    bound_from_statistic(BoundKind::Thm2Lower, e.m(), delta, phi(e))
}

/// Upper bound 2R̂ + 3√(ln(2/δ)/(2m)); never exceeds the Φ-based upper
/// bound on the same sample because 2R̂ ≤ Φ pointwise.
pub fn tv_upper_lemma31(r: &RademacherReport, delta: f64) -> Result<BoundReport> {
    bound_from_statistic(BoundKind::Lemma31Upper, r.m, delta, r.exact)
}

/// Lower bound R̂/2 − 3√(ln(2/δ)/m).
pub fn tv_lower_lemma33(r: &RademacherReport, delta: f64) -> Result<BoundReport> {
    bound_from_statistic(BoundKind::Lemma33Lower, r.m, delta, r.exact)
}

/// Lower bound R̂/2 − 1/(4√m) − (3/2)√(ln(2/δ)/(2m)); sharper than the
/// plain R̂-based lower bound throughout δ ∈ (0,1).
pub fn tv_lower_remark(r: &RademacherReport, delta: f64) -> Result<BoundReport> {
    bound_from_statistic(BoundKind::RemarkLower, r.m, delta, r.exact)
}
