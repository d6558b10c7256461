//! The empirical measure (MLE), the plug-in statistic Φ, and the missing
//! mass diagnostic.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::sampling::Sample;

/// The empirical measure μ̂ of a sample: masses are `count/m` exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmpiricalRepr", into = "EmpiricalRepr")]
pub struct EmpiricalMeasure {
    base: Distribution,
    m: usize,
    counts: Vec<(u64, u64)>,
}

impl EmpiricalMeasure {
    /// The measure as a proper distribution with masses `count/m`.
    pub fn base(&self) -> &Distribution {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Multiplicities as `(index, count)` in increasing index order.
    pub fn counts(&self) -> &[(u64, u64)] {
        &self.counts
    }

    pub fn distinct_symbols(&self) -> usize {
        self.counts.len()
    }

    pub fn to_csv(&self) -> String {
        self.base.to_csv()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("empirical measure serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn from_counts(counts: Vec<(u64, u64)>, m: usize) -> Result<Self> {
        if m == 0 || counts.is_empty() {
            return Err(Error::param(
                "counts",
                "an empirical measure needs at least one draw",
            ));
        }
        let total: u64 = counts.iter().map(|&(_, c)| c).sum();
        if total != m as u64 || counts.iter().any(|&(_, c)| c == 0) {
            return Err(Error::param(
                "counts",
                format!("counts must be positive and sum to m={m}"),
            ));
        }
        let base = Distribution::from_atoms(counts.iter().map(|&(i, c)| (i, c as f64 / m as f64)))?;
        Ok(Self { base, m, counts })
    }
}

#[derive(Serialize, Deserialize)]
struct EmpiricalRepr {
    atoms: Vec<(u64, u64)>,
    m: usize,
}

impl TryFrom<EmpiricalRepr> for EmpiricalMeasure {
    type Error = Error;

    fn try_from(repr: EmpiricalRepr) -> Result<Self> {
        let mut counts = repr.atoms;
        counts.sort_by_key(|&(i, _)| i);
        EmpiricalMeasure::from_counts(counts, repr.m)
    }
}

impl From<EmpiricalMeasure> for EmpiricalRepr {
    fn from(e: EmpiricalMeasure) -> Self {
        EmpiricalRepr {
            atoms: e.counts,
            m: e.m,
        }
    }
}

/// Builds μ̂ from a sample by exact multiplicity counting.
pub fn empirical_measure(s: &Sample) -> EmpiricalMeasure {
    let mut sorted = s.draws().to_vec();
    sorted.sort_unstable();
    let mut counts: Vec<(u64, u64)> = Vec::new();
    for &x in &sorted {
        match counts.last_mut() {
            Some(last) if last.0 == x => last.1 += 1,
            _ => counts.push((x, 1)),
        }
    }
    EmpiricalMeasure::from_counts(counts, s.len())
        .expect("multiplicity counts of a nonempty sample are always valid")
}

/// The statistic Φ = (1/√m)·Σ_j √μ̂(j), evaluated from the integer counts
/// as Σ_x √count_x / m so no division precedes the square roots.
pub fn phi(e: &EmpiricalMeasure) -> f64 {
    let sum: f64 = e.counts().iter().map(|&(_, c)| (c as f64).sqrt()).sum();
    sum / e.m() as f64
}

/// The missing mass U = Σ of `d`'s masses at indices the sample never hit.
/// Requires the true distribution; every draw must lie in its support.
pub fn missing_mass(d: &Distribution, s: &Sample) -> Result<f64> {
    let mut seen = s.draws().to_vec();
    seen.sort_unstable();
    seen.dedup();
    for &x in &seen {
        if d.mass_at(x) == 0.0 {
            return Err(Error::param(
                "sample",
                format!("draw {x} lies outside the distribution's support"),
            ));
        }
    }
    Ok(d.atoms()
        .iter()
        .filter(|&&(i, _)| seen.binary_search(&i).is_err())
        .map(|&(_, w)| w)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::make_family;

    fn sample(draws: &[u64]) -> Sample {
        Sample::new(draws.to_vec(), 0, "test").unwrap()
    }

    #[test]
    fn counting_examples() {
        let e = empirical_measure(&sample(&[3, 3, 3]));
        assert_eq!(e.counts(), &[(3, 3)]);
        assert_eq!(e.m(), 3);
        assert!(e.base().is_proper());

        let e = empirical_measure(&sample(&[1, 2, 1, 2]));
        assert_eq!(e.counts(), &[(1, 2), (2, 2)]);
        assert_eq!(e.base().atoms(), &[(1, 0.5), (2, 0.5)]);

        let e = empirical_measure(&sample(&[5, 1, 5, 9, 5]));
        assert_eq!(e.counts(), &[(1, 1), (5, 3), (9, 1)]);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&empirical_measure(&sample(&[7, 7, 7, 7]))), 0.5);
        assert_eq!(phi(&empirical_measure(&sample(&[1, 2, 3, 4]))), 1.0);
        let p = phi(&empirical_measure(&sample(&[1, 1, 2, 2])));
        assert!((p - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn phi_stays_in_its_envelope() {
        let u = make_family("uniform(7)").unwrap();
        for seed in 0..50 {
            for m in [1usize, 2, 5, 17, 100] {
                let s = crate::sampling::draw_iid(&u, m, seed).unwrap();
                let e = empirical_measure(&s);
                let p = phi(&e);
                let m = m as f64;
                assert!(p >= 1.0 / m.sqrt() - 1e-12 && p <= 1.0 + 1e-12);
                assert!(p * p <= e.distinct_symbols() as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn single_swap_changes_phi_by_at_most_two_over_m() {
        // small exhaustive sweep; the acceptance suite runs the full one
        for m in 1..=4usize {
            let mut draws = vec![1u64; m];
            loop {
                let base = phi(&empirical_measure(&sample(&draws)));
                for pos in 0..m {
                    for repl in 1..=3u64 {
                        let mut swapped = draws.clone();
                        swapped[pos] = repl;
                        let p = phi(&empirical_measure(&sample(&swapped)));
                        assert!((p - base).abs() <= 2.0 / m as f64);
                    }
                }
                // next sample over alphabet {1,2,3}
                let mut i = 0;
                while i < m && draws[i] == 3 {
                    draws[i] = 1;
                    i += 1;
                }
                if i == m {
                    break;
                }
                draws[i] += 1;
            }
        }
    }

    #[test]
    fn missing_mass_examples() {
        let u2 = make_family("uniform(2)").unwrap();
        assert_eq!(missing_mass(&u2, &sample(&[1, 1, 1])).unwrap(), 0.5);
        assert_eq!(missing_mass(&u2, &sample(&[1, 2])).unwrap(), 0.0);

        let pm = make_family("point_mass(4)").unwrap();
        assert_eq!(missing_mass(&pm, &sample(&[4, 4])).unwrap(), 0.0);
        assert!(missing_mass(&pm, &sample(&[5])).is_err());
    }

    #[test]
    fn json_round_trips_with_m_field() {
        let e = empirical_measure(&sample(&[1, 2, 1, 2]));
        let json = e.to_json();
        assert_eq!(json, r#"{"atoms":[[1,2],[2,2]],"m":4}"#);
        assert_eq!(EmpiricalMeasure::from_json(&json).unwrap(), e);
        assert!(EmpiricalMeasure::from_json(r#"{"atoms":[[1,2]],"m":3}"#).is_err());
    }
}
