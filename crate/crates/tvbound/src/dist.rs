//! Sparse discrete distributions over positive integer indices, together
//! with the metric and functional toolkit on them: total variation,
//! half-norm, minus-half-norm, decreasing permutation, truncation, and
//! KL divergence.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used when validating mass sums.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A possibly deficient probability vector with finitely many atoms.
///
/// Atoms are `(index, mass)` pairs with strictly positive masses and unique
/// indices kept in increasing index order. The total mass may fall below 1
/// (deficient distributions arise from truncation) but never exceeds
/// `1 + MASS_TOLERANCE`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct Distribution {
    atoms: Vec<(u64, f64)>,
    total_mass: f64,
}

impl Distribution {
    /// Builds a distribution from `(index, mass)` pairs in any order.
    /// Zero-mass atoms are dropped; negative, non-finite, or duplicate
    /// entries are rejected, as is a total mass above `1 + MASS_TOLERANCE`.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        let mut atoms: Vec<(u64, f64)> = atoms.into_iter().filter(|&(_, w)| w != 0.0).collect();
        atoms.sort_by_key(|&(i, _)| i);
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution(
                "no atoms with positive mass".into(),
            ));
        }
        for &(i, w) in &atoms {
            if i == 0 {
                return Err(Error::InvalidDistribution(
                    "indices must be positive integers".into(),
                ));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "mass at index {i} is {w}, expected a positive finite value"
                )));
            }
        }
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution("duplicate atom index".into()));
        }
        let total_mass: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if total_mass > 1.0 + MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "total mass {total_mass} exceeds 1"
            )));
        }
        Ok(Self { atoms, total_mass })
    }

    /// Atoms in increasing index order.
    pub fn atoms(&self) -> &[(u64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Whether the total mass equals 1 within `MASS_TOLERANCE`.
    pub fn is_proper(&self) -> bool {
        (self.total_mass - 1.0).abs() <= MASS_TOLERANCE
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    /// Mass at `index`, zero when the index carries no atom.
    pub fn mass_at(&self, index: u64) -> f64 {
        match self.atoms.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.atoms[pos].1,
            Err(_) => 0.0,
        }
    }

    /// CSV form: an `index,mass` header followed by one row per atom.
    /// Masses round-trip bit-exactly through [`Distribution::from_csv`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,mass\n");
        for &(i, w) in &self.atoms {
            let _ = writeln!(out, "{i},{w}");
        }
        out
    }

    /// Parses the CSV form; the header row is optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || (n == 0 && line == "index,mass") {
                continue;
            }
            let (i, w) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: n + 1,
                reason: format!("expected `index,mass`, got `{line}`"),
            })?;
            let index: u64 = i.trim().parse().map_err(|e| Error::Parse {
                line: n + 1,
                reason: format!("bad index `{i}`: {e}"),
            })?;
            let mass: f64 = w.trim().parse().map_err(|e| Error::Parse {
                line: n + 1,
                reason: format!("bad mass `{w}`: {e}"),
            })?;
            atoms.push((index, mass));
        }
        Self::from_atoms(atoms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    atoms: Vec<(u64, f64)>,
}

impl TryFrom<DistributionRepr> for Distribution {
    type Error = Error;

    fn try_from(repr: DistributionRepr) -> Result<Self> {
        Distribution::from_atoms(repr.atoms)
    }
}

impl From<Distribution> for DistributionRepr {
    fn from(d: Distribution) -> Self {
        DistributionRepr { atoms: d.atoms }
    }
}

/// The truncation threshold rank T(η): the least rank whose tail mass in
/// the decreasing permutation falls strictly below `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub eta: f64,
    pub threshold_rank: usize,
}

/// Total variation distance `½ Σ_i |a(i) − b(i)|` over the union of supports.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> f64 {
    let xs = a.atoms();
    let ys = b.atoms();
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < xs.len() && j < ys.len() {
        match xs[i].0.cmp(&ys[j].0) {
            std::cmp::Ordering::Less => {
                sum += xs[i].1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                sum += ys[j].1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                sum += (xs[i].1 - ys[j].1).abs();
                i += 1;
                j += 1;
            }
        }
    }
    sum += xs[i..].iter().map(|&(_, w)| w).sum::<f64>();
    sum += ys[j..].iter().map(|&(_, w)| w).sum::<f64>();
    0.5 * sum
}

/// Half-norm `(Σ_i √d(i))²`. Bounded above by the support size.
pub fn half_norm(d: &Distribution) -> f64 {
    let s: f64 = d.atoms().iter().map(|&(_, w)| w.sqrt()).sum();
    s * s
}

/// Minus-half-norm over the positive atoms: `Σ_{i: d(i)>0} 1/√d(i)`.
pub fn minus_half_norm_positive(d: &Distribution) -> f64 {
    d.atoms().iter().map(|&(_, w)| 1.0 / w.sqrt()).sum()
}

/// Atoms sorted by non-increasing mass; ties broken by smaller index first.
pub fn decreasing_masses(d: &Distribution) -> Vec<(u64, f64)> {
    let mut sorted = d.atoms().to_vec();
    sorted.sort_by(|x, y| {
        y.1.partial_cmp(&x.1)
            .expect("masses are finite")
            .then(x.0.cmp(&y.0))
    });
    sorted
}

/// The least rank `t ≥ 1` whose tail mass `Σ_{rank > t} μ↓` is strictly
/// below `eta`.
pub fn truncation_rank(d: &Distribution, eta: f64) -> Result<TruncationSpec> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("eta", format!("{eta} is outside (0, 1)")));
    }
    let dec = decreasing_masses(d);
    // tail[t] = mass strictly below rank t, accumulated from the small end
    // so the suffix sums are deterministic.
    let mut tails = vec![0.0; dec.len() + 1];
    for t in (1..=dec.len()).rev() {
        tails[t - 1] = tails[t] + dec[t - 1].1;
    }
    let threshold_rank = (1..=dec.len())
        .find(|&t| tails[t] < eta)
        .expect("tail after the last rank is zero");
    Ok(TruncationSpec {
        eta,
        threshold_rank,
    })
}

/// Keeps exactly the atoms of decreasing-permutation rank `≤ T(η)` and
/// drops the rest; the result is deficient in general.
pub fn truncate(d: &Distribution, eta: f64) -> Result<Distribution> {
    let spec = truncation_rank(d, eta)?;
    let dec = decreasing_masses(d);
    let kept: BTreeSet<u64> = dec[..spec.threshold_rank].iter().map(|&(i, _)| i).collect();
    Distribution::from_atoms(
        d.atoms()
            .iter()
            .filter(|&&(i, _)| kept.contains(&i))
            .copied(),
    )
}

/// KL divergence `Σ_i p(i)·ln(p(i)/q(i))` in nats. Returns `+∞` when `p`
/// puts mass where `q` does not. Both inputs must be proper.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    if !p.is_proper() {
        return Err(Error::param(
            "p",
            "KL divergence requires a proper distribution",
        ));
    }
    if !q.is_proper() {
        return Err(Error::param(
            "q",
            "KL divergence requires a proper distribution",
        ));
    }
    let mut sum = 0.0;
    for &(i, pw) in p.atoms() {
        let qw = q.mass_at(i);
        if qw == 0.0 {
            return Ok(f64::INFINITY);
        }
        sum += pw * (pw / qw).ln();
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(masses: &[f64]) -> Distribution {
        Distribution::from_atoms(masses.iter().enumerate().map(|(i, &w)| (i as u64 + 1, w)))
            .unwrap()
    }

    fn point_mass(index: u64) -> Distribution {
        Distribution::from_atoms([(index, 1.0)]).unwrap()
    }

    #[test]
    fn constructor_enforces_invariants() {
        assert!(Distribution::from_atoms([(1, 0.5), (1, 0.5)]).is_err());
        assert!(Distribution::from_atoms([(0, 1.0)]).is_err());
        assert!(Distribution::from_atoms([(1, -0.1), (2, 0.5)]).is_err());
        assert!(Distribution::from_atoms([(1, 0.9), (2, 0.2)]).is_err());
        assert!(Distribution::from_atoms([(1, 0.0)]).is_err());
        assert!(Distribution::from_atoms([(1, f64::NAN)]).is_err());

        let d = Distribution::from_atoms([(3, 0.25), (1, 0.25), (2, 0.0), (7, 0.5)]).unwrap();
        assert_eq!(d.atoms(), &[(1, 0.25), (3, 0.25), (7, 0.5)]);
        assert!(d.is_proper());

        let deficient = Distribution::from_atoms([(1, 0.5), (2, 0.3)]).unwrap();
        assert!(!deficient.is_proper());
        assert_eq!(deficient.total_mass(), 0.8);
    }

    #[test]
    fn tv_distance_examples() {
        let u4 = dist(&[0.25; 4]);
        assert_eq!(tv_distance(&u4, &u4), 0.0);
        assert_eq!(tv_distance(&point_mass(1), &point_mass(2)), 1.0);

        let mu0 = dist(&[0.5, 0.5]);
        let mu_eps = dist(&[0.4, 0.6]);
        assert!((tv_distance(&mu0, &mu_eps) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn half_norm_examples() {
        assert!((half_norm(&dist(&[0.25; 4])) - 4.0).abs() < 1e-12);
        assert_eq!(half_norm(&point_mass(1)), 1.0);
        assert!((half_norm(&dist(&[0.5, 0.5])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn minus_half_norm_examples() {
        assert_eq!(minus_half_norm_positive(&point_mass(1)), 1.0);
        assert!((minus_half_norm_positive(&dist(&[0.25; 4])) - 8.0).abs() < 1e-12);
        assert!((minus_half_norm_positive(&dist(&[0.5, 0.5])) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn decreasing_masses_sorts_with_index_tie_break() {
        let d = dist(&[0.2, 0.5, 0.3]);
        assert_eq!(decreasing_masses(&d), vec![(2, 0.5), (3, 0.3), (1, 0.2)]);

        let u3 = dist(&[1.0 / 3.0; 3]);
        assert_eq!(
            decreasing_masses(&u3)
                .iter()
                .map(|&(i, _)| i)
                .collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert_eq!(decreasing_masses(&point_mass(7)), vec![(7, 1.0)]);
    }

    #[test]
    fn truncation_rank_examples() {
        let u4 = dist(&[0.25; 4]);
        assert_eq!(truncation_rank(&u4, 0.3).unwrap().threshold_rank, 3);
        assert_eq!(
            truncation_rank(&point_mass(9), 0.7).unwrap().threshold_rank,
            1
        );
        let d = dist(&[0.5, 0.3, 0.2]);
        assert_eq!(truncation_rank(&d, 0.21).unwrap().threshold_rank, 2);
        assert!(truncation_rank(&d, 0.0).is_err());
        assert!(truncation_rank(&d, 1.0).is_err());
    }

    #[test]
    fn truncate_examples() {
        let pm = point_mass(3);
        assert_eq!(truncate(&pm, 0.5).unwrap(), pm);

        let d = dist(&[0.5, 0.3, 0.2]);
        let t = truncate(&d, 0.21).unwrap();
        assert_eq!(t.atoms(), &[(1, 0.5), (2, 0.3)]);
        assert!((t.total_mass() - 0.8).abs() < 1e-15);

        let u4 = dist(&[0.25; 4]);
        let t = truncate(&u4, 0.3).unwrap();
        assert_eq!(t.support_size(), 3);
        assert!((t.total_mass() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn kl_divergence_examples() {
        let mu0 = dist(&[0.5, 0.5]);
        assert_eq!(kl_divergence(&mu0, &mu0).unwrap(), 0.0);

        let mu_eps = dist(&[0.4, 0.6]);
        let kl = kl_divergence(&mu_eps, &mu0).unwrap();
        assert!((kl - 0.0201).abs() < 1e-4);
        assert!((kl - 0.020135513550688863).abs() < 1e-15);

        assert_eq!(
            kl_divergence(&point_mass(1), &point_mass(2)).unwrap(),
            f64::INFINITY
        );
        let deficient = Distribution::from_atoms([(1, 0.5)]).unwrap();
        assert!(kl_divergence(&deficient, &mu0).is_err());
        assert!(kl_divergence(&mu0, &deficient).is_err());
    }

    #[test]
    fn kl_stays_below_four_epsilon_squared_on_grid() {
        let mu0 = dist(&[0.5, 0.5]);
        for i in 1..=45 {
            let eps = 0.01 * i as f64;
            let mu_eps = dist(&[0.5 - eps, 0.5 + eps]);
            let kl = kl_divergence(&mu_eps, &mu0).unwrap();
            assert!(
                kl <= 4.0 * eps * eps + 1e-12,
                "kl({eps}) = {kl} exceeds 4ε² = {}",
                4.0 * eps * eps
            );
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let d = dist(&[0.1, 1.0 / 3.0, 0.25, 0.3166666666666667]);
        let back = Distribution::from_csv(&d.to_csv()).unwrap();
        assert_eq!(d, back);
        for (a, b) in d.atoms().iter().zip(back.atoms()) {
            assert_eq!(a.1.to_bits(), b.1.to_bits());
        }
        // header is optional on input
        let no_header = "1,0.5\n2,0.5\n";
        assert!(Distribution::from_csv(no_header).unwrap().is_proper());
        let bad = Distribution::from_csv("1,0.5\nnot-a-row\n");
        match bad {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let d = dist(&[0.2, 0.5, 0.3]);
        let s = d.to_json();
        assert_eq!(s, r#"{"atoms":[[1,0.2],[2,0.5],[3,0.3]]}"#);
        let back = Distribution::from_json(&s).unwrap();
        assert_eq!(d, back);
        assert!(Distribution::from_json(r#"{"atoms":[[1,0.6],[1,0.6]]}"#).is_err());
    }

    prop_compose! {
        fn arb_distribution()(weights in prop::collection::vec(1e-3..1.0f64, 1..20),
                              scale in 0.2..1.0f64,
                              stride in 1u64..7) -> Distribution {
            let total: f64 = weights.iter().sum();
            Distribution::from_atoms(
                weights.iter().enumerate().map(|(i, &w)| {
                    (1 + i as u64 * stride, scale * w / total)
                }),
            ).unwrap()
        }
    }

    proptest! {
        #[test]
        fn tv_is_symmetric(a in arb_distribution(), b in arb_distribution()) {
            prop_assert_eq!(tv_distance(&a, &b), tv_distance(&b, &a));
        }

        #[test]
        fn tv_triangle_inequality(a in arb_distribution(),
                                  b in arb_distribution(),
                                  c in arb_distribution()) {
            prop_assert!(tv_distance(&a, &c) <= tv_distance(&a, &b) + tv_distance(&b, &c) + 1e-12);
        }

        #[test]
        fn half_norm_bounds(d in arb_distribution()) {
            let hn = half_norm(&d);
            prop_assert!(hn >= d.total_mass() * d.total_mass() - 1e-12);
            prop_assert!(hn <= d.support_size() as f64 + 1e-12);
        }

        #[test]
        fn truncation_drops_less_than_half_eta(d in arb_distribution(), eta in 0.01..0.99f64) {
            let t = truncate(&d, eta).unwrap();
            prop_assert!(tv_distance(&d, &t) < eta / 2.0);
        }

        #[test]
        fn decreasing_masses_is_a_sorted_permutation(d in arb_distribution()) {
            let dec = decreasing_masses(&d);
            prop_assert!(dec.windows(2).all(|w| w[0].1 >= w[1].1));
            let mut back = dec.clone();
            back.sort_by_key(|&(i, _)| i);
            prop_assert_eq!(back.as_slice(), d.atoms());
        }
    }
}
