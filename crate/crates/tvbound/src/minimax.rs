//! Lower-bound constructions and empirical probes: the two-point (biased
//! coin) argument with its sample-size threshold, a greedy
//! Varshamov–Gilbert packing of perturbed-uniform distributions with its
//! risk floor, a Monte Carlo estimate of the MLE's minimax risk over the
//! packing, and an empirical probe of the sample-size sufficiency
//! threshold driven by the truncated half-norm.

use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{half_norm, kl_divergence, truncate, tv_distance, Distribution};
use crate::empirical::{empirical_measure, EmpiricalMeasure};
use crate::error::{Error, Result};
use crate::exec::{map_trials, ExecMode};
use crate::sampling::draw_iid_stream;

/// How many candidate codewords the randomized construction will test
/// before giving up.
pub const CANDIDATE_BUDGET: usize = 1_000_000;

/// The hard pair for distinguishing at resolution ε: a fair coin against
/// (½−ε, ½+ε), with their KL divergence and TV distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeCamPair {
    pub mu0: Distribution,
    pub mu_eps: Distribution,
    pub kl: f64,
    pub tv: f64,
}

/// Builds the two-point pair for ε ∈ (0, ½). `kl` is KL(μ_ε ‖ μ₀) ≤ 4ε²
/// and `tv` is exactly ε up to rounding.
pub fn lecam_pair(epsilon: f64) -> Result<LeCamPair> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::param(
            "epsilon",
            format!("{epsilon} is outside (0, 1/2)"),
        ));
    }
    let mu0 = Distribution::from_atoms([(1, 0.5), (2, 0.5)])?;
    let mu_eps = Distribution::from_atoms([(1, 0.5 - epsilon), (2, 0.5 + epsilon)])?;
    let kl = kl_divergence(&mu_eps, &mu0)?;
    let tv = tv_distance(&mu0, &mu_eps);
    Ok(LeCamPair {
        mu0,
        mu_eps,
        kl,
        tv,
    })
}

/// ⌊(1/(4ε²))·ln(1/(2δ))⌋: at or below this sample size the risk of
/// distinguishing the two-point pair is at least δ, because
/// ½·exp(−m·KL) ≥ ½·exp(−4mε²) ≥ δ. Requires δ < ½ so the threshold
/// formula is nonnegative.
pub fn lecam_sample_threshold(epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::param(
            "epsilon",
            format!("{epsilon} is outside (0, 1/2)"),
        ));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::param(
            "delta",
            format!("{delta} is outside (0, 1/2)"),
        ));
    }
    Ok(((1.0 / (4.0 * epsilon * epsilon)) * (1.0 / (2.0 * delta)).ln()).floor() as u64)
}

/// One packed distribution: a ±ε perturbation pattern over atom pairs
/// (the codeword) and the distribution it induces on [d]:
/// mass (1+16ε·σ_k)/d at atom 2k−1 and (1−16ε·σ_k)/d at atom 2k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PackingMemberRepr", into = "PackingMemberRepr")]
pub struct PackingMember {
    pub codeword: Vec<bool>,
    pub distribution: Distribution,
}

#[derive(Serialize, Deserialize)]
struct PackingMemberRepr {
    codeword: String,
    distribution: Distribution,
}

impl TryFrom<PackingMemberRepr> for PackingMember {
    type Error = Error;

    fn try_from(repr: PackingMemberRepr) -> Result<Self> {
        let codeword = repr
            .codeword
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::param(
                    "codeword",
                    format!("invalid bit character {other:?}"),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(PackingMember {
            codeword,
            distribution: repr.distribution,
        })
    }
}

impl From<PackingMember> for PackingMemberRepr {
    fn from(member: PackingMember) -> Self {
        let codeword = member
            .codeword
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        PackingMemberRepr {
            codeword,
            distribution: member.distribution,
        }
    }
}

/// A family of pairwise-separated distributions on [d]: every two
/// members are at TV distance ≥ 2ε, the all-zeros pattern (the uniform
/// distribution) is a member, and the family size exceeds 2^(d/16).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingFamily {
    pub d: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub members: Vec<PackingMember>,
}

fn hamming(a: &[bool], b: &[bool]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

fn member_distribution(codeword: &[bool], d: u64, epsilon: f64) -> Distribution {
    let c = 16.0 * epsilon;
    let df = d as f64;
    let mut atoms = Vec::with_capacity(d as usize);
    for (k, &bit) in codeword.iter().enumerate() {
        let s = if bit { c } else { 0.0 };
        atoms.push((2 * k as u64 + 1, (1.0 + s) / df));
        atoms.push((2 * k as u64 + 2, (1.0 - s) / df));
    }
    Distribution::from_atoms(atoms).expect("perturbed-uniform masses are positive and sum to 1")
}

impl PackingFamily {
    /// Largest deviation, over all member pairs, between the measured TV
    /// distance and the identity (16ε/d)·Hamming(σ, σ′).
    pub fn max_tv_identity_gap(&self) -> f64 {
        let unit = 16.0 * self.epsilon / self.d as f64;
        let mut gap = 0.0f64;
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                let tv = tv_distance(&a.distribution, &b.distribution);
                let predicted = unit * hamming(&a.codeword, &b.codeword) as f64;
                gap = gap.max((tv - predicted).abs());
            }
        }
        gap
    }

    /// Smallest pairwise TV distance in the family.
    pub fn min_pairwise_tv(&self) -> f64 {
        let mut min = f64::INFINITY;
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                min = min.min(tv_distance(&a.distribution, &b.distribution));
            }
        }
        min
    }

    /// max_σ KL(μ^(σ) ‖ μ^(0)) / ε² over the family — the empirically
    /// measured value of the budget constant that the construction keeps
    /// of order one.
    pub fn kl_budget_ratio(&self) -> Result<f64> {
        let base = &self.members[0].distribution;
        let mut max_kl = 0.0f64;
        for member in &self.members[1..] {
            max_kl = max_kl.max(kl_divergence(&member.distribution, base)?);
        }
        Ok(max_kl / (self.epsilon * self.epsilon))
    }
}

/// Smallest member count that satisfies `count > 2^(d/16)`.
fn packing_target(d: u64) -> usize {
    let bound = 2f64.powf(d as f64 / 16.0);
    if bound >= usize::MAX as f64 {
        usize::MAX
    } else {
        bound.floor() as usize + 1
    }
}

/// Greedily builds the separated family for even d ≥ 16 and
/// ε ∈ (0, 1/16). Candidates are admitted when 8·Hamming ≥ d, which is
/// exactly the pairwise-TV threshold 2ε under the construction's TV
/// identity, checked in integers so no float boundary can misclassify.
/// Codewords of length ≤ 20 are enumerated exhaustively in increasing
/// integer order; longer ones are drawn from a seeded generator, up to
/// [`CANDIDATE_BUDGET`] candidates. Failing to reach the size target is
/// an error carrying the achieved size.
pub fn build_packing(d: u64, epsilon: f64, seed: u64) -> Result<PackingFamily> {
    if d < 16 || !d.is_multiple_of(2) {
        return Err(Error::param(
            "d",
            format!("{d} must be an even integer >= 16"),
        ));
    }
    if !(epsilon > 0.0 && epsilon < 1.0 / 16.0) {
        return Err(Error::param(
            "epsilon",
            format!("{epsilon} is outside (0, 1/16)"),
        ));
    }
    let half = (d / 2) as usize;
    let target = packing_target(d);
    let mut codewords: Vec<Vec<bool>> = vec![vec![false; half]];

    let admissible = |codewords: &[Vec<bool>], cand: &[bool]| {
        codewords.iter().all(|s| 8 * hamming(s, cand) >= d)
    };

    if half <= 20 {
        for j in 1u64..(1u64 << half) {
            let cand: Vec<bool> = (0..half).map(|k| j >> k & 1 == 1).collect();
            if admissible(&codewords, &cand) {
                codewords.push(cand);
                if codewords.len() >= target {
                    break;
                }
            }
        }
    } else {
        if target > CANDIDATE_BUDGET + 1 {
            return Err(Error::PackingConstruction {
                achieved: 1,
                target,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..CANDIDATE_BUDGET {
            let mut cand = Vec::with_capacity(half);
            while cand.len() < half {
                let mut chunk = rng.next_u64();
                for _ in 0..64.min(half - cand.len()) {
                    cand.push(chunk & 1 == 1);
                    chunk >>= 1;
                }
            }
            if admissible(&codewords, &cand) {
                codewords.push(cand);
                if codewords.len() >= target {
                    break;
                }
            }
        }
    }

    if codewords.len() < target {
        return Err(Error::PackingConstruction {
            achieved: codewords.len(),
            target,
        });
    }
    let members = codewords
        .into_iter()
        .map(|codeword| {
            let distribution = member_distribution(&codeword, d, epsilon);
            PackingMember {
                codeword,
                distribution,
            }
        })
        .collect();
    Ok(PackingFamily {
        d,
        epsilon,
        seed,
        members,
    })
}

/// The packing risk floor ½·(1 − c_probe·m·ε²/d), reported raw (it goes
/// negative once m passes d/(c_probe·ε²)). The probe constant is
/// caller-supplied; nothing universal is hard-coded.
pub fn tsybakov_risk_floor(d: u64, epsilon: f64, m: u64, c_probe: f64) -> f64 {
    0.5 * (1.0 - c_probe * m as f64 * epsilon * epsilon / d as f64)
}

/// Monte Carlo risk of one packing member: the estimated probability
/// that the MLE lands further than ε from the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRisk {
    pub member_id: usize,
    pub trials: usize,
    pub failures: usize,
    pub risk_hat: f64,
    pub se: f64,
}

/// Per-member risk estimates over a packing family at sample size m,
/// with their maximum — the empirical counterpart of the minimax risk
/// restricted to the MLE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxRiskReport {
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub per_member: Vec<MemberRisk>,
    pub max_risk: f64,
}

impl MinimaxRiskReport {
    pub const CSV_HEADER: &'static str = "member_id,trials,failures,risk_hat,se";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.per_member {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.member_id, r.trials, r.failures, r.risk_hat, r.se
            );
        }
        out
    }
}

/// Estimates P[TV(μ̂_m, μ) > ε] for every member of the family over
/// seeded trials (trial t of member i uses stream i·trials + t), and the
/// max across members.
pub fn empirical_minimax_risk(
    family: &PackingFamily,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<MinimaxRiskReport> {
    empirical_minimax_risk_with(family, m, trials, seed, ExecMode::default())
}

/// [`empirical_minimax_risk`] with an explicit execution mode.
pub fn empirical_minimax_risk_with(
    family: &PackingFamily,
    m: usize,
    trials: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<MinimaxRiskReport> {
    if m == 0 {
        return Err(Error::param("m", "sample size must be at least 1"));
    }
    if trials == 0 {
        return Err(Error::param("trials", "at least one trial is required"));
    }
    let mut per_member = Vec::with_capacity(family.members.len());
    let mut max_risk = 0.0f64;
    for (member_id, member) in family.members.iter().enumerate() {
        let dist = &member.distribution;
        let misses = map_trials(mode, trials, |t| {
            let stream = (member_id * trials + t) as u64;
            let sample = draw_iid_stream(dist, m, seed, stream)
                .expect("packing members are proper and m >= 1");
            let e = empirical_measure(&sample);
            tv_distance(dist, e.base()) > family.epsilon
        });
        let failures = misses.iter().filter(|&&miss| miss).count();
        let risk_hat = failures as f64 / trials as f64;
        let se = (risk_hat * (1.0 - risk_hat) / trials as f64).sqrt();
        max_risk = max_risk.max(risk_hat);
        per_member.push(MemberRisk {
            member_id,
            trials,
            failures,
            risk_hat,
            se,
        });
    }
    Ok(MinimaxRiskReport {
        m,
        trials,
        seed,
        epsilon: family.epsilon,
        per_member,
        max_risk,
    })
}

/// One grid point of the sufficiency probe: the multiplier c, the sample
/// size it implies, and the estimated probability of TV < ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyEntry {
    pub c: f64,
    pub m: usize,
    pub successes: usize,
    pub success_hat: f64,
    pub se: f64,
}

/// Result of probing m = ⌈c·ε⁻²·max{Λ, ln(1/δ)}⌉ across a grid of
/// multipliers, where Λ is the half-norm of μ truncated at 2εδ/9.
/// `fine_truncation_half_norm` reports the half-norm at the ε/18
/// truncation as well; for finitely supported inputs the two coincide
/// with the full half-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyProbe {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub lambda: f64,
    pub fine_truncation_half_norm: f64,
    pub entries: Vec<SufficiencyEntry>,
    pub sufficient_c: Option<f64>,
}

/// Probes which multiplier c makes m = ⌈c·ε⁻²·max{Λ, ln(1/δ)}⌉ draws
/// empirically sufficient for P[TV(μ̂_m, μ) < ε] ≥ 1 − δ. Returns the
/// least such c in the grid, or `None` if every grid point fails.
pub fn sufficiency_probe(
    d: &Distribution,
    epsilon: f64,
    delta: f64,
    c_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<SufficiencyProbe> {
    sufficiency_probe_with(d, epsilon, delta, c_grid, trials, seed, ExecMode::default())
}

/// [`sufficiency_probe`] with an explicit execution mode.
pub fn sufficiency_probe_with(
    d: &Distribution,
    epsilon: f64,
    delta: f64,
    c_grid: &[f64],
    trials: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<SufficiencyProbe> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(
            "epsilon",
            format!("{epsilon} is outside (0, 1)"),
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} is outside (0, 1)")));
    }
    if c_grid.is_empty() || c_grid.iter().any(|&c| c.is_nan() || c <= 0.0) {
        return Err(Error::param(
            "c_grid",
            "the multiplier grid must be nonempty and positive",
        ));
    }
    if trials == 0 {
        return Err(Error::param("trials", "at least one trial is required"));
    }
    let lambda = half_norm(&truncate(d, 2.0 * epsilon * delta / 9.0)?);
    let fine_truncation_half_norm = half_norm(&truncate(d, epsilon / 18.0)?);
    let scale = (lambda.max((1.0 / delta).ln())) / (epsilon * epsilon);

    let mut entries = Vec::with_capacity(c_grid.len());
    for (ci, &c) in c_grid.iter().enumerate() {
        let m = (c * scale).ceil() as usize;
        let hits = map_trials(mode, trials, |t| {
            let stream = (ci * trials + t) as u64;
            let sample =
                draw_iid_stream(d, m, seed, stream).expect("probe input is proper and m >= 1");
            let e = empirical_measure(&sample);
            tv_distance(d, e.base()) < epsilon
        });
        let successes = hits.iter().filter(|&&hit| hit).count();
        let success_hat = successes as f64 / trials as f64;
        let se = (success_hat * (1.0 - success_hat) / trials as f64).sqrt();
        entries.push(SufficiencyEntry {
            c,
            m,
            successes,
            success_hat,
            se,
        });
    }
    let sufficient_c = entries
        .iter()
        .filter(|e| e.success_hat >= 1.0 - delta)
        .map(|e| e.c)
        .fold(None, |best: Option<f64>, c| {
            Some(best.map_or(c, |b| b.min(c)))
        });
    Ok(SufficiencyProbe {
        epsilon,
        delta,
        seed,
        lambda,
        fine_truncation_half_norm,
        entries,
        sufficient_c,
    })
}

/// Splits TV(μ̂, μ) by the triangle inequality around the truncation of μ
/// at tail level η: `e1` drops μ̂'s mass outside the truncation support,
/// `e2` compares inside it, and `e3` = ½·(dropped tail of μ) < η/2
/// deterministically.
pub fn error_decomposition(
    d: &Distribution,
    e: &EmpiricalMeasure,
    eta: f64,
) -> Result<(f64, f64, f64)> {
    let kept = truncate(d, eta)?;
    let e1 = 0.5
        * e.base()
            .atoms()
            .iter()
            .filter(|&&(i, _)| kept.mass_at(i) == 0.0)
            .map(|&(_, w)| w)
            .sum::<f64>();
    let e2 = 0.5
        * kept
            .atoms()
            .iter()
            .map(|&(i, w)| (e.base().mass_at(i) - w).abs())
            .sum::<f64>();
    let e3 = 0.5 * (d.total_mass() - kept.total_mass());
    Ok((e1, e2, e3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::make_family;

    #[test]
    fn lecam_pair_examples() {
        let pair = lecam_pair(0.1).unwrap();
        assert!((pair.kl - 0.020135513550688863).abs() < 1e-12);
        assert!((pair.tv - 0.1).abs() < 1e-12);
        assert!(pair.kl <= 0.04);
        assert!(half_norm(&pair.mu0) <= 2.0 + 1e-15);
        assert!(half_norm(&pair.mu_eps) <= 2.0 + 1e-15);

        let tiny = lecam_pair(1e-6).unwrap();
        assert!(tiny.kl < 1e-11);
        assert!(tiny.tv < 1e-5);

        assert!(lecam_pair(0.0).is_err());
        assert!(lecam_pair(0.5).is_err());
    }

    #[test]
    fn lecam_threshold_examples() {
        assert_eq!(lecam_sample_threshold(0.1, 0.05).unwrap(), 57);
        assert_eq!(lecam_sample_threshold(0.1, 0.25).unwrap(), 17);
        assert!(lecam_sample_threshold(0.1, 0.5).is_err());
        assert!(lecam_sample_threshold(0.1, 0.7).is_err());
        assert!(lecam_sample_threshold(0.6, 0.05).is_err());
    }

    #[test]
    fn lecam_threshold_is_consistent_with_the_risk_formula() {
        for epsilon in [0.05, 0.1, 0.2, 0.3, 0.4, 0.49] {
            for delta in [0.01, 0.05, 0.1, 0.25, 0.4, 0.49] {
                let m = lecam_sample_threshold(epsilon, delta).unwrap();
                let kl = lecam_pair(epsilon).unwrap().kl;
                let risk = 0.5 * (-(m as f64) * kl).exp();
                assert!(
                    risk >= delta,
                    "eps={epsilon} delta={delta}: {risk} < {delta}"
                );
            }
        }
    }

    #[test]
    fn packing_d16_is_pinned() {
        let family = build_packing(16, 0.05, 7).unwrap();
        assert_eq!(family.members.len(), 3);
        let words: Vec<String> = family
            .members
            .iter()
            .map(|m| {
                m.codeword
                    .iter()
                    .map(|&b| if b { '1' } else { '0' })
                    .collect()
            })
            .collect();
        assert_eq!(words, ["00000000", "11000000", "10100000"]);
        assert!(family.max_tv_identity_gap() <= 1e-12);
        assert!(family.min_pairwise_tv() >= 2.0 * 0.05 - 1e-12);
        for member in &family.members {
            assert!(member.distribution.is_proper());
            assert_eq!(member.distribution.support_size(), 16);
        }
        // the zero member is uniform; perturbed pairs average to 1/d
        let base = &family.members[0].distribution;
        assert!(base
            .atoms()
            .iter()
            .all(|&(_, w)| (w - 1.0 / 16.0).abs() < 1e-15));
        let perturbed = &family.members[1].distribution;
        assert!((perturbed.mass_at(1) - 0.1125).abs() < 1e-15);
        assert!((perturbed.mass_at(2) - 0.0125).abs() < 1e-15);
        assert!((perturbed.mass_at(1) + perturbed.mass_at(2) - 2.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn packing_d32_meets_all_three_properties() {
        let family = build_packing(32, 0.05, 7).unwrap();
        assert!(family.members.len() as f64 > 2f64.powf(2.0));
        assert!(family.members[0].codeword.iter().all(|&b| !b));
        assert!(family.min_pairwise_tv() >= 0.1 - 1e-12);
        assert!(family.max_tv_identity_gap() <= 1e-12);
        assert!((family.kl_budget_ratio().unwrap() - 36.80642071684971).abs() < 1e-9);
    }

    #[test]
    fn packing_rejects_bad_parameters() {
        assert!(build_packing(15, 0.05, 0).is_err());
        assert!(build_packing(14, 0.05, 0).is_err());
        assert!(build_packing(18, 0.05, 0).is_ok());
        assert!(build_packing(16, 0.0625, 0).is_err());
        assert!(build_packing(16, 0.0, 0).is_err());
    }

    #[test]
    fn packing_fast_fails_when_the_target_dwarfs_the_budget() {
        match build_packing(400, 0.05, 0) {
            Err(Error::PackingConstruction { achieved, target }) => {
                assert_eq!(achieved, 1);
                assert_eq!(target, (1 << 25) + 1);
            }
            other => panic!("expected a construction error, got {other:?}"),
        }
    }

    #[test]
    fn packing_randomized_path_works_for_long_codewords() {
        // d = 48 ⇒ codewords of length 24 take the randomized path
        let family = build_packing(48, 0.05, 11).unwrap();
        assert!(family.members.len() as f64 > 2f64.powf(3.0));
        assert!(family.min_pairwise_tv() >= 0.1 - 1e-12);
        assert!(family.max_tv_identity_gap() <= 1e-12);
        let replay = build_packing(48, 0.05, 11).unwrap();
        assert_eq!(replay, family);
    }

    #[test]
    fn tsybakov_floor_examples() {
        assert_eq!(tsybakov_risk_floor(32, 0.05, 1000, 16.0), -0.125);
        assert_eq!(tsybakov_risk_floor(32, 0.05, 0, 16.0), 0.5);
        let crossing = tsybakov_risk_floor(16, 0.1, 100, 16.0);
        assert_eq!(crossing, 0.0); // c·m·ε²/d = 16·100·0.01/16 = 1
    }

    #[test]
    fn minimax_risk_is_one_for_a_single_draw() {
        let family = build_packing(16, 0.05, 3).unwrap();
        let report = empirical_minimax_risk(&family, 1, 100, 5).unwrap();
        // a one-draw MLE is a point mass, at TV ≥ 1 − 0.1125 from every member
        assert_eq!(report.max_risk, 1.0);
        for r in &report.per_member {
            assert_eq!(r.failures, r.trials);
            assert_eq!(r.se, 0.0);
        }
    }

    #[test]
    fn minimax_risk_replays_identically() {
        let family = build_packing(16, 0.05, 3).unwrap();
        let a = empirical_minimax_risk(&family, 40, 60, 9).unwrap();
        let b = empirical_minimax_risk(&family, 40, 60, 9).unwrap();
        assert_eq!(a, b);
        let serial = empirical_minimax_risk_with(&family, 40, 60, 9, ExecMode::Serial).unwrap();
        assert_eq!(serial, a);
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a
            .to_csv()
            .starts_with("member_id,trials,failures,risk_hat,se\n"));
    }

    #[test]
    fn sufficiency_probe_point_mass_succeeds_at_the_smallest_multiplier() {
        let d = make_family("point_mass(4)").unwrap();
        let probe = sufficiency_probe(&d, 0.1, 0.1, &[0.5, 1.0, 2.0], 50, 1).unwrap();
        assert_eq!(probe.sufficient_c, Some(0.5));
        assert_eq!(probe.entries[0].success_hat, 1.0);
    }

    #[test]
    fn sufficiency_probe_uniform_ten_regression() {
        // Regression values for the standard probe grid: the smallest
        // multiplier already reaches TV < 0.2 in every trial at m = 125.
        let d = make_family("uniform(10)").unwrap();
        let probe = sufficiency_probe(&d, 0.2, 0.1, &[0.5, 1.0, 2.0, 4.0, 8.0], 200, 11).unwrap();
        assert_eq!(probe.sufficient_c, Some(0.5));
        assert_eq!(probe.entries[0].m, 125);
        assert_eq!(probe.entries[0].success_hat, 1.0);
        // Finitely supported family: both truncation levels keep every
        // atom, so the two reported half-norms coincide.
        assert_eq!(probe.lambda, probe.fine_truncation_half_norm);
        assert!((probe.lambda - 10.0).abs() < 1e-12);
    }

    #[test]
    fn sufficiency_probe_reports_none_when_the_grid_is_hopeless() {
        let d = make_family("uniform(100)").unwrap();
        let probe = sufficiency_probe(&d, 0.05, 0.1, &[1e-6], 50, 1).unwrap();
        assert_eq!(probe.sufficient_c, None);
        assert_eq!(probe.entries[0].m, 1);
        assert_eq!(probe.entries[0].successes, 0);
    }

    #[test]
    fn sufficiency_probe_validates_input() {
        let d = make_family("uniform(10)").unwrap();
        assert!(sufficiency_probe(&d, 0.0, 0.1, &[1.0], 10, 0).is_err());
        assert!(sufficiency_probe(&d, 0.1, 1.0, &[1.0], 10, 0).is_err());
        assert!(sufficiency_probe(&d, 0.1, 0.1, &[], 10, 0).is_err());
        assert!(sufficiency_probe(&d, 0.1, 0.1, &[-1.0], 10, 0).is_err());
        assert!(sufficiency_probe(&d, 0.1, 0.1, &[1.0], 0, 0).is_err());
    }

    #[test]
    fn error_decomposition_bounds_tv_pointwise() {
        let d = make_family("zipf(2,100)").unwrap();
        let epsilon = 0.2;
        let delta = 0.1;
        let eta = 2.0 * epsilon * delta / 9.0;
        for t in 0..100u64 {
            let sample = draw_iid_stream(&d, 200, 17, t).unwrap();
            let e = empirical_measure(&sample);
            let (e1, e2, e3) = error_decomposition(&d, &e, eta).unwrap();
            let tv = tv_distance(&d, e.base());
            assert!(
                tv <= e1 + e2 + e3 + 1e-12,
                "trial {t}: {tv} vs {}",
                e1 + e2 + e3
            );
            assert!(e3 <= epsilon * delta / 9.0 + 1e-15, "trial {t}");
        }
    }

    #[test]
    fn packing_family_round_trips_through_json() {
        let family = build_packing(16, 0.05, 7).unwrap();
        let json = serde_json::to_string(&family).unwrap();
        assert!(json.contains("\"codeword\":\"11000000\""));
        let back: PackingFamily = serde_json::from_str(&json).unwrap();
        assert_eq!(back, family);
        assert!(
            serde_json::from_str::<PackingFamily>(&json.replace("11000000", "11000002")).is_err()
        );
    }
}
