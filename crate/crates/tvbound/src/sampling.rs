//! Seeded, reproducible iid sampling and the standard test families.
//!
//! Sampling is inverse-CDF over the cumulative mass in index order, with
//! uniforms taken as `(next_u64() >> 11) · 2⁻⁵³` from a ChaCha8 stream, so
//! identical `(distribution, m, seed)` triples produce identical draws on
//! every platform. Parallel callers derive independent per-trial streams
//! with [`draw_iid_stream`].

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dist::Distribution;
use crate::error::{Error, Result};

/// Generator identity recorded alongside every experiment result.
pub const GENERATOR_ID: &str =
    "chacha8(seed_from_u64(master), stream=trial); u=(next_u64>>11)*2^-53; inverse-cdf in index order";

/// An ordered iid sample together with the seed and source that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    draws: Vec<u64>,
    master_seed: u64,
    source_label: String,
}

impl Sample {
    /// Wraps externally produced draws. Draws must be nonempty positive
    /// indices; whether they lie in any particular support is checked by
    /// the operations that need it.
    pub fn new(draws: Vec<u64>, master_seed: u64, source_label: impl Into<String>) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::param(
                "draws",
                "a sample must contain at least one draw",
            ));
        }
        if draws.contains(&0) {
            return Err(Error::param("draws", "draws must be positive integers"));
        }
        Ok(Self {
            draws,
            master_seed,
            source_label: source_label.into(),
        })
    }

    pub fn draws(&self) -> &[u64] {
        &self.draws
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    /// Text form: a `# seed=<u64> source=<label>` header comment followed
    /// by one draw per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# seed={} source={}\n", self.master_seed, self.source_label);
        for &x in &self.draws {
            out.push_str(&x.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text form. The header is optional; without it the seed
    /// defaults to 0 and the source to `external`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut master_seed = 0u64;
        let mut source_label = String::from("external");
        let mut draws = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                if n == 0 {
                    for field in header.split_whitespace() {
                        if let Some(v) = field.strip_prefix("seed=") {
                            master_seed = v.parse().map_err(|e| Error::Parse {
                                line: n + 1,
                                reason: format!("bad seed `{v}`: {e}"),
                            })?;
                        } else if let Some(v) = field.strip_prefix("source=") {
                            source_label = v.to_string();
                        }
                    }
                }
                continue;
            }
            let draw: u64 = line.parse().map_err(|e| Error::Parse {
                line: n + 1,
                reason: format!("bad draw `{line}`: {e}"),
            })?;
            if draw == 0 {
                return Err(Error::Parse {
                    line: n + 1,
                    reason: "draws must be positive integers".into(),
                });
            }
            draws.push(draw);
        }
        if draws.is_empty() {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                reason: "empty sample".into(),
            });
        }
        Ok(Self {
            draws,
            master_seed,
            source_label,
        })
    }
}

fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * 2f64.powi(-53)
}

/// Draws `m` iid indices from a proper distribution, deterministically in
/// `(d, m, seed)`.
pub fn draw_iid(d: &Distribution, m: usize, seed: u64) -> Result<Sample> {
    draw_iid_stream(d, m, seed, 0)
}

/// Like [`draw_iid`] but on an explicit ChaCha stream, so that per-trial
/// parallel work derives independent, replayable randomness from a single
/// master seed.
pub fn draw_iid_stream(
    d: &Distribution,
    m: usize,
    master_seed: u64,
    stream: u64,
) -> Result<Sample> {
    if !d.is_proper() {
        return Err(Error::param("d", "sampling requires a proper distribution"));
    }
    if m == 0 {
        return Err(Error::param("m", "sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);

    let atoms = d.atoms();
    let mut cum = Vec::with_capacity(atoms.len());
    let mut acc = 0.0;
    for &(_, w) in atoms {
        acc += w;
        cum.push(acc);
    }
    let total = acc;

    let mut draws = Vec::with_capacity(m);
    for _ in 0..m {
        let x = next_unit(&mut rng) * total;
        let k = cum.partition_point(|&c| c <= x).min(atoms.len() - 1);
        draws.push(atoms[k].0);
    }
    Ok(Sample {
        draws,
        master_seed,
        source_label: String::from("draw_iid"),
    })
}

/// A named test-family constructor, parseable from strings like
/// `uniform(10)`, `two_point(0.1)`, `geometric(0.5,64)`, `zipf(2,100)`,
/// and `point_mass(3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    Uniform { d: u64 },
    TwoPoint { epsilon: f64 },
    Geometric { p: f64, cutoff: u64 },
    Zipf { s: f64, cutoff: u64 },
    PointMass { index: u64 },
}

impl FamilySpec {
    /// Materializes the family as a proper distribution; infinite families
    /// are cut off at their `cutoff` and renormalized.
    pub fn build(&self) -> Result<Distribution> {
        match *self {
            FamilySpec::Uniform { d } => {
                if d < 1 {
                    return Err(Error::param("d", "uniform needs d >= 1"));
                }
                let mass = 1.0 / d as f64;
                Distribution::from_atoms((1..=d).map(|i| (i, mass)))
            }
            FamilySpec::TwoPoint { epsilon } => {
                if !(epsilon > 0.0 && epsilon < 0.5) {
                    return Err(Error::param(
                        "epsilon",
                        format!("{epsilon} is outside (0, 1/2)"),
                    ));
                }
                Distribution::from_atoms([(1, 0.5 - epsilon), (2, 0.5 + epsilon)])
            }
            FamilySpec::Geometric { p, cutoff } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::param("p", format!("{p} is outside (0, 1)")));
                }
                if cutoff < 1 {
                    return Err(Error::param("cutoff", "geometric needs cutoff >= 1"));
                }
                let weights: Vec<f64> = (0..cutoff).map(|k| p * (1.0 - p).powi(k as i32)).collect();
                renormalized(&weights)
            }
            FamilySpec::Zipf { s, cutoff } => {
                if s.is_nan() || s <= 1.0 {
                    return Err(Error::param("s", format!("{s} must exceed 1")));
                }
                if cutoff < 1 {
                    return Err(Error::param("cutoff", "zipf needs cutoff >= 1"));
                }
                let weights: Vec<f64> = (1..=cutoff).map(|i| (i as f64).powf(-s)).collect();
                renormalized(&weights)
            }
            FamilySpec::PointMass { index } => {
                if index < 1 {
                    return Err(Error::param("index", "point_mass needs a positive index"));
                }
                Distribution::from_atoms([(index, 1.0)])
            }
        }
    }
}

fn renormalized(weights: &[f64]) -> Result<Distribution> {
    let total: f64 = weights.iter().sum();
    Distribution::from_atoms(
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i as u64 + 1, w / total)),
    )
}

/// Parses `name(args)` and materializes it in one step.
pub fn make_family(spec: &str) -> Result<Distribution> {
    spec.parse::<FamilySpec>()?.build()
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Uniform { d } => write!(f, "uniform({d})"),
            FamilySpec::TwoPoint { epsilon } => write!(f, "two_point({epsilon})"),
            FamilySpec::Geometric { p, cutoff } => write!(f, "geometric({p},{cutoff})"),
            FamilySpec::Zipf { s, cutoff } => write!(f, "zipf({s},{cutoff})"),
            FamilySpec::PointMass { index } => write!(f, "point_mass({index})"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |reason: String| Error::param("family", reason);
        let open = text
            .find('(')
            .ok_or_else(|| bad(format!("`{text}` is not of the form name(args)")))?;
        let close = text
            .strip_suffix(')')
            .ok_or_else(|| bad(format!("`{text}` is missing a closing parenthesis")))?;
        let name = &text[..open];
        let args: Vec<&str> = close[open + 1..].split(',').map(str::trim).collect();
        let arity = |n: usize| {
            if args.len() == n && args.iter().all(|a| !a.is_empty()) {
                Ok(())
            } else {
                Err(bad(format!("`{name}` takes {n} argument(s)")))
            }
        };
        let int = |a: &str| {
            a.parse::<u64>()
                .map_err(|e| bad(format!("bad integer `{a}`: {e}")))
        };
        let real = |a: &str| {
            a.parse::<f64>()
                .map_err(|e| bad(format!("bad real `{a}`: {e}")))
        };
        let spec = match name {
            "uniform" => {
                arity(1)?;
                FamilySpec::Uniform { d: int(args[0])? }
            }
            "two_point" => {
                arity(1)?;
                FamilySpec::TwoPoint {
                    epsilon: real(args[0])?,
                }
            }
            "geometric" => {
                arity(2)?;
                FamilySpec::Geometric {
                    p: real(args[0])?,
                    cutoff: int(args[1])?,
                }
            }
            "zipf" => {
                arity(2)?;
                FamilySpec::Zipf {
                    s: real(args[0])?,
                    cutoff: int(args[1])?,
                }
            }
            "point_mass" => {
                arity(1)?;
                FamilySpec::PointMass {
                    index: int(args[0])?,
                }
            }
            other => return Err(bad(format!("unknown family `{other}`"))),
        };
        // surface range errors at parse time
        spec.build()?;
        Ok(spec)
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(D::Error::custom)
    }
}
