//! Sampled audits of the inequalities behind the rigidity argument.
//!
//! Every suite draws its samples from a ChaCha stream keyed by
//! `(seed, sample index)`, evaluates a margin per sample (nonnegative means
//! the inequality holds, normalized by the dominant term), and reduces to the
//! smallest margin with ties broken by index. The reduction is associative
//! and commutative, so reports are identical whatever the thread count.

mod contradiction;
mod lemmas;
mod max_principle;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyp::{DiskPoint, MobiusMap, PlanePoint};

pub use contradiction::{
    audit_contradiction_chain, canonical_instance, check_contradiction_chain, ChainInstance, ChainMargins,
    DEFAULT_EPSILONS,
};
pub use lemmas::{
    angle_lemma_margin, check_angle_lemma, check_compare_distance, check_conversion, check_elementary_chain,
    compare_distance_margins, conversion_residuals, elementary_chain_margins,
};
pub use max_principle::{falsify_max_principle, random_delaunay_ring, ring_realizability, Realizability, Ring};

/// Sampling parameters shared by all suites.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub count: usize,
    pub seed: u64,
    /// Positions are drawn uniformly from the disk of this Euclidean radius.
    pub disk_radius: f64,
    /// Conversion-lemma factors are drawn from `[-factor_bound, factor_bound]`.
    pub factor_bound: f64,
    /// Neighbour factors of the max-principle trials are drawn from `[-ring_factor_bound, ring_factor_bound]`.
    pub ring_factor_bound: f64,
    /// Restricts the contradiction-chain audit to one `ε`.
    pub epsilon: Option<f64>,
}

impl SampleConfig {
    pub fn new(count: usize, seed: u64) -> Self {
        SampleConfig {
            count,
            seed,
            disk_radius: 0.95,
            factor_bound: 0.5,
            ring_factor_bound: 0.1,
            epsilon: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::OutOfRange("sample count must be at least 1".into()));
        }
        if !(self.disk_radius > 0.0 && self.disk_radius < 1.0) {
            return Err(Error::OutOfRange(format!("disk radius {} must lie in (0, 1)", self.disk_radius)));
        }
        if !(self.factor_bound >= 0.0 && self.ring_factor_bound >= 0.0) {
            return Err(Error::OutOfRange("factor bounds must be nonnegative".into()));
        }
        Ok(())
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub suite: String,
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: f64,
    /// Inputs of the sample with the smallest margin, tagged with its index.
    pub witness: Option<serde_json::Value>,
    pub seed: u64,
    /// Trials redrawn because their random construction failed.
    #[serde(skip_serializing_if = "is_zero")]
    pub resampled: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    All,
    Chain,
    Distance,
    Angle,
    MaxPrinciple,
    Conversion,
    S3Chain,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 6] = [
        Suite::Chain,
        Suite::Distance,
        Suite::Angle,
        Suite::MaxPrinciple,
        Suite::Conversion,
        Suite::S3Chain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Chain => "chain",
            Suite::Distance => "distance",
            Suite::Angle => "angle",
            Suite::MaxPrinciple => "maxprinciple",
            Suite::Conversion => "conversion",
            Suite::S3Chain => "s3chain",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All]
            .into_iter()
            .chain(Suite::INDIVIDUAL)
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown suite {s:?}")))
    }
}

/// Runs one suite, or all six in a fixed order for [`Suite::All`].
pub fn run_suite(suite: Suite, cfg: &SampleConfig) -> Result<Vec<AuditReport>> {
    cfg.validate()?;
    let run_one = |s: Suite| -> Result<AuditReport> {
        match s {
            Suite::Chain => check_elementary_chain(cfg),
            Suite::Distance => check_compare_distance(cfg),
            Suite::Angle => check_angle_lemma(cfg),
            Suite::MaxPrinciple => falsify_max_principle(cfg),
            Suite::Conversion => check_conversion(cfg),
            Suite::S3Chain => check_contradiction_chain(cfg),
            Suite::All => unreachable!(),
        }
    };
    match suite {
        Suite::All => Suite::INDIVIDUAL.into_iter().map(run_one).collect(),
        s => Ok(vec![run_one(s)?]),
    }
}

/// Outcome of one sample.
pub(crate) struct Trial<W> {
    pub margin: f64,
    pub resampled: usize,
    pub witness: W,
}

impl<W> Trial<W> {
    pub fn new(margin: f64, witness: W) -> Self {
        Trial {
            margin,
            resampled: 0,
            witness,
        }
    }
}

struct Accumulator<W> {
    worst: Option<(f64, usize, W)>,
    violations: usize,
    resampled: usize,
}

impl<W> Accumulator<W> {
    fn empty() -> Self {
        Accumulator {
            worst: None,
            violations: 0,
            resampled: 0,
        }
    }

    fn merge(self, other: Self) -> Self {
        let worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => {
                let a_first = a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).is_le();
                Some(if a_first { a } else { b })
            }
            (a, b) => a.or(b),
        };
        Accumulator {
            worst,
            violations: self.violations + other.violations,
            resampled: self.resampled + other.resampled,
        }
    }
}

/// Snaps margins within rounding of zero to zero, so that a report has no
/// violations exactly when its worst margin is nonnegative.
fn settle(margin: f64, tolerance: f64) -> f64 {
    if margin.is_nan() {
        f64::NEG_INFINITY
    } else if (-tolerance..0.0).contains(&margin) {
        0.0
    } else {
        margin
    }
}

/// Normalized slack of `lhs ≤ rhs`.
pub(crate) fn slack(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (rhs - lhs) / scale
    }
}

pub(crate) fn run_trials<W, F>(name: &str, cfg: &SampleConfig, tolerance: f64, trial: F) -> Result<AuditReport>
where
    W: Serialize + Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Result<Trial<W>> + Sync,
{
    cfg.validate()?;
    let acc = (0..cfg.count)
        .into_par_iter()
        .map(|index| -> Result<Accumulator<W>> {
            let mut rng = cfg.rng(index);
            let t = trial(&mut rng, index)?;
            let margin = settle(t.margin, tolerance);
            Ok(Accumulator {
                worst: Some((margin, index, t.witness)),
                violations: usize::from(margin < 0.0),
                resampled: t.resampled,
            })
        })
        .try_reduce(Accumulator::empty, |a, b| Ok(a.merge(b)))?;
    let (worst_margin, index, witness) = acc.worst.expect("count is at least 1");
    let mut witness = serde_json::to_value(witness).map_err(|e| Error::Format(e.to_string()))?;
    if let serde_json::Value::Object(map) = &mut witness {
        map.insert("index".into(), index.into());
    }
    Ok(AuditReport {
        suite: name.to_string(),
        samples: cfg.count,
        violations: acc.violations,
        worst_margin,
        witness: Some(witness),
        seed: cfg.seed,
        resampled: acc.resampled,
    })
}

/// Uniform point in the disk of Euclidean radius `radius`.
pub(crate) fn uniform_in_disk(rng: &mut impl Rng, radius: f64) -> DiskPoint {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    DiskPoint::from_complex(PlanePoint::from_polar(r, theta)).expect("radius below 1")
}

/// The point at hyperbolic distance `distance` from `from` in direction `angle`
/// (measured after moving `from` to the origin).
pub(crate) fn at_distance(from: DiskPoint, distance: f64, angle: f64) -> Result<DiskPoint> {
    let local = DiskPoint::from_polar_hyperbolic(distance, angle)?;
    Ok(MobiusMap::centering(from).inverse().apply(local))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp::hyp_distance;

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::All].into_iter().chain(Suite::INDIVIDUAL) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn settle_and_slack() {
        assert_eq!(settle(-1e-13, 1e-12), 0.0);
        assert_eq!(settle(-1e-11, 1e-12), -1e-11);
        assert_eq!(settle(f64::NAN, 1e-12), f64::NEG_INFINITY);
        assert_eq!(slack(0.0, 0.0), 0.0);
        assert_eq!(slack(1.0, 2.0), 0.5);
        assert_eq!(slack(2.0, 1.0), -0.5);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(run_suite(Suite::Chain, &SampleConfig::new(0, 1)).is_err());
    }

    #[test]
    fn placement_at_distance() {
        let from = DiskPoint::new(0.4, -0.3).unwrap();
        let p = at_distance(from, 0.7, 1.2).unwrap();
        assert!((hyp_distance(from, p) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn reduction_is_thread_count_independent() {
        let cfg = SampleConfig::new(2000, 3);
        let parallel = check_compare_distance(&cfg).unwrap();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| check_compare_distance(&cfg).unwrap());
        assert_eq!(parallel.to_json(), serial.to_json());
    }
}
