use std::f64::consts::{FRAC_PI_3, PI, TAU};

use rand::Rng;
use serde::Serialize;

use super::{at_distance, run_trials, slack, uniform_in_disk, AuditReport, SampleConfig, Trial};
use crate::error::{Error, Result};
use crate::hyp::{euclidean_angles, hyp_distance, layout_triangle, triangle_angles, DiskPoint, HypTriangle};

pub const DEFAULT_EPSILONS: [f64; 3] = [0.1, 0.5, 1.0];
const CHAIN_TOLERANCE: f64 = 1e-10;
const MAX_ATTEMPTS: usize = 10_000;

/// One triangle `ijk` of the argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainInstance {
    /// Lengths before the change, `[l_ij, l_jk, l_ik]`.
    pub lengths: [f64; 3],
    /// Vertex positions after scaling, `[z_i, z_j, z_k]`; the changed lengths
    /// `l'` are their hyperbolic distances.
    pub positions: [DiskPoint; 3],
}

impl ChainInstance {
    /// `[l'_ij, l'_jk, l'_ik]`.
    pub fn changed_lengths(&self) -> [f64; 3] {
        let [zi, zj, zk] = self.positions;
        [hyp_distance(zi, zj), hyp_distance(zj, zk), hyp_distance(zi, zk)]
    }
}

/// Normalized slack of every inequality in the chain; all are nonnegative
/// when the chain holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainMargins {
    /// `|z_j - z_i|/(1 - |z_j|) ≤ ε/8`.
    pub s1: f64,
    /// `|z_k - z_j|/(1 - |z_j|) ≤ ε/(8 sin(ε/2))` and `ε/(8 sin(ε/2)) ≤ 1/2`.
    pub s2: [f64; 2],
    /// `1 - |z_k| ≥ (1 - |z_j|)/2`.
    pub s3: f64,
    /// The five links bounding `l'_jk` by 2, then `l'_ik ≤ 2`.
    pub s4: [f64; 6],
    /// The four links from the sinh-ratio product down to 1.
    pub s5: [f64; 4],
}

impl ChainMargins {
    pub fn min(&self) -> f64 {
        [self.s1, self.s3]
            .into_iter()
            .chain(self.s2)
            .chain(self.s4)
            .chain(self.s5)
            .fold(f64::INFINITY, f64::min)
    }
}

fn hypothesis(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(what()))
    }
}

/// Evaluates every step of the chain on one instance.
///
/// The instance must satisfy: `ε ∈ (0, π/3]`; the original lengths form a
/// triangle with all angles at least `ε` and `|l|∞ ≤ ε³/8192`;
/// `l'_ij ≤ ε/16 ≤ l'_ik`; and the straight triangle on the positions has all
/// angles at least `ε/2`. Otherwise a [`Error::Hypothesis`] names the first
/// failed condition.
pub fn audit_contradiction_chain(epsilon: f64, instance: &ChainInstance) -> Result<ChainMargins> {
    let e = epsilon;
    hypothesis(e > 0.0 && e <= FRAC_PI_3, || format!("epsilon {e} must lie in (0, π/3]"))?;
    let [l_ij, l_jk, l_ik] = instance.lengths;
    let original = HypTriangle::new(l_jk, l_ik, l_ij)
        .map_err(|err| Error::Hypothesis(format!("original lengths: {err}")))?;
    let angles = triangle_angles(&original);
    hypothesis(angles.iter().all(|&a| a >= e), || {
        format!("original angles {angles:?} must be at least epsilon {e}")
    })?;
    let bound = e.powi(3) / 8192.0;
    let longest = l_ij.max(l_jk).max(l_ik);
    hypothesis(longest <= bound, || format!("|l|∞ = {longest} exceeds ε³/8192 = {bound}"))?;

    let [lp_ij, lp_jk, lp_ik] = instance.changed_lengths();
    hypothesis(lp_ij <= e / 16.0, || format!("l'_ij = {lp_ij} exceeds ε/16"))?;
    hypothesis(lp_ik >= e / 16.0, || format!("l'_ik = {lp_ik} is below ε/16"))?;
    let [zi, zj, zk] = instance.positions.map(DiskPoint::to_complex);
    let straight = euclidean_angles(zi, zj, zk);
    hypothesis(straight.iter().all(|&a| a >= e / 2.0), || {
        format!("straight angles {straight:?} must be at least ε/2")
    })?;

    let gap_j = 1.0 - zj.norm();
    let ratio_ij = (zj - zi).norm() / gap_j;
    let ratio_jk = (zk - zj).norm() / gap_j;
    let sin_half = (e / 2.0).sin();
    let sine_bound = e / (8.0 * sin_half);

    let chain = [
        lp_jk,
        2.0 * (zk - zj).norm() / (0.5 * gap_j),
        4.0 * (zj - zi).norm() / (gap_j * sin_half),
        16.0 / e * ratio_ij,
        32.0 / e * lp_ij,
        2.0,
    ];

    let s = |x: f64| (x / 2.0).sinh();
    let product = s(lp_ik) / s(l_ij) * (s(lp_ij) / s(lp_jk)) * (s(l_jk) / s(l_ik));
    let first_bound = (lp_ik / l_ij) * (lp_ij / lp_jk) * (l_jk.sinh() / l_ik.sinh()) / 8.0;
    let second_bound = (e / 16.0 / l_ij) * (e / 32.0) * e.sin() / 8.0;
    let last_bound = e.powi(3) / (8192.0 * l_ij);

    Ok(ChainMargins {
        s1: slack(ratio_ij, e / 8.0),
        s2: [slack(ratio_jk, sine_bound), slack(sine_bound, 0.5)],
        s3: slack(0.5 * gap_j, 1.0 - zk.norm()),
        s4: [
            slack(chain[0], chain[1]),
            slack(chain[1], chain[2]),
            slack(chain[2], chain[3]),
            slack(chain[3], chain[4]),
            slack(chain[4], chain[5]),
            slack(lp_ik, 2.0),
        ],
        s5: [
            slack(first_bound, product),
            slack(second_bound, first_bound),
            slack(last_bound, second_bound),
            slack(1.0, last_bound),
        ],
    })
}

/// A symmetric instance at the equality boundary `l_ij = ε³/8192`: the
/// original triangle is equilateral, and the positions are an isosceles
/// triangle with `z_i` at the origin.
pub fn canonical_instance(epsilon: f64) -> Result<ChainInstance> {
    let e = epsilon;
    // The thin (ε/32, ε/8, ε/8) triangle has apex angle ≈ 0.2507, which only
    // clears ε/2 up to ε = 0.5; larger ε use a fatter triangle.
    let (lp_ij, leg) = if e <= 0.5 { (e / 32.0, e / 8.0) } else { (0.9 * e / 16.0, e / 15.0) };
    let positions = layout_triangle(&HypTriangle::new(leg, leg, lp_ij)?);
    Ok(ChainInstance {
        lengths: [e.powi(3) / 8192.0; 3],
        positions,
    })
}

/// Random compliant instance; returns it with the number of rejected draws.
fn random_instance(rng: &mut impl Rng, epsilon: f64) -> Result<(ChainInstance, usize)> {
    let e = epsilon;
    let floor = e * (1.0 + 1e-6);
    for attempt in 0..MAX_ATTEMPTS {
        let a = rng.random_range(floor..=PI - 2.0 * floor);
        let b = rng.random_range(floor..=PI - a - floor);
        let c = PI - a - b;
        let scale = rng.random_range(0.1..=1.0) * e.powi(3) / 8192.0;
        let sines = [c.sin(), a.sin(), b.sin()];
        let top = sines.iter().copied().fold(0.0, f64::max);
        let lengths = sines.map(|s| scale * s / top);

        let lp_ij = rng.random_range(e / 32.0..=0.999 * e / 16.0);
        let lp_ik = rng.random_range(1.01 * e / 16.0..=e / 8.0);
        let theta = rng.random_range(0.5 * e..=PI - e);
        let zi = uniform_in_disk(rng, 0.9);
        let phi = rng.random_range(0.0..TAU);
        let instance = ChainInstance {
            lengths,
            positions: [zi, at_distance(zi, lp_ij, phi)?, at_distance(zi, lp_ik, phi + theta)?],
        };
        match audit_contradiction_chain(e, &instance) {
            Ok(_) => return Ok((instance, attempt)),
            Err(Error::Hypothesis(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    Err(Error::OutOfRange(format!(
        "no compliant instance for epsilon {e} in {MAX_ATTEMPTS} draws"
    )))
}

#[derive(Serialize)]
struct ChainWitness {
    epsilon: f64,
    instance: ChainInstance,
    margins: ChainMargins,
}

/// Audits the canonical instance of each `ε` (the first samples) followed by
/// random compliant instances, cycling through the `ε` values.
pub fn check_contradiction_chain(cfg: &SampleConfig) -> Result<AuditReport> {
    let epsilons: Vec<f64> = match cfg.epsilon {
        Some(e) => vec![e],
        None => DEFAULT_EPSILONS.to_vec(),
    };
    run_trials("s3chain", cfg, CHAIN_TOLERANCE, |rng, index| {
        let e = epsilons[index % epsilons.len()];
        let (instance, resampled) = if index < epsilons.len() {
            (canonical_instance(e)?, 0)
        } else {
            random_instance(rng, e)?
        };
        let margins = audit_contradiction_chain(e, &instance)?;
        Ok(Trial {
            margin: margins.min(),
            resampled,
            witness: ChainWitness {
                epsilon: e,
                instance,
                margins,
            },
        })
    })
}
