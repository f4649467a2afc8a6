use std::f64::consts::TAU;

use rand::Rng;
use serde::Serialize;

use super::{run_trials, AuditReport, SampleConfig, Trial};
use crate::conformal::{curvature, hyp_change, FactorField};
use crate::error::{Error, Result};
use crate::hyp::{normalized_incircle, triangle_angles, DiskPoint, ON_CIRCLE_TOLERANCE};
use crate::mesh::{check_embedding, face_triangle, induced_lengths, GeodesicMap, LengthField, Triangulation};

/// Curvature below which the centre of a 1-ring counts as flat.
const FLAT_TOLERANCE: f64 = 1e-9;
const MAX_EDGE: f64 = 0.1;
const SPOKE_RANGE: (f64, f64) = (0.04, 0.1);
/// Angular jitter of the rim vertices, as a fraction of `2π/n`.
const JITTER: f64 = 0.25;
const MAX_ATTEMPTS: usize = 10_000;

/// A 1-ring: vertex 0 is the centre, vertices `1..=n` go counterclockwise
/// around it, and face `k` is `(0, k, k+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ring {
    pub positions: Vec<DiskPoint>,
}

impl Ring {
    /// Centre at the origin, rim vertices at hyperbolic distance `spoke`
    /// and equally spaced angles.
    pub fn regular(degree: usize, spoke: f64) -> Result<Ring> {
        let mut positions = vec![DiskPoint::ORIGIN];
        for k in 0..degree {
            positions.push(DiskPoint::from_polar_hyperbolic(spoke, TAU * k as f64 / degree as f64)?);
        }
        Ok(Ring { positions })
    }

    pub fn degree(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn triangulation(&self) -> Triangulation {
        let n = self.degree();
        let faces = (1..=n).map(|k| [0, k, k % n + 1]).collect();
        Triangulation::from_faces(n + 1, faces).expect("a fan is a valid complex")
    }

    pub fn map(&self) -> GeodesicMap {
        GeodesicMap::from_points(self.positions.iter().copied())
    }
}

/// Largest normalized incircle value over the spokes of a fan placed at
/// `points`; positive means some spoke is not locally Delaunay.
fn delaunay_depth(points: &[DiskPoint]) -> Result<f64> {
    let n = points.len() - 1;
    let z = |k: usize| points[(k - 1) % n + 1].to_complex();
    let c = points[0].to_complex();
    let mut depth = f64::NEG_INFINITY;
    for k in 1..=n {
        let (prev, here, next) = (z(k + n - 1), z(k), z(k + 1));
        depth = depth
            .max(normalized_incircle(c, prev, here, next)?)
            .max(normalized_incircle(c, here, next, prev)?);
    }
    Ok(depth)
}

/// Outcome of trying to realize a changed 1-ring as a flat Delaunay fan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realizability {
    /// How far the worst face is from satisfying its triangle inequalities
    /// (relative to its longest side); zero when all faces are triangles.
    pub triangle_defect: f64,
    pub curvature: Option<f64>,
    pub delaunay_depth: Option<f64>,
    pub realizable: bool,
    /// Positive by how much realizability fails; negative when realizable.
    pub margin: f64,
}

fn triangle_defect(sides: [f64; 3]) -> f64 {
    let longest = sides.iter().copied().fold(0.0, f64::max);
    let sum: f64 = sides.iter().sum();
    ((2.0 * longest - sum) / longest).max(0.0)
}

/// Applies `u *_h` to the lengths of `ring` and tests whether the result is
/// a flat (curvature within `1e-9`) Delaunay 1-ring.
pub fn ring_realizability(ring: &Ring, u: &FactorField) -> Result<Realizability> {
    let t = ring.triangulation();
    let changed = hyp_change(&induced_lengths(&t, &ring.map())?, u)?;
    let failed = |triangle_defect, curvature, delaunay_depth, margin| Realizability {
        triangle_defect,
        curvature,
        delaunay_depth,
        realizable: false,
        margin,
    };

    let violated = changed.triangle_violations(&t);
    if !violated.is_empty() {
        let defect = violated
            .iter()
            .map(|&fi| changed.face_sides(&t.faces()[fi]).map(triangle_defect))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        return Ok(failed(defect, None, None, defect));
    }

    let k = curvature(&t, &changed)?.get(0).expect("centre is interior");
    if k.abs() > FLAT_TOLERANCE {
        return Ok(failed(0.0, Some(k), None, k.abs() - FLAT_TOLERANCE));
    }

    let depth = delaunay_depth(&fan_layout(&t, &changed)?)?;
    let margin = depth - ON_CIRCLE_TOLERANCE;
    if margin > 0.0 {
        return Ok(failed(0.0, Some(k), Some(depth), margin));
    }
    Ok(Realizability {
        triangle_defect: 0.0,
        curvature: Some(k),
        delaunay_depth: Some(depth),
        realizable: true,
        margin: margin.min(-f64::MIN_POSITIVE),
    })
}

/// Lays the fan out around the origin from its lengths alone.
fn fan_layout(t: &Triangulation, l: &LengthField) -> Result<Vec<DiskPoint>> {
    let n = t.vertex_count() - 1;
    let mut points = vec![DiskPoint::ORIGIN];
    let mut angle = 0.0;
    for k in 1..=n {
        points.push(DiskPoint::from_polar_hyperbolic(l.length(0, k)?, angle)?);
        angle += triangle_angles(&face_triangle(l, &t.faces()[k - 1])?)[0];
    }
    Ok(points)
}

/// A random embedded, strictly Delaunay 1-ring of the given degree with all
/// edges at most 0.1, plus the number of rejected draws.
pub fn random_delaunay_ring(rng: &mut impl Rng, degree: usize) -> Result<(Ring, usize)> {
    if !(3..=12).contains(&degree) {
        return Err(Error::OutOfRange(format!("ring degree {degree} must lie in 3..=12")));
    }
    let gap = TAU / degree as f64;
    for attempt in 0..MAX_ATTEMPTS {
        let mut positions = vec![DiskPoint::ORIGIN];
        for k in 0..degree {
            let spoke = rng.random_range(SPOKE_RANGE.0..=SPOKE_RANGE.1);
            let angle = gap * (k as f64 + rng.random_range(-JITTER..=JITTER));
            positions.push(DiskPoint::from_polar_hyperbolic(spoke, angle)?);
        }
        let ring = Ring { positions };
        let t = ring.triangulation();
        let Ok(l) = induced_lengths(&t, &ring.map()) else {
            continue;
        };
        if l.sup_norm() > MAX_EDGE || !check_embedding(&t, &ring.map())?.embedded {
            continue;
        }
        if delaunay_depth(&ring.positions)? < -ON_CIRCLE_TOLERANCE {
            return Ok((ring, attempt));
        }
    }
    Err(Error::OutOfRange(format!(
        "no Delaunay ring of degree {degree} found in {MAX_ATTEMPTS} draws"
    )))
}

#[derive(Serialize)]
struct RingWitness {
    ring: Ring,
    factors: Vec<f64>,
    outcome: Realizability,
}

/// Searches for a flat Delaunay 1-ring whose centre factor is negative and
/// strictly below all its neighbours' factors. Each such ring found is a
/// counterexample (negative margin).
pub fn falsify_max_principle(cfg: &SampleConfig) -> Result<AuditReport> {
    run_trials("maxprinciple", cfg, 0.0, |rng, _| {
        let degree = rng.random_range(5..=8);
        let (ring, resampled) = random_delaunay_ring(rng, degree)?;
        let b = cfg.ring_factor_bound;
        let mut factors = vec![0.0];
        factors.extend((0..degree).map(|_| rng.random_range(-b..=b)));
        let lowest = factors[1..].iter().copied().fold(0.0, f64::min);
        factors[0] = lowest - (1e-6 + rng.random_range(0.0..b.max(1e-6)));
        let u = FactorField::new(factors.iter().copied().enumerate().collect());
        let outcome = ring_realizability(&ring, &u)?;
        Ok(Trial {
            margin: outcome.margin,
            resampled,
            witness: RingWitness {
                ring,
                factors,
                outcome,
            },
        })
    })
}
