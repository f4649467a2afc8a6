use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::{at_distance, run_trials, slack, uniform_in_disk, AuditReport, SampleConfig, Trial};
use crate::conformal::{convert_factor, convert_factor_back, FactorField};
use crate::error::Result;
use crate::hyp::{chord_vs_geodesic_angle, hyp_distance, DiskPoint, PlanePoint};
use crate::mesh::GeodesicMap;

const CHAIN_TOLERANCE: f64 = 1e-12;
const DISTANCE_TOLERANCE: f64 = 1e-12;
const ANGLE_TOLERANCE: f64 = 1e-12;
const CONVERSION_RESIDUAL: f64 = 1e-10;

/// Upper end of the distances drawn for the compare-distance suite; half the
/// pairs are placed within this distance so the `d ≤ 1` branch is exercised.
const NEAR_PAIR_DISTANCE: f64 = 1.2;

/// Slack of each link of `x/2 ≤ sin x ≤ x ≤ sinh x ≤ eˣ - 1 ≤ 2x`, divided by `2x`.
pub fn elementary_chain_margins(x: f64) -> [f64; 5] {
    let terms = [x / 2.0, x.sin(), x, x.sinh(), x.exp_m1(), 2.0 * x];
    let scale = terms[5];
    std::array::from_fn(|k| {
        if scale == 0.0 {
            0.0
        } else {
            (terms[k + 1] - terms[k]) / scale
        }
    })
}

#[derive(Serialize)]
struct ChainWitness {
    x: f64,
    margins: [f64; 5],
}

/// Samples `x` in `[0, 1]`; samples 0 and 1 are the endpoints themselves.
pub fn check_elementary_chain(cfg: &SampleConfig) -> Result<AuditReport> {
    run_trials("chain", cfg, CHAIN_TOLERANCE, |rng, index| {
        let x = match index {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random::<f64>(),
        };
        let margins = elementary_chain_margins(x);
        let margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Trial::new(margin, ChainWitness { x, margins }))
    })
}

/// Normalized margins of the two compare-distance bounds, after relabelling
/// so that `|z1| ≤ |z2|`:
/// `|z2 - z1|/(1 - |z2|) ≤ 2d` (only when `d ≤ 1`, else `None`) and
/// `d/2 ≤ |z2 - z1|/(1 - |z2|)`.
pub fn compare_distance_margins(z1: DiskPoint, z2: DiskPoint) -> (Option<f64>, f64) {
    let (z1, z2) = if z1.norm() <= z2.norm() { (z1, z2) } else { (z2, z1) };
    let d = hyp_distance(z1, z2);
    let ratio = (z2.to_complex() - z1.to_complex()).norm() / (1.0 - z2.norm());
    let upper = (d <= 1.0).then(|| slack(ratio, 2.0 * d));
    (upper, slack(d / 2.0, ratio))
}

#[derive(Serialize)]
struct PairWitness {
    z1: DiskPoint,
    z2: DiskPoint,
    distance: f64,
}

pub fn check_compare_distance(cfg: &SampleConfig) -> Result<AuditReport> {
    run_trials("distance", cfg, DISTANCE_TOLERANCE, |rng, index| {
        let z1 = uniform_in_disk(rng, cfg.disk_radius);
        let mut resampled = 0;
        let z2 = if index % 2 == 0 {
            uniform_in_disk(rng, cfg.disk_radius)
        } else {
            loop {
                let rho = NEAR_PAIR_DISTANCE * (1.0 - rng.random::<f64>());
                let z = at_distance(z1, rho, rng.random_range(0.0..std::f64::consts::TAU))?;
                if z.norm() < cfg.disk_radius {
                    break z;
                }
                resampled += 1;
            }
        };
        let (upper, lower) = compare_distance_margins(z1, z2);
        let mut t = Trial::new(
            upper.map_or(lower, |u| u.min(lower)),
            PairWitness {
                z1,
                z2,
                distance: hyp_distance(z1, z2),
            },
        );
        t.resampled = resampled;
        Ok(t)
    })
}

/// Normalized margin of `angle(chord, geodesic) ≤ 2d`.
pub fn angle_lemma_margin(z1: DiskPoint, z2: DiskPoint) -> Result<f64> {
    let angle = chord_vs_geodesic_angle(z1, z2)?;
    Ok(slack(angle, 2.0 * hyp_distance(z1, z2)))
}

/// Pairs at hyperbolic distance in `(0, 1]`, both inside the sampling disk.
pub fn check_angle_lemma(cfg: &SampleConfig) -> Result<AuditReport> {
    run_trials("angle", cfg, ANGLE_TOLERANCE, |rng, _| {
        let z1 = uniform_in_disk(rng, cfg.disk_radius);
        let mut resampled = 0;
        let z2 = loop {
            let rho = 1.0 - rng.random::<f64>();
            let z = at_distance(z1, rho, rng.random_range(0.0..std::f64::consts::TAU))?;
            if z.norm() < cfg.disk_radius && z != z1 {
                break z;
            }
            resampled += 1;
        };
        let mut t = Trial::new(
            angle_lemma_margin(z1, z2)?,
            PairWitness {
                z1,
                z2,
                distance: hyp_distance(z1, z2),
            },
        );
        t.resampled = resampled;
        Ok(t)
    })
}

fn pair_map(a: DiskPoint, b: DiskPoint) -> GeodesicMap {
    GeodesicMap::from_points([a, b])
}

fn pair_factors(u: [f64; 2]) -> FactorField {
    FactorField::new(BTreeMap::from([(0, u[0]), (1, u[1])]))
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Given `z → z'` satisfying the chord relation with Euclidean factor `u`,
/// returns the relative residual of the hyperbolic relation
/// `sinh(d(z'_1, z'_2)/2) = e^{(u^h_1+u^h_2)/2} sinh(d(z_1, z_2)/2)` with
/// `u^h` from [`convert_factor`] (first entry), and, given `z → z'` satisfying
/// the hyperbolic relation with `u^h`, the relative residual of the chord
/// relation with `u` from [`convert_factor_back`] (second entry).
pub fn conversion_residuals(
    chord_instance: ([DiskPoint; 2], [DiskPoint; 2], [f64; 2]),
    hyperbolic_instance: ([DiskPoint; 2], [DiskPoint; 2], [f64; 2]),
) -> Result<[f64; 2]> {
    let (z, zn, u) = chord_instance;
    let (old, new) = (pair_map(z[0], z[1]), pair_map(zn[0], zn[1]));
    let uh = convert_factor(&pair_factors(u), &old, &new)?;
    let lhs = (hyp_distance(zn[0], zn[1]) / 2.0).sinh();
    let rhs = (0.5 * (uh.factor(0)? + uh.factor(1)?)).exp() * (hyp_distance(z[0], z[1]) / 2.0).sinh();
    let forward = relative_gap(lhs, rhs);

    let (z, zn, uh) = hyperbolic_instance;
    let (old, new) = (pair_map(z[0], z[1]), pair_map(zn[0], zn[1]));
    let u = convert_factor_back(&pair_factors(uh), &old, &new)?;
    let lhs = (zn[0].to_complex() - zn[1].to_complex()).norm();
    let rhs = (0.5 * (u.factor(0)? + u.factor(1)?)).exp() * (z[0].to_complex() - z[1].to_complex()).norm();
    Ok([forward, relative_gap(lhs, rhs)])
}

#[derive(Serialize)]
struct ConversionWitness {
    chord_instance: ([DiskPoint; 2], [DiskPoint; 2], [f64; 2]),
    hyperbolic_instance: ([DiskPoint; 2], [DiskPoint; 2], [f64; 2]),
    residuals: [f64; 2],
}

/// Each sample builds one instance of each direction by explicit placement
/// and checks the residual against `1e-10`.
pub fn check_conversion(cfg: &SampleConfig) -> Result<AuditReport> {
    run_trials("conversion", cfg, 0.0, |rng, _| {
        let b = cfg.factor_bound;
        let r = cfg.disk_radius;
        let mut resampled = 0;
        let chord_instance = loop {
            let z = [uniform_in_disk(rng, r), uniform_in_disk(rng, r)];
            let u = [rng.random_range(-b..=b), rng.random_range(-b..=b)];
            let first = uniform_in_disk(rng, r);
            let turn = PlanePoint::from_polar((0.5 * (u[0] + u[1])).exp(), rng.random_range(0.0..std::f64::consts::TAU));
            let second = first.to_complex() + turn * (z[1].to_complex() - z[0].to_complex());
            if second.norm() < r {
                break (z, [first, DiskPoint::from_complex(second)?], u);
            }
            resampled += 1;
        };
        let hyperbolic_instance = loop {
            let z = [uniform_in_disk(rng, r), uniform_in_disk(rng, r)];
            let uh = [rng.random_range(-b..=b), rng.random_range(-b..=b)];
            let first = uniform_in_disk(rng, r);
            let half = (0.5 * (uh[0] + uh[1])).exp() * (hyp_distance(z[0], z[1]) / 2.0).sinh();
            let second = at_distance(first, 2.0 * half.asinh(), rng.random_range(0.0..std::f64::consts::TAU))?;
            if second.norm() < r {
                break (z, [first, second], uh);
            }
            resampled += 1;
        };
        let residuals = conversion_residuals(chord_instance, hyperbolic_instance)?;
        let mut t = Trial::new(
            slack(residuals[0].max(residuals[1]), CONVERSION_RESIDUAL),
            ConversionWitness {
                chord_instance,
                hyperbolic_instance,
                residuals,
            },
        );
        t.resampled = resampled;
        Ok(t)
    })
}
