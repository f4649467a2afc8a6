//! Acceptance checks. Each criterion prints one PASS/FAIL line with its
//! runtime; the process fails if any criterion fails or overruns its budget.
//! Tolerances and sample counts here are fixed and must not be loosened.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hyperconf::conformal::{curvature, hyp_change, random_init, scale_embedding, yamabe_solve, SolverOptions};
use hyperconf::hyp::{in_circumdisk, CircleSide, DiskPoint, MobiusMap, PlanePoint};
use hyperconf::io::{write_mesh, Mesh};
use hyperconf::mesh::{gen_regular_patch, induced_lengths};
use hyperconf::verifier::{
    audit_contradiction_chain, canonical_instance, run_suite, AuditReport, SampleConfig, Suite, DEFAULT_EPSILONS,
};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_241_017;

const CHAIN_SAMPLES: usize = 100_000;
const DISTANCE_SAMPLES: usize = 100_000;
const ANGLE_SAMPLES: usize = 100_000;
const CONVERSION_SAMPLES: usize = 10_000;
const CONVERSION_RESIDUAL: f64 = 1e-10;
const SCALING_PATCHES: usize = 100;
const SCALING_MAX_B: f64 = 0.01;
const SCALING_TOLERANCE: f64 = 1e-10;
const DELAUNAY_QUADRUPLES: usize = 10_000;
const COCIRCULAR_CASES: usize = 100;
const ON_CIRCLE: f64 = 1e-12;
const RIGIDITY_RUNS: u64 = 100;
const RIGIDITY_MIN_CONVERGED: usize = 95;
const RIGIDITY_INIT_BOUND: f64 = 0.1;
const RIGIDITY_FACTOR_BOUND: f64 = 1e-8;
const RIGIDITY_RESIDUAL: f64 = 1e-10;
const MAX_PRINCIPLE_TRIALS: usize = 10_000;
const CHAIN_AUDIT_SAMPLES: usize = 300;
const DETERMINISM_SAMPLES: usize = 2_000;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite_report(suite: Suite, count: usize) -> Result<AuditReport, String> {
    run_suite(suite, &SampleConfig::new(count, SEED))
        .map_err(|e| e.to_string())?
        .pop()
        .ok_or_else(|| "empty report list".to_string())
}

fn zero_violations(suite: Suite, count: usize) -> Outcome {
    let r = suite_report(suite, count)?;
    ensure(r.samples == count, || format!("ran {} of {count} samples", r.samples))?;
    ensure(r.violations == 0, || format!("{} violations, worst {}", r.violations, r.to_json()))?;
    Ok(format!("{count} samples, 0 violations, worst margin {:.3e}", r.worst_margin))
}

fn elementary_chain() -> Outcome {
    zero_violations(Suite::Chain, CHAIN_SAMPLES)
}

fn compare_distance() -> Outcome {
    zero_violations(Suite::Distance, DISTANCE_SAMPLES)
}

fn angle_lemma() -> Outcome {
    zero_violations(Suite::Angle, ANGLE_SAMPLES)
}

fn conversion() -> Outcome {
    let r = suite_report(Suite::Conversion, CONVERSION_SAMPLES)?;
    ensure(r.violations == 0, || r.to_json())?;
    let w = r.witness.as_ref().ok_or("missing witness")?;
    let residuals: Vec<f64> = w["residuals"]
        .as_array()
        .ok_or("witness has no residuals")?
        .iter()
        .filter_map(|v| v.as_f64())
        .collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    ensure(residuals.len() == 2 && worst <= CONVERSION_RESIDUAL, || format!("residuals {residuals:?}"))?;
    Ok(format!("{CONVERSION_SAMPLES} instances, largest residual {worst:.3e}"))
}

/// Distance by the arccosh formula, independent of the library's.
fn oracle_distance(p: PlanePoint, q: PlanePoint) -> f64 {
    (1.0 + 2.0 * (p - q).norm_sqr() / ((1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr()))).acosh()
}

fn scaling_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0_f64;
    let mut edges = 0;
    for _ in 0..SCALING_PATCHES {
        let rings = rng.random_range(1..=3);
        let edge = rng.random_range(0.02..=0.2);
        let b = rng.random_range(-SCALING_MAX_B..=SCALING_MAX_B);
        let centre = DiskPoint::from_complex(PlanePoint::from_polar(rng.random_range(0.0..0.5), rng.random_range(0.0..TAU)))
            .map_err(|e| e.to_string())?;
        let m = MobiusMap::new(centre, rng.random_range(0.0..TAU));
        let (t, phi) = gen_regular_patch(rings, edge).map_err(|e| e.to_string())?;
        let psi = phi.transformed(&m);
        let scaled = scale_embedding(&t, &psi, b).map_err(|e| e.to_string())?;
        ensure(scaled.outside.is_empty(), || "vertex left the disk".into())?;
        let changed = hyp_change(&induced_lengths(&t, &psi).map_err(|e| e.to_string())?, &scaled.factors)
            .map_err(|e| e.to_string())?;
        for (e, l) in changed.iter() {
            let p = psi.get(e.lo()).unwrap().to_complex() * b.exp();
            let q = psi.get(e.hi()).unwrap().to_complex() * b.exp();
            let gap = (oracle_distance(p, q) - l).abs() / l.max(1.0);
            worst = worst.max(gap);
            edges += 1;
        }
    }
    ensure(worst <= SCALING_TOLERANCE, || format!("largest edge gap {worst:.3e}"))?;
    Ok(format!("{SCALING_PATCHES} patches, {edges} edges, largest gap {worst:.3e}"))
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

/// Exact normalized incircle value of `s` against the counterclockwise
/// reordering of `(p, q, r)`, classified with the same `on` band.
fn oracle_side(p: PlanePoint, q: PlanePoint, r: PlanePoint, s: PlanePoint) -> CircleSide {
    let pt = |z: PlanePoint| (exact(z.re), exact(z.im));
    let (p, q, r, s) = (pt(p), pt(q), pt(r), pt(s));
    let cross = |a: &(BigRational, BigRational), b: &(BigRational, BigRational)| &a.0 * &b.1 - &a.1 * &b.0;
    let sub = |a: &(BigRational, BigRational), b: &(BigRational, BigRational)| (&a.0 - &b.0, &a.1 - &b.1);
    let norm2 = |a: &(BigRational, BigRational)| &a.0 * &a.0 + &a.1 * &a.1;
    let orient = cross(&sub(&q, &p), &sub(&r, &p));
    let (q, r) = if orient.is_positive() { (q, r) } else { (r, q) };
    let (ad, bd, cd) = (sub(&p, &s), sub(&q, &s), sub(&r, &s));
    let det = norm2(&ad) * cross(&bd, &cd) + norm2(&bd) * cross(&cd, &ad) + norm2(&cd) * cross(&ad, &bd);
    let longest2 = [norm2(&sub(&p, &q)), norm2(&sub(&q, &r)), norm2(&sub(&r, &p))]
        .into_iter()
        .max()
        .unwrap();
    let normalized = det / (&longest2 * &longest2);
    let band = exact(ON_CIRCLE);
    if normalized.abs() <= band {
        CircleSide::On
    } else if normalized > BigRational::zero() {
        CircleSide::Inside
    } else {
        CircleSide::Outside
    }
}

fn delaunay_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut uniform = |radius: f64| PlanePoint::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU));
    let mut counts = BTreeMap::new();
    let mut tally = |side: CircleSide| *counts.entry(format!("{side:?}")).or_insert(0) += 1;
    let classify = |z: [PlanePoint; 4]| -> Result<(CircleSide, CircleSide), String> {
        let d = z.map(|w| DiskPoint::from_complex(w).unwrap());
        let got = in_circumdisk(d[0], d[1], d[2], d[3]).map_err(|e| e.to_string())?;
        Ok((got, oracle_side(z[0], z[1], z[2], z[3])))
    };
    for k in 0..DELAUNAY_QUADRUPLES {
        let z = [uniform(0.95), uniform(0.95), uniform(0.95), uniform(0.95)];
        let (got, want) = classify(z)?;
        ensure(got == want, || format!("quadruple {k} {z:?}: {got:?} vs exact {want:?}"))?;
        tally(got);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for k in 0..COCIRCULAR_CASES {
        let radius = rng.random_range(0.05..0.4);
        let centre = PlanePoint::from_polar(rng.random_range(0.0..0.5), rng.random_range(0.0..TAU));
        let mut angles: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
        angles.sort_by(f64::total_cmp);
        let z = angles.map(|a| centre + PlanePoint::from_polar(radius, a));
        let (got, want) = classify(z)?;
        ensure(got == CircleSide::On && want == CircleSide::On, || {
            format!("cocircular case {k}: {got:?} vs exact {want:?}")
        })?;
    }
    Ok(format!("{DELAUNAY_QUADRUPLES} random ({counts:?}) and {COCIRCULAR_CASES} cocircular cases agree"))
}

fn rigidity() -> Outcome {
    let (t, phi) = gen_regular_patch(3, 0.02).map_err(|e| e.to_string())?;
    let l = induced_lengths(&t, &phi).map_err(|e| e.to_string())?;
    let pinned: BTreeMap<_, _> = t.boundary_vertices().map(|v| (v, 0.0)).collect();
    let mut converged = 0;
    let mut worst_factor = 0.0_f64;
    let mut worst_residual = 0.0_f64;
    for seed in 0..RIGIDITY_RUNS {
        let init = random_init(&t, &pinned, RIGIDITY_INIT_BOUND, SEED + seed);
        ensure(init.sup_norm() <= RIGIDITY_INIT_BOUND, || "initial factor out of range".into())?;
        let Ok(solution) = yamabe_solve(&t, &l, &pinned, &init, &SolverOptions::default()) else {
            continue;
        };
        converged += 1;
        let k = curvature(&t, &hyp_change(&l, &solution.factors).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .max_abs();
        worst_factor = worst_factor.max(solution.factors.sup_norm());
        worst_residual = worst_residual.max(k);
    }
    ensure(worst_factor <= RIGIDITY_FACTOR_BOUND, || format!("‖u‖∞ reached {worst_factor:.3e}"))?;
    ensure(worst_residual <= RIGIDITY_RESIDUAL, || format!("residual reached {worst_residual:.3e}"))?;
    ensure(converged >= RIGIDITY_MIN_CONVERGED, || format!("only {converged} of {RIGIDITY_RUNS} runs converged"))?;
    Ok(format!(
        "{converged}/{RIGIDITY_RUNS} converged, max ‖u‖∞ {worst_factor:.3e}, max |K| {worst_residual:.3e}"
    ))
}

fn max_principle() -> Outcome {
    zero_violations(Suite::MaxPrinciple, MAX_PRINCIPLE_TRIALS)
}

fn contradiction_chain() -> Outcome {
    for e in DEFAULT_EPSILONS {
        let instance = canonical_instance(e).map_err(|err| err.to_string())?;
        ensure(instance.lengths[0] == e.powi(3) / 8192.0, || "canonical instance is off the boundary".into())?;
        let m = audit_contradiction_chain(e, &instance).map_err(|err| err.to_string())?;
        ensure(m.min() >= 0.0, || format!("ε = {e}: {m:?}"))?;
    }
    let r = suite_report(Suite::S3Chain, CHAIN_AUDIT_SAMPLES)?;
    ensure(r.violations == 0, || r.to_json())?;
    Ok(format!(
        "ε ∈ {DEFAULT_EPSILONS:?}, {CHAIN_AUDIT_SAMPLES} instances, worst margin {:.3e}",
        r.worst_margin
    ))
}

fn determinism() -> Outcome {
    for suite in Suite::INDIVIDUAL {
        let a = suite_report(suite, DETERMINISM_SAMPLES)?.to_json();
        let b = suite_report(suite, DETERMINISM_SAMPLES)?.to_json();
        ensure(a == b, || format!("suite {suite} differs between runs"))?;
    }
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let (t, phi) = gen_regular_patch(3, 0.1).map_err(|e| e.to_string())?;
    let mesh = dir.path().join("mesh.json");
    std::fs::write(&mesh, write_mesh(&Mesh { triangulation: t, map: phi, factors: None })).map_err(|e| e.to_string())?;
    let mut svgs = Vec::new();
    for name in ["a.svg", "b.svg"] {
        let out = dir.path().join(name);
        let args = ["hyperconf", "render", "--mesh", mesh.to_str().unwrap(), "--out", out.to_str().unwrap(), "--companion"];
        let code = hyperconf_cli::run_with(args, &mut Vec::new(), &mut Vec::new());
        ensure(code == 0, || format!("render exited {code}"))?;
        svgs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(svgs[0] == svgs[1], || "render output differs".into())?;
    Ok(format!("{} suites and render byte-identical", Suite::INDIVIDUAL.len()))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn main() {
    let s = Duration::from_secs;
    let criteria = [
        Criterion { name: "elementary chain", budget: s(1), check: elementary_chain },
        Criterion { name: "compare-distance lemma", budget: s(5), check: compare_distance },
        Criterion { name: "angle lemma", budget: s(5), check: angle_lemma },
        Criterion { name: "conversion biconditional", budget: s(5), check: conversion },
        Criterion { name: "scaling identity", budget: s(10), check: scaling_identity },
        Criterion { name: "Delaunay predicate oracle", budget: s(5), check: delaunay_oracle },
        Criterion { name: "pinned-boundary rigidity", budget: s(60), check: rigidity },
        Criterion { name: "max-principle falsification", budget: s(60), check: max_principle },
        Criterion { name: "contradiction-chain audit", budget: s(1), check: contradiction_chain },
        Criterion { name: "determinism", budget: Duration::MAX, check: determinism },
    ];
    let mut failed = 0;
    for (k, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(_) if elapsed > c.budget => ("FAIL", format!("over budget of {:?}", c.budget)),
            Ok(detail) => ("PASS", detail),
            Err(why) => ("FAIL", why),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} {:<30} {:>8.3} s  {detail}", k + 1, c.name, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
