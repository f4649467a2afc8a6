use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{curvature, hyp_change, FactorField};
use crate::error::{Error, Result};
use crate::mesh::{LengthField, Triangulation, VertexId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Target for the max-norm of the curvature at unpinned vertices.
    pub tolerance: f64,
    /// Central finite-difference step for the Jacobian.
    pub fd_step: f64,
    pub max_halvings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 100,
            tolerance: 1e-10,
            fd_step: 1e-6,
            max_halvings: 30,
        }
    }
}

/// One accepted Newton step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Residual after the step.
    pub residual: f64,
    /// Damping factor `2^-k` that was accepted.
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub factors: FactorField,
    pub iterations: usize,
    pub residual: f64,
    pub log: Vec<IterationRecord>,
}

struct Problem<'a> {
    t: &'a Triangulation,
    l: &'a LengthField,
    unknowns: Vec<VertexId>,
}

impl Problem<'_> {
    fn field(&self, base: &FactorField, x: &DVector<f64>) -> FactorField {
        let mut u = base.clone();
        for (&v, &value) in self.unknowns.iter().zip(x.iter()) {
            u.set(v, value);
        }
        u
    }

    /// Curvature at the unknowns, or `None` when some face is not a triangle.
    fn residual_vector(&self, base: &FactorField, x: &DVector<f64>) -> Result<Option<DVector<f64>>> {
        let changed = hyp_change(self.l, &self.field(base, x))?;
        let k = match curvature(self.t, &changed) {
            Ok(k) => k,
            Err(Error::DegenerateFace { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        Ok(Some(DVector::from_iterator(
            self.unknowns.len(),
            self.unknowns.iter().map(|&v| k.get(v).unwrap_or(0.0)),
        )))
    }

    fn jacobian(&self, base: &FactorField, x: &DVector<f64>, h: f64) -> Result<Option<DMatrix<f64>>> {
        let n = self.unknowns.len();
        let mut jac = DMatrix::zeros(n, n);
        for col in 0..n {
            let mut plus = x.clone();
            plus[col] += h;
            let mut minus = x.clone();
            minus[col] -= h;
            let (Some(kp), Some(km)) = (self.residual_vector(base, &plus)?, self.residual_vector(base, &minus)?)
            else {
                return Ok(None);
            };
            jac.set_column(col, &((kp - km) / (2.0 * h)));
        }
        Ok(Some(jac))
    }
}

/// Central finite-difference Jacobian `∂K_i/∂u_j` of the curvature of
/// `u *_h l`, with rows and columns indexed by `vertices` (interior vertices).
pub fn curvature_jacobian(
    t: &Triangulation,
    l: &LengthField,
    u: &FactorField,
    vertices: &[VertexId],
    step: f64,
) -> Result<DMatrix<f64>> {
    let problem = Problem {
        t,
        l,
        unknowns: vertices.to_vec(),
    };
    let x = DVector::from_iterator(vertices.len(), vertices.iter().map(|&v| u.get(v).unwrap_or(0.0)));
    problem.jacobian(u, &x, step)?.ok_or_else(|| Error::DegenerateFace {
        face: [0, 0, 0],
        reason: "finite-difference stencil leaves the realizable cone".into(),
    })
}

/// Finds `u` with zero curvature of `u *_h l` at every unpinned vertex.
///
/// `pinned` must contain every boundary vertex and `init` must agree with it.
/// The iteration is damped Newton: the step is halved until every face
/// satisfies the triangle inequalities and the residual decreases.
pub fn yamabe_solve(
    t: &Triangulation,
    l: &LengthField,
    pinned: &BTreeMap<VertexId, f64>,
    init: &FactorField,
    options: &SolverOptions,
) -> Result<Solution> {
    if let Some(v) = t.boundary_vertices().find(|v| !pinned.contains_key(v)) {
        return Err(Error::Hypothesis(format!("boundary vertex {v} is not pinned")));
    }
    for &v in t.vertices() {
        let start = init.factor(v)?;
        if let Some(&p) = pinned.get(&v) {
            if start != p {
                return Err(Error::Hypothesis(format!(
                    "initial factor {start} at vertex {v} differs from its pinned value {p}"
                )));
            }
        }
    }

    let problem = Problem {
        t,
        l,
        unknowns: t.vertices().iter().copied().filter(|v| !pinned.contains_key(v)).collect(),
    };
    let norm = |k: &DVector<f64>| k.amax();
    let mut x = DVector::from_iterator(problem.unknowns.len(), problem.unknowns.iter().map(|&v| init.get(v).unwrap()));
    let mut k = problem.residual_vector(init, &x)?.ok_or(Error::InfeasibleStep {
        iteration: 0,
        residual: f64::INFINITY,
    })?;
    let mut residual = norm(&k);
    let mut log = Vec::new();

    for iteration in 1..=options.max_iterations {
        if residual <= options.tolerance {
            break;
        }
        let jac = problem
            .jacobian(init, &x, options.fd_step)?
            .ok_or(Error::InfeasibleStep { iteration, residual })?;
        let delta = jac.lu().solve(&(-&k)).ok_or(Error::SingularJacobian(iteration))?;

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=options.max_halvings {
            let trial = &x + &delta * scale;
            if let Some(kt) = problem.residual_vector(init, &trial)? {
                if norm(&kt) < residual {
                    accepted = Some((trial, kt));
                    break;
                }
            }
            scale *= 0.5;
        }
        let (next_x, next_k) = accepted.ok_or(Error::InfeasibleStep { iteration, residual })?;
        x = next_x;
        k = next_k;
        residual = norm(&k);
        log.push(IterationRecord {
            iteration,
            residual,
            step: scale,
        });
    }

    if residual > options.tolerance {
        return Err(Error::NonConvergence {
            iterations: log.len(),
            residual,
        });
    }
    Ok(Solution {
        factors: problem.field(init, &x),
        iterations: log.len(),
        residual,
        log,
    })
}

/// Pinned values on pinned vertices, uniform `[-amplitude, amplitude]` elsewhere.
pub fn random_init(t: &Triangulation, pinned: &BTreeMap<VertexId, f64>, amplitude: f64, seed: u64) -> FactorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = FactorField::default();
    for &v in t.vertices() {
        let value = match pinned.get(&v) {
            Some(&p) => p,
            None => rng.random_range(-amplitude..=amplitude),
        };
        u.set(v, value);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gen_regular_patch, induced_lengths};

    fn pinned_boundary(t: &Triangulation, value: f64) -> BTreeMap<VertexId, f64> {
        t.boundary_vertices().map(|v| (v, value)).collect()
    }

    #[test]
    fn flat_start_is_a_fixed_point() {
        let (t, phi) = gen_regular_patch(2, 0.05).unwrap();
        let l = induced_lengths(&t, &phi).unwrap();
        let sol = yamabe_solve(&t, &l, &pinned_boundary(&t, 0.0), &FactorField::zeros(&t), &Default::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.factors, FactorField::zeros(&t));
    }

    #[test]
    fn random_start_returns_to_zero() {
        let (t, phi) = gen_regular_patch(2, 0.05).unwrap();
        let l = induced_lengths(&t, &phi).unwrap();
        let pinned = pinned_boundary(&t, 0.0);
        for seed in 0..3 {
            let init = random_init(&t, &pinned, 0.1, seed);
            let sol = yamabe_solve(&t, &l, &pinned, &init, &Default::default()).unwrap();
            assert!(sol.factors.sup_norm() <= 1e-8, "seed {seed}: {}", sol.factors.sup_norm());
            assert!(sol.residual <= 1e-10);
            assert!(!sol.log.is_empty());
        }
    }

    fn solve_with_constant_boundary(c: f64) -> (Triangulation, Solution) {
        let (t, phi) = gen_regular_patch(2, 0.05).unwrap();
        let l = induced_lengths(&t, &phi).unwrap();
        let pinned = pinned_boundary(&t, c);
        let init = random_init(&t, &pinned, 0.0, 0);
        let sol = yamabe_solve(&t, &l, &pinned, &init, &Default::default()).unwrap();
        (t, sol)
    }

    fn interior_min(t: &Triangulation, u: &FactorField) -> f64 {
        t.interior_vertices().map(|v| u.get(v).unwrap()).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn negative_boundary_satisfies_min_principle() {
        for c in [-0.01, -0.001] {
            let (t, sol) = solve_with_constant_boundary(c);
            assert!(interior_min(&t, &sol.factors) >= c - 1e-8);
        }
    }

    #[test]
    fn positive_boundary_dips_below_boundary_value() {
        // The minimum principle needs negative factors; with a positive
        // boundary value the interior sits slightly below it.
        let (t, sol) = solve_with_constant_boundary(0.01);
        let m = interior_min(&t, &sol.factors);
        assert!(m < 0.01 && m > 0.0, "{m}");
    }

    #[test]
    fn jacobian_is_symmetric() {
        let (t, phi) = gen_regular_patch(2, 0.05).unwrap();
        let l = induced_lengths(&t, &phi).unwrap();
        let interior: Vec<_> = t.interior_vertices().collect();
        let jac = curvature_jacobian(&t, &l, &FactorField::zeros(&t), &interior, 1e-6).unwrap();
        assert!((&jac - jac.transpose()).amax() < 1e-5);
        assert!(jac.amax() > 1e-3);
    }

    #[test]
    fn precondition_errors() {
        let (t, phi) = gen_regular_patch(1, 0.05).unwrap();
        let l = induced_lengths(&t, &phi).unwrap();
        let zeros = FactorField::zeros(&t);
        let opts = SolverOptions::default();
        assert!(matches!(
            yamabe_solve(&t, &l, &BTreeMap::new(), &zeros, &opts),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            yamabe_solve(&t, &l, &pinned_boundary(&t, 0.5), &zeros, &opts),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let (t, phi) = gen_regular_patch(2, 0.05).unwrap();
        let l = induced_lengths(&t, &phi).unwrap();
        let pinned = pinned_boundary(&t, 0.0);
        let init = random_init(&t, &pinned, 0.1, 5);
        let opts = SolverOptions {
            max_iterations: 1,
            ..Default::default()
        };
        assert!(matches!(
            yamabe_solve(&t, &l, &pinned, &init, &opts),
            Err(Error::NonConvergence { iterations: 1, .. })
        ));
    }

    #[test]
    fn random_init_is_deterministic() {
        let (t, _) = gen_regular_patch(2, 0.05).unwrap();
        let pinned = pinned_boundary(&t, 0.0);
        assert_eq!(random_init(&t, &pinned, 0.1, 9), random_init(&t, &pinned, 0.1, 9));
        assert_ne!(random_init(&t, &pinned, 0.1, 9), random_init(&t, &pinned, 0.1, 10));
        let u = random_init(&t, &pinned, 0.1, 9);
        assert!(u.sup_norm() <= 0.1);
        assert!(t.boundary_vertices().all(|v| u.get(v) == Some(0.0)));
    }
}
