//! Discrete conformal factors and the operators built on them.
//!
//! Two hyperbolic length fields `l, l'` on the same complex are discretely
//! conformal when `sinh(l'_ij/2) = e^{(u_i+u_j)/2} sinh(l_ij/2)` on every edge
//! for some per-vertex `u`; we write `l' = u *_h l`.

mod curvature;
mod solver;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hyp::{hyp_distance, DiskPoint};
use crate::mesh::{Edge, Face, GeodesicMap, LengthField, Triangulation, VertexId};

pub use curvature::{curvature, CurvatureField};
pub use solver::{curvature_jacobian, random_init, yamabe_solve, IterationRecord, Solution, SolverOptions};

/// Per-vertex log-scale factors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FactorField {
    values: BTreeMap<VertexId, f64>,
}

impl FactorField {
    pub fn new(values: BTreeMap<VertexId, f64>) -> Self {
        FactorField { values }
    }

    pub fn constant(t: &Triangulation, value: f64) -> Self {
        FactorField {
            values: t.vertices().iter().map(|&v| (v, value)).collect(),
        }
    }

    pub fn zeros(t: &Triangulation) -> Self {
        Self::constant(t, 0.0)
    }

    pub fn get(&self, v: VertexId) -> Option<f64> {
        self.values.get(&v).copied()
    }

    pub fn factor(&self, v: VertexId) -> Result<f64> {
        self.get(v).ok_or(Error::MissingFactor(v))
    }

    pub fn set(&mut self, v: VertexId, u: f64) {
        self.values.insert(v, u);
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.values.iter().map(|(&v, &u)| (v, u))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.values().fold(0.0, |m, &u| m.max(u.abs()))
    }

    /// Pointwise sum over the vertices of `self`.
    pub fn plus(&self, other: &FactorField) -> Result<FactorField> {
        let mut values = BTreeMap::new();
        for (v, u) in self.iter() {
            values.insert(v, u + other.factor(v)?);
        }
        Ok(FactorField { values })
    }

    pub fn negated(&self) -> FactorField {
        FactorField {
            values: self.iter().map(|(v, u)| (v, -u)).collect(),
        }
    }
}

fn edge_scale(u: &FactorField, e: Edge) -> Result<f64> {
    Ok(0.5 * (u.factor(e.lo())? + u.factor(e.hi())?))
}

/// Hyperbolic conformal change `u *_h l`:
/// `l'_ij = 2 asinh(e^{(u_i+u_j)/2} sinh(l_ij/2))`.
///
/// The result may violate triangle inequalities; see
/// [`LengthField::triangle_violations`].
pub fn hyp_change(l: &LengthField, u: &FactorField) -> Result<LengthField> {
    let mut out = BTreeMap::new();
    for (e, len) in l.iter() {
        let s = edge_scale(u, e)?;
        let changed = if s == 0.0 {
            len
        } else {
            2.0 * (s.exp() * (0.5 * len).sinh()).asinh()
        };
        out.insert(e, changed);
    }
    Ok(LengthField::new(out))
}

/// Euclidean conformal change: every chord is multiplied by `e^{(u_i+u_j)/2}`.
pub fn euc_change(chords: &LengthField, u: &FactorField) -> Result<LengthField> {
    let mut out = BTreeMap::new();
    for (e, len) in chords.iter() {
        out.insert(e, edge_scale(u, e)?.exp() * len);
    }
    Ok(LengthField::new(out))
}

fn log_defect_ratio(old: DiskPoint, new: DiskPoint) -> f64 {
    (old.defect() / new.defect()).ln()
}

/// Turns a Euclidean factor into a hyperbolic one:
/// `u^h_i = u_i + log((1-|z_i|²)/(1-|z'_i|²))`.
///
/// The chord relation `|z'_i - z'_j| = e^{(u_i+u_j)/2}|z_i - z_j|` holds exactly
/// when `sinh(d(z'_i,z'_j)/2) = e^{(u^h_i+u^h_j)/2} sinh(d(z_i,z_j)/2)` does.
pub fn convert_factor(u: &FactorField, old_pos: &GeodesicMap, new_pos: &GeodesicMap) -> Result<FactorField> {
    let mut out = BTreeMap::new();
    for (v, uv) in u.iter() {
        out.insert(v, uv + log_defect_ratio(old_pos.position(v)?, new_pos.position(v)?));
    }
    Ok(FactorField::new(out))
}

/// Inverse of [`convert_factor`].
pub fn convert_factor_back(u_h: &FactorField, old_pos: &GeodesicMap, new_pos: &GeodesicMap) -> Result<FactorField> {
    let mut out = BTreeMap::new();
    for (v, uv) in u_h.iter() {
        out.insert(v, uv - log_defect_ratio(old_pos.position(v)?, new_pos.position(v)?));
    }
    Ok(FactorField::new(out))
}

/// A geodesic map scaled by `e^b` about the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledEmbedding {
    /// Images of the vertices that stay inside the disk.
    pub map: GeodesicMap,
    /// `u_i = b + log((1-|ψ(i)|²)/(1-|e^b ψ(i)|²))` on the same vertices.
    pub factors: FactorField,
    /// Vertices pushed onto or past the unit circle.
    pub outside: BTreeSet<VertexId>,
}

impl ScaledEmbedding {
    /// Length of `e` under the scaled map; infinite when an endpoint left the disk.
    pub fn edge_length(&self, e: Edge) -> f64 {
        match (self.map.get(e.lo()), self.map.get(e.hi())) {
            (Some(p), Some(q)) => hyp_distance(p, q),
            _ => f64::INFINITY,
        }
    }
}

/// Scales `psi` by `e^b` and returns the factor relating old and new lengths.
pub fn scale_embedding(t: &Triangulation, psi: &GeodesicMap, b: f64) -> Result<ScaledEmbedding> {
    let mut map = GeodesicMap::default();
    let mut factors = BTreeMap::new();
    let mut outside = BTreeSet::new();
    let stretch = b.exp();
    for &v in t.vertices() {
        let p = psi.position(v)?;
        match DiskPoint::from_complex(p.to_complex() * stretch) {
            Ok(q) => {
                map.set(v, q);
                factors.insert(v, b + log_defect_ratio(p, q));
            }
            Err(_) => {
                outside.insert(v);
            }
        }
    }
    Ok(ScaledEmbedding {
        map,
        factors: FactorField::new(factors),
        outside,
    })
}

/// `e^{u_i}` recovered from one face:
/// `(σ'_ij/σ_ij)(σ'_ik/σ_ik) / (σ'_jk/σ_jk)` with `σ = sinh(l/2)`,
/// where `corner` is `i`.
pub fn factor_from_triangle(l: &LengthField, l_new: &LengthField, face: &Face, corner: VertexId) -> Result<f64> {
    let k = face
        .iter()
        .position(|&w| w == corner)
        .ok_or(Error::UnknownVertex(corner))?;
    let (i, j, m) = (face[k], face[(k + 1) % 3], face[(k + 2) % 3]);
    let ratio = |a: VertexId, b: VertexId| -> Result<f64> {
        Ok((0.5 * l_new.length(a, b)?).sinh() / (0.5 * l.length(a, b)?).sinh())
    };
    Ok(ratio(i, j)? * ratio(i, m)? / ratio(j, m)?)
}
