use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::Result;
use crate::hyp::triangle_angles;
use crate::mesh::{face_triangle, LengthField, Triangulation, VertexId};

/// Angle defect `K_i = 2π - Σ θ_i` at interior vertices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurvatureField {
    values: BTreeMap<VertexId, f64>,
}

impl CurvatureField {
    pub fn get(&self, v: VertexId) -> Option<f64> {
        self.values.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.values.iter().map(|(&v, &k)| (v, k))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |m, &k| m.max(k.abs()))
    }
}

/// Curvature of `l` at every interior vertex of `t`.
///
/// Fails with [`crate::Error::DegenerateFace`] naming the first face whose
/// lengths break a triangle inequality.
pub fn curvature(t: &Triangulation, l: &LengthField) -> Result<CurvatureField> {
    let mut sums: BTreeMap<VertexId, f64> = t.interior_vertices().map(|v| (v, 0.0)).collect();
    for f in t.faces() {
        let angles = triangle_angles(&face_triangle(l, f)?);
        for (&v, a) in f.iter().zip(angles) {
            if let Some(s) = sums.get_mut(&v) {
                *s += a;
            }
        }
    }
    Ok(CurvatureField {
        values: sums.into_iter().map(|(v, s)| (v, 2.0 * PI - s)).collect(),
    })
}
