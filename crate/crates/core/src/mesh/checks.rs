use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::{face_triangle, induced_lengths, Edge, GeodesicMap, Triangulation, VertexId};
use crate::error::{Error, Result};
use crate::hyp::{hyperbolic_orientation, in_circumdisk, triangle_angles, CircleSide, PlanePoint};

/// Angle-sum tolerance around a vertex.
const ANGLE_SUM_TOLERANCE: f64 = 1e-9;

/// Patches with fewer faces than this also get an all-pairs overlap test.
const GLOBAL_OVERLAP_LIMIT: usize = 200;

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DelaunayReport {
    /// Interior edges whose opposite vertex lies inside a neighbouring circumdisk.
    pub violations: Vec<Edge>,
    /// Interior edges whose four vertices are cocircular (admissible).
    pub cocircular: Vec<Edge>,
}

impl DelaunayReport {
    pub fn is_delaunay(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every interior edge `ij` with opposite vertices `k, k'`, checks that
/// `φ(k')` is not in the open circumdisk of `φ(ijk)` and vice versa.
pub fn is_delaunay(t: &Triangulation, phi: &GeodesicMap) -> Result<DelaunayReport> {
    let mut report = DelaunayReport::default();
    for (e, [f1, f2]) in t.interior_edges() {
        let k1 = t.opposite_vertex(f1, e).expect("face contains edge");
        let k2 = t.opposite_vertex(f2, e).expect("face contains edge");
        let side = |fi: usize, apex: VertexId| -> Result<CircleSide> {
            let f = t.faces()[fi];
            let [p, q, r] = phi.face_points(&f)?;
            in_circumdisk(p, q, r, phi.position(apex)?).map_err(|_| Error::DegenerateFace {
                face: f,
                reason: "collinear vertices".into(),
            })
        };
        let (s1, s2) = (side(f1, k2)?, side(f2, k1)?);
        if s1 == CircleSide::Inside || s2 == CircleSide::Inside {
            report.violations.push(e);
        } else if s1 == CircleSide::On || s2 == CircleSide::On {
            report.cocircular.push(e);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub embedded: bool,
    /// The vertex whose neighbourhood fails worst.
    pub witness: Option<VertexId>,
    pub reason: Option<String>,
    /// Faces whose geodesic triangle is clockwise.
    pub inverted_faces: Vec<usize>,
}

/// Whether two straight triangles have overlapping interiors.
///
/// Separating-axis test over the six edge normals; touching along an edge
/// or at a vertex does not count as overlap.
pub fn triangles_overlap(a: &[PlanePoint; 3], b: &[PlanePoint; 3]) -> bool {
    let scale = a
        .iter()
        .chain(b.iter())
        .flat_map(|p| a.iter().chain(b.iter()).map(move |q| (p - q).norm()))
        .fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let project = |tri: &[PlanePoint; 3], axis: PlanePoint| {
        tri.iter()
            .map(|p| p.re * axis.re + p.im * axis.im)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    for tri in [a, b] {
        for k in 0..3 {
            let d = tri[(k + 1) % 3] - tri[k];
            let n = d.norm();
            if n == 0.0 {
                continue;
            }
            let axis = PlanePoint::new(-d.im / n, d.re / n);
            let (alo, ahi) = project(a, axis);
            let (blo, bhi) = project(b, axis);
            if ahi <= blo + tol || bhi <= alo + tol {
                return false;
            }
        }
    }
    true
}

/// Local embedding check.
///
/// A map passes when every face is counterclockwise, the angles around each
/// interior vertex sum to `2π` (at most `2π` at boundary vertices), and the
/// faces of every 1-ring have pairwise disjoint interiors. Small complexes
/// also get an all-pairs face overlap test. Overlap tests run in the Klein
/// model, where geodesic triangles are straight.
pub fn check_embedding(t: &Triangulation, phi: &GeodesicMap) -> Result<EmbeddingReport> {
    let l = induced_lengths(t, phi)?;
    let klein: BTreeMap<VertexId, PlanePoint> = phi.iter().map(|(v, p)| (v, p.to_klein())).collect();
    let klein_face = |fi: usize| {
        let f = t.faces()[fi];
        [klein[&f[0]], klein[&f[1]], klein[&f[2]]]
    };

    let mut positive = Vec::with_capacity(t.faces().len());
    let mut angles = Vec::with_capacity(t.faces().len());
    for f in t.faces() {
        let [p, q, r] = phi.face_points(f)?;
        positive.push(hyperbolic_orientation(p, q, r) > 0.0);
        angles.push(triangle_angles(&face_triangle(&l, f)?));
    }
    let inverted_faces: Vec<usize> = (0..positive.len()).filter(|&fi| !positive[fi]).collect();

    let mut worst: Option<(f64, VertexId, String)> = None;
    for &v in t.vertices() {
        let incident = t.vertex_faces(v);
        if incident.is_empty() {
            continue;
        }
        let mut signed_sum = 0.0;
        let mut inverted_angle = 0.0;
        for &fi in incident {
            let k = t.faces()[fi].iter().position(|&w| w == v).unwrap();
            let a = angles[fi][k];
            if positive[fi] {
                signed_sum += a;
            } else {
                signed_sum -= a;
                inverted_angle += a;
            }
        }
        let interior = !t.is_boundary_vertex(v);
        let angle_defect = if interior {
            (signed_sum - 2.0 * PI).abs()
        } else {
            (signed_sum - 2.0 * PI).max(0.0)
        };
        let overlapping = incident.iter().enumerate().any(|(n, &fa)| {
            incident[n + 1..]
                .iter()
                .any(|&fb| triangles_overlap(&klein_face(fa), &klein_face(fb)))
        });

        let mut reasons = Vec::new();
        if inverted_angle > 0.0 {
            reasons.push("inverted incident face".to_string());
        }
        if angle_defect > ANGLE_SUM_TOLERANCE {
            reasons.push(format!("angle sum {signed_sum:.12} around vertex"));
        }
        if overlapping {
            reasons.push("overlapping faces in 1-ring".to_string());
        }
        if reasons.is_empty() {
            continue;
        }
        let score = inverted_angle + angle_defect;
        if worst.as_ref().is_none_or(|(s, _, _)| score > *s) {
            worst = Some((score, v, reasons.join("; ")));
        }
    }

    if worst.is_none() && t.faces().len() < GLOBAL_OVERLAP_LIMIT {
        let tris: Vec<[PlanePoint; 3]> = (0..t.faces().len()).map(klein_face).collect();
        'outer: for a in 0..tris.len() {
            for b in a + 1..tris.len() {
                if triangles_overlap(&tris[a], &tris[b]) {
                    let v = *t.faces()[a].iter().min().unwrap();
                    worst = Some((0.0, v, format!("faces {a} and {b} overlap")));
                    break 'outer;
                }
            }
        }
    }

    Ok(match worst {
        None => EmbeddingReport {
            embedded: true,
            witness: None,
            reason: None,
            inverted_faces,
        },
        Some((_, v, reason)) => EmbeddingReport {
            embedded: false,
            witness: Some(v),
            reason: Some(reason),
            inverted_faces,
        },
    })
}
