use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::{face_triangle, induced_lengths, triangles_overlap, GeodesicMap, Triangulation, VertexId};
use crate::error::{Error, Result};
use crate::hyp::{euclidean_angles, hyperbolic_orientation, orient2d, triangle_angles, PlanePoint};

/// Straight-chord map sharing the vertex positions of a geodesic map.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanCompanion {
    pub positions: BTreeMap<VertexId, PlanePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompanionReport {
    /// Smallest Euclidean inner angle of each face, by face index.
    pub face_min_angle: Vec<f64>,
    /// `|Euclidean angle - hyperbolic angle|` at each corner of each face.
    pub corner_perturbation: Vec<[f64; 3]>,
    /// Whether the straight 1-ring of each vertex is embedded.
    pub ring_embedded: BTreeMap<VertexId, bool>,
    /// Whether each straight face has the orientation of its geodesic face.
    pub orientation_agrees: Vec<bool>,
}

impl CompanionReport {
    pub fn min_angle(&self) -> f64 {
        self.face_min_angle.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_perturbation(&self) -> f64 {
        self.corner_perturbation.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn all_rings_embedded(&self) -> bool {
        self.ring_embedded.values().all(|&b| b)
    }

    pub fn all_orientations_agree(&self) -> bool {
        self.orientation_agrees.iter().all(|&b| b)
    }
}

/// Replaces every geodesic face of `psi` by the straight triangle on the same
/// vertices and reports how far the straight map is from the geodesic one.
///
/// Requires every induced edge length to be at most 1.
pub fn build_euclidean_companion(
    t: &Triangulation,
    psi: &GeodesicMap,
) -> Result<(EuclideanCompanion, CompanionReport)> {
    let l = induced_lengths(t, psi)?;
    if let Some((e, len)) = l.iter().find(|&(_, len)| len > 1.0) {
        return Err(Error::OutOfRange(format!(
            "edge ({}, {}) has length {len} > 1",
            e.lo(),
            e.hi()
        )));
    }
    let positions = psi.to_plane();

    let mut face_min_angle = Vec::with_capacity(t.faces().len());
    let mut corner_perturbation = Vec::with_capacity(t.faces().len());
    let mut orientation_agrees = Vec::with_capacity(t.faces().len());
    let mut euclid_angles = Vec::with_capacity(t.faces().len());
    let mut straight_positive = Vec::with_capacity(t.faces().len());
    for f in t.faces() {
        let [a, b, c] = [positions[&f[0]], positions[&f[1]], positions[&f[2]]];
        let orient = orient2d(a, b, c);
        let scale = (b - a).norm().max((c - b).norm()).max((a - c).norm());
        if orient.abs() <= 1e-14 * scale * scale {
            return Err(Error::DegenerateFace {
                face: *f,
                reason: "collinear straight triangle".into(),
            });
        }
        let euclid = euclidean_angles(a, b, c);
        let hyper = triangle_angles(&face_triangle(&l, f)?);
        face_min_angle.push(euclid.iter().copied().fold(f64::INFINITY, f64::min));
        corner_perturbation.push([
            (euclid[0] - hyper[0]).abs(),
            (euclid[1] - hyper[1]).abs(),
            (euclid[2] - hyper[2]).abs(),
        ]);
        let [p, q, r] = psi.face_points(f)?;
        orientation_agrees.push((orient > 0.0) == (hyperbolic_orientation(p, q, r) > 0.0));
        euclid_angles.push(euclid);
        straight_positive.push(orient > 0.0);
    }

    let straight_face = |fi: usize| {
        let f = t.faces()[fi];
        [positions[&f[0]], positions[&f[1]], positions[&f[2]]]
    };
    let mut ring_embedded = BTreeMap::new();
    for &v in t.vertices() {
        let incident = t.vertex_faces(v);
        if incident.is_empty() {
            continue;
        }
        let oriented = incident.iter().all(|&fi| straight_positive[fi]);
        let sum: f64 = incident
            .iter()
            .map(|&fi| {
                let k = t.faces()[fi].iter().position(|&w| w == v).unwrap();
                euclid_angles[fi][k]
            })
            .sum();
        let angle_ok = if t.is_boundary_vertex(v) {
            sum <= 2.0 * PI + 1e-9
        } else {
            (sum - 2.0 * PI).abs() <= 1e-9
        };
        let disjoint = incident.iter().enumerate().all(|(n, &fa)| {
            incident[n + 1..]
                .iter()
                .all(|&fb| !triangles_overlap(&straight_face(fa), &straight_face(fb)))
        });
        ring_embedded.insert(v, oriented && angle_ok && disjoint);
    }

    Ok((
        EuclideanCompanion { positions },
        CompanionReport {
            face_min_angle,
            corner_perturbation,
            ring_embedded,
            orientation_agrees,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp::DiskPoint;
    use crate::mesh::gen_regular_patch;

    #[test]
    fn tiny_patch_near_origin_is_nearly_euclidean() {
        let (t, psi) = gen_regular_patch(2, 1e-3).unwrap();
        let (companion, report) = build_euclidean_companion(&t, &psi).unwrap();
        assert_eq!(companion.positions.len(), t.vertex_count());
        assert!(report.max_perturbation() < 1e-2);
        assert!(report.all_rings_embedded());
        assert!(report.all_orientations_agree());
    }

    #[test]
    fn diameter_edges_are_unperturbed() {
        // A face with two edges on diameters through the origin.
        let t = Triangulation::from_faces(3, vec![[0, 1, 2]]).unwrap();
        let psi = GeodesicMap::from_points([
            DiskPoint::ORIGIN,
            DiskPoint::new(0.3, 0.0).unwrap(),
            DiskPoint::new(0.0, 0.3).unwrap(),
        ]);
        let (_, report) = build_euclidean_companion(&t, &psi).unwrap();
        assert!(report.corner_perturbation[0][0] < 1e-15);
    }

    #[test]
    fn long_edges_are_rejected() {
        let t = Triangulation::from_faces(3, vec![[0, 1, 2]]).unwrap();
        let psi = GeodesicMap::from_points([
            DiskPoint::ORIGIN,
            DiskPoint::new(0.9, 0.0).unwrap(),
            DiskPoint::new(0.0, 0.3).unwrap(),
        ]);
        assert!(matches!(build_euclidean_companion(&t, &psi), Err(Error::OutOfRange(_))));
    }
}
