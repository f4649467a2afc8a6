use std::collections::BTreeMap;

use super::{Edge, Face, Triangulation, VertexId};
use crate::error::{Error, Result};
use crate::hyp::{hyp_distance, triangle_angles, DiskPoint, HypTriangle, MobiusMap, PlanePoint};

/// Positions of vertices in the disk; a geodesic map is determined by them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeodesicMap {
    positions: BTreeMap<VertexId, DiskPoint>,
}

impl GeodesicMap {
    pub fn new(positions: BTreeMap<VertexId, DiskPoint>) -> Self {
        GeodesicMap { positions }
    }

    /// Positions for the dense ids `0..points.len()`.
    pub fn from_points(points: impl IntoIterator<Item = DiskPoint>) -> Self {
        GeodesicMap {
            positions: points.into_iter().enumerate().collect(),
        }
    }

    pub fn get(&self, v: VertexId) -> Option<DiskPoint> {
        self.positions.get(&v).copied()
    }

    pub fn position(&self, v: VertexId) -> Result<DiskPoint> {
        self.get(v).ok_or(Error::MissingPosition(v))
    }

    pub fn set(&mut self, v: VertexId, p: DiskPoint) {
        self.positions.insert(v, p);
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, DiskPoint)> + '_ {
        self.positions.iter().map(|(&v, &p)| (v, p))
    }

    /// Post-composition with a disk automorphism.
    pub fn transformed(&self, m: &MobiusMap) -> Self {
        GeodesicMap {
            positions: self.iter().map(|(v, p)| (v, m.apply(p))).collect(),
        }
    }

    pub fn to_plane(&self) -> BTreeMap<VertexId, PlanePoint> {
        self.iter().map(|(v, p)| (v, p.to_complex())).collect()
    }

    pub(crate) fn face_points(&self, f: &Face) -> Result<[DiskPoint; 3]> {
        Ok([self.position(f[0])?, self.position(f[1])?, self.position(f[2])?])
    }
}

/// Positive per-edge lengths.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LengthField {
    values: BTreeMap<Edge, f64>,
}

impl LengthField {
    pub fn new(values: BTreeMap<Edge, f64>) -> Self {
        LengthField { values }
    }

    pub fn get(&self, e: Edge) -> Option<f64> {
        self.values.get(&e).copied()
    }

    pub fn length(&self, a: VertexId, b: VertexId) -> Result<f64> {
        self.get(Edge::new(a, b)).ok_or(Error::MissingLength(a.min(b), a.max(b)))
    }

    pub fn insert(&mut self, e: Edge, l: f64) {
        self.values.insert(e, l);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.values.iter().map(|(&e, &l)| (e, l))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|l|∞`.
    pub fn sup_norm(&self) -> f64 {
        self.values.values().fold(0.0, |m, &l| m.max(l.abs()))
    }

    /// Side lengths of face `[i, j, k]` as `[l_jk, l_ki, l_ij]`, i.e. opposite
    /// each vertex in turn.
    pub fn face_sides(&self, f: &Face) -> Result<[f64; 3]> {
        Ok([
            self.length(f[1], f[2])?,
            self.length(f[2], f[0])?,
            self.length(f[0], f[1])?,
        ])
    }

    /// Indices of faces whose lengths break a strict triangle inequality.
    pub fn triangle_violations(&self, t: &Triangulation) -> Vec<usize> {
        t.faces()
            .iter()
            .enumerate()
            .filter(|(_, f)| face_triangle(self, f).is_err())
            .map(|(fi, _)| fi)
            .collect()
    }
}

/// Geodesic triangle of face `[i, j, k]`; its angles come out in the order `[i, j, k]`.
pub fn face_triangle(l: &LengthField, f: &Face) -> Result<HypTriangle> {
    let [a, b, c] = l.face_sides(f)?;
    HypTriangle::new(a, b, c).map_err(|e| Error::DegenerateFace {
        face: *f,
        reason: e.to_string(),
    })
}

/// Edge lengths `l_ij = d(φ(i), φ(j))`.
pub fn induced_lengths(t: &Triangulation, phi: &GeodesicMap) -> Result<LengthField> {
    let mut values = BTreeMap::new();
    for &e in t.edges() {
        let d = hyp_distance(phi.position(e.lo())?, phi.position(e.hi())?);
        if d <= 0.0 {
            let face = t
                .edge_faces(e)
                .first()
                .map(|&fi| t.faces()[fi])
                .unwrap_or([e.lo(), e.hi(), e.hi()]);
            return Err(Error::DegenerateFace {
                face,
                reason: format!("vertices {} and {} coincide", e.lo(), e.hi()),
            });
        }
        values.insert(e, d);
    }
    let l = LengthField { values };
    for f in t.faces() {
        face_triangle(&l, f)?;
    }
    Ok(l)
}

/// Smallest inner angle over all faces.
pub fn min_inner_angle(t: &Triangulation, phi: &GeodesicMap) -> Result<f64> {
    let l = induced_lengths(t, phi)?;
    let mut min = f64::INFINITY;
    for f in t.faces() {
        for a in triangle_angles(&face_triangle(&l, f)?) {
            min = min.min(a);
        }
    }
    Ok(min)
}
