use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{induced_lengths, GeodesicMap, Triangulation};
use crate::error::{Error, Result};
use crate::hyp::DiskPoint;

/// Hexagonal lattice ball of `rings` rings around a centre vertex at the origin.
///
/// The Euclidean unit-spacing lattice is built in the tangent plane at the
/// origin, scaled by `edge`, and pushed into the disk by the exponential map
/// (tangent radius `ρ` goes to Euclidean radius `tanh(ρ/2)`). Vertex 0 is the
/// centre; the others follow ring by ring, counterclockwise.
///
/// Fails when the exponential map stretches some edge outside
/// `[0.9·edge, 1.1·edge]`, which happens once `rings · edge` is large.
pub fn gen_regular_patch(rings: usize, edge: f64) -> Result<(Triangulation, GeodesicMap)> {
    if rings == 0 {
        return Err(Error::OutOfRange("rings must be at least 1".into()));
    }
    if !(edge > 0.0 && edge <= 0.5) {
        return Err(Error::OutOfRange(format!("edge {edge} must lie in (0, 0.5]")));
    }

    let r = rings as i64;
    // Axial lattice coordinates, ring by ring: start at the corner q = ring and
    // walk the six sides counterclockwise.
    let directions: [(i64, i64); 6] = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)];
    let mut coords = vec![(0_i64, 0_i64)];
    for ring in 1..=r {
        let (mut q, mut s) = (ring, 0);
        for &(dq, ds) in &directions {
            for _ in 0..ring {
                coords.push((q, s));
                q += dq;
                s += ds;
            }
        }
    }
    let index: BTreeMap<(i64, i64), usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut faces = Vec::new();
    for &(q, s) in &coords {
        let v = index[&(q, s)];
        // Lattice basis e1 = (1, 0), e2 = (1/2, √3/2); both triangles below are counterclockwise.
        for [b, c] in [[(q + 1, s), (q, s + 1)], [(q, s + 1), (q - 1, s + 1)]] {
            if let (Some(&vb), Some(&vc)) = (index.get(&b), index.get(&c)) {
                faces.push([v, vb, vc]);
            }
        }
    }
    let t = Triangulation::from_faces(coords.len(), faces)?;

    let h = 3f64.sqrt() / 2.0;
    let mut points = Vec::with_capacity(coords.len());
    for &(q, s) in &coords {
        let tangent = Complex64::new(q as f64 + 0.5 * s as f64, h * s as f64) * edge;
        let rho = tangent.norm();
        let z = if rho == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            tangent * ((rho / 2.0).tanh() / rho)
        };
        points.push(DiskPoint::from_complex(z)?);
    }
    let phi = GeodesicMap::from_points(points);

    let lengths = induced_lengths(&t, &phi)?;
    for (e, l) in lengths.iter() {
        if !(0.9 * edge..=1.1 * edge).contains(&l) {
            return Err(Error::OutOfRange(format!(
                "edge ({}, {}) has length {l}, outside [0.9, 1.1] x {edge}; reduce rings or edge",
                e.lo(),
                e.hi()
            )));
        }
    }
    Ok((t, phi))
}
