use std::collections::{BTreeMap, BTreeSet};

use super::{face_edges, Edge, Triangulation, VertexId};
use crate::error::{Error, Result};
use crate::hyp::{distance_or_infinite, PlanePoint};

/// All faces containing `v`, with their vertices and edges.
pub fn one_ring(t: &Triangulation, v: VertexId) -> Result<Triangulation> {
    let incident = t.vertex_faces(v);
    if incident.is_empty() {
        return Err(Error::UnknownVertex(v));
    }
    let faces: Vec<_> = incident.iter().map(|&fi| t.faces()[fi]).collect();
    let vertices: BTreeSet<VertexId> = faces.iter().flatten().copied().collect();
    let edges: BTreeSet<Edge> = faces.iter().flat_map(face_edges).collect();
    Triangulation::from_parts(vertices, edges, faces)
}

/// Subcomplex of edges no longer than `threshold`.
///
/// `E₀` holds the edges with `d ≤ threshold` (distance is infinite when an
/// endpoint is outside the disk or has no position), `V₀` their endpoints, and
/// `F₀` the faces whose three edges are all in `E₀`.
pub fn extract_short_edge_subcomplex(
    t: &Triangulation,
    positions: &BTreeMap<VertexId, PlanePoint>,
    threshold: f64,
) -> Triangulation {
    let distance = |e: &Edge| match (positions.get(&e.lo()), positions.get(&e.hi())) {
        (Some(&a), Some(&b)) => distance_or_infinite(a, b),
        _ => f64::INFINITY,
    };
    let edges: BTreeSet<Edge> = t.edges().iter().copied().filter(|e| distance(e) <= threshold).collect();
    let vertices: BTreeSet<VertexId> = edges.iter().flat_map(|e| [e.lo(), e.hi()]).collect();
    let faces = t
        .faces()
        .iter()
        .copied()
        .filter(|f| face_edges(f).iter().all(|e| edges.contains(e)))
        .collect();
    Triangulation::from_parts(vertices, edges, faces).expect("a subcomplex of a valid complex is valid")
}
