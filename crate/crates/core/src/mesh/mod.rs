//! Simplicial complexes, geodesic vertex maps and the checks run on them.

mod checks;
mod companion;
mod generate;
mod map;
mod subcomplex;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::{check_embedding, is_delaunay, triangles_overlap, DelaunayReport, EmbeddingReport};
pub use companion::{build_euclidean_companion, CompanionReport, EuclideanCompanion};
pub use generate::gen_regular_patch;
pub use map::{face_triangle, induced_lengths, min_inner_angle, GeodesicMap, LengthField};
pub use subcomplex::{extract_short_edge_subcomplex, one_ring};

pub type VertexId = usize;

/// Counterclockwise vertex triple.
pub type Face = [VertexId; 3];

/// Unordered vertex pair, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(VertexId, VertexId);

impl Edge {
    /// # Panics
    /// When `a == b`.
    pub fn new(a: VertexId, b: VertexId) -> Self {
        assert_ne!(a, b, "an edge needs two distinct vertices");
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn lo(&self) -> VertexId {
        self.0
    }

    pub fn hi(&self) -> VertexId {
        self.1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(&self, v: VertexId) -> Option<VertexId> {
        if v == self.0 {
            Some(self.1)
        } else if v == self.1 {
            Some(self.0)
        } else {
            None
        }
    }
}

pub fn face_edges(f: &Face) -> [Edge; 3] {
    [Edge::new(f[0], f[1]), Edge::new(f[1], f[2]), Edge::new(f[2], f[0])]
}

/// A finite simplicial complex `(V, E, F)` with counterclockwise faces.
///
/// Edges may belong to zero, one or two faces; zero happens only for
/// subcomplexes cut out of a larger triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    edge_faces: BTreeMap<Edge, Vec<usize>>,
    vertex_faces: BTreeMap<VertexId, Vec<usize>>,
    neighbors: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl Triangulation {
    /// Builds the complex on vertices `0..vertex_count` spanned by `faces`.
    pub fn from_faces(vertex_count: usize, faces: Vec<Face>) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for f in &faces {
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidComplex(format!("face {f:?} repeats a vertex")));
            }
            edges.extend(face_edges(f));
        }
        Self::from_parts(0..vertex_count, edges, faces)
    }

    /// Builds a complex from explicit vertex, edge and face sets.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
        faces: Vec<Face>,
    ) -> Result<Self> {
        let vertices: Vec<VertexId> = vertices.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let vertex_set: BTreeSet<VertexId> = vertices.iter().copied().collect();
        let edges: Vec<Edge> = edges.into_iter().collect::<BTreeSet<_>>().into_iter().collect();

        let mut edge_faces: BTreeMap<Edge, Vec<usize>> = edges.iter().map(|&e| (e, Vec::new())).collect();
        let mut neighbors: BTreeMap<VertexId, BTreeSet<VertexId>> =
            vertices.iter().map(|&v| (v, BTreeSet::new())).collect();
        for e in &edges {
            for v in [e.0, e.1] {
                if !vertex_set.contains(&v) {
                    return Err(Error::InvalidComplex(format!("edge {e:?} uses unknown vertex {v}")));
                }
            }
            neighbors.get_mut(&e.0).unwrap().insert(e.1);
            neighbors.get_mut(&e.1).unwrap().insert(e.0);
        }

        let mut vertex_faces: BTreeMap<VertexId, Vec<usize>> = vertices.iter().map(|&v| (v, Vec::new())).collect();
        let mut directed = BTreeSet::new();
        for (fi, f) in faces.iter().enumerate() {
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidComplex(format!("face {f:?} repeats a vertex")));
            }
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let list = edge_faces
                    .get_mut(&Edge::new(a, b))
                    .ok_or_else(|| Error::InvalidComplex(format!("face {f:?} uses missing edge ({a}, {b})")))?;
                list.push(fi);
                if list.len() > 2 {
                    return Err(Error::InvalidComplex(format!("edge ({a}, {b}) has more than two faces")));
                }
                if !directed.insert((a, b)) {
                    return Err(Error::InvalidComplex(format!(
                        "faces around edge ({a}, {b}) are inconsistently oriented"
                    )));
                }
                vertex_faces.get_mut(&a).unwrap().push(fi);
            }
        }

        Ok(Triangulation {
            vertices,
            edges,
            faces,
            edge_faces,
            vertex_faces,
            neighbors,
        })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertex_faces.contains_key(&v)
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.edge_faces.contains_key(&e)
    }

    /// Indices of the faces containing `e` (empty for unknown edges).
    pub fn edge_faces(&self, e: Edge) -> &[usize] {
        self.edge_faces.get(&e).map_or(&[], Vec::as_slice)
    }

    /// Indices of the faces containing `v`.
    pub fn vertex_faces(&self, v: VertexId) -> &[usize] {
        self.vertex_faces.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.neighbors.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn is_boundary_edge(&self, e: Edge) -> bool {
        self.edge_faces(e).len() < 2
    }

    /// A vertex is interior when every incident edge has two faces.
    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        match self.neighbors.get(&v) {
            Some(nb) if !nb.is_empty() => nb.iter().any(|&w| self.is_boundary_edge(Edge::new(v, w))),
            _ => true,
        }
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied().filter(|&v| !self.is_boundary_vertex(v))
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied().filter(|&v| self.is_boundary_vertex(v))
    }

    /// Interior edges with their two incident face indices.
    pub fn interior_edges(&self) -> impl Iterator<Item = (Edge, [usize; 2])> + '_ {
        self.edge_faces
            .iter()
            .filter(|(_, fs)| fs.len() == 2)
            .map(|(&e, fs)| (e, [fs[0], fs[1]]))
    }

    /// The vertex of face `fi` not on `e`.
    pub fn opposite_vertex(&self, fi: usize, e: Edge) -> Option<VertexId> {
        self.faces.get(fi)?.iter().copied().find(|&v| !e.contains(v))
    }

    /// Boundary cycles, each listed in the direction induced by the faces.
    pub fn boundary_cycles(&self) -> Vec<Vec<VertexId>> {
        let mut next: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                if self.edge_faces(Edge::new(a, b)).len() == 1 {
                    next.insert(a, b);
                }
            }
        }
        let mut cycles = Vec::new();
        while let Some((&start, _)) = next.iter().next() {
            let mut cycle = vec![start];
            let mut at = next.remove(&start).unwrap();
            while at != start {
                cycle.push(at);
                match next.remove(&at) {
                    Some(n) => at = n,
                    None => break,
                }
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Faces around `v` in counterclockwise order, starting after a boundary
    /// edge if `v` is on the boundary. Returns face indices.
    pub fn fan(&self, v: VertexId) -> Vec<usize> {
        let incident = self.vertex_faces(v);
        if incident.is_empty() {
            return Vec::new();
        }
        // For the face (v, a, b) the next face counterclockwise contains (v, b).
        let step = |fi: usize| -> (VertexId, VertexId) {
            let f = self.faces[fi];
            let k = f.iter().position(|&w| w == v).unwrap();
            (f[(k + 1) % 3], f[(k + 2) % 3])
        };
        let mut start = incident[0];
        if self.is_boundary_vertex(v) {
            // Walk clockwise until the previous edge (v, a) is a boundary edge.
            for &fi in incident {
                let (a, _) = step(fi);
                if self.edge_faces(Edge::new(v, a)).len() < 2 {
                    start = fi;
                    break;
                }
            }
        }
        let mut order = vec![start];
        let mut current = start;
        while order.len() < incident.len() {
            let (_, b) = step(current);
            let next = incident
                .iter()
                .copied()
                .find(|&fi| fi != current && step(fi).0 == b && !order.contains(&fi));
            match next {
                Some(fi) => {
                    order.push(fi);
                    current = fi;
                }
                None => break,
            }
        }
        // Disconnected fans (non-manifold vertices) keep the remaining faces in input order.
        for &fi in incident {
            if !order.contains(&fi) {
                order.push(fi);
            }
        }
        order
    }
}
