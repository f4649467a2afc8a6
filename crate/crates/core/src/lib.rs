//! Discrete conformal geometry of geodesic triangulations in the Poincaré disk.
//!
//! The crate is layered bottom-up:
//!
//! - [`hyp`]: points, distances, Möbius maps, triangles and circle predicates;
//! - [`mesh`]: triangulations, geodesic maps and their embedding/Delaunay checks;
//! - [`conformal`]: conformal factors, curvature and a Newton solver;
//! - [`verifier`]: sampled audits of the inequalities the theory relies on;
//! - [`io`]: JSON formats for meshes, factors and lengths.

pub mod conformal;
pub mod error;
pub mod hyp;
pub mod io;
pub mod mesh;
pub mod verifier;

pub use conformal::{
    convert_factor, convert_factor_back, curvature, euc_change, factor_from_triangle, hyp_change, random_init,
    scale_embedding, yamabe_solve, CurvatureField, FactorField, Solution, SolverOptions,
};
pub use error::{Error, Result};
pub use hyp::{hyp_distance, in_circumdisk, mobius_apply, triangle_angles, CircleSide, DiskPoint, HypTriangle, MobiusMap};
pub use mesh::{
    check_embedding, gen_regular_patch, induced_lengths, is_delaunay, Edge, GeodesicMap, LengthField, Triangulation,
    VertexId,
};
