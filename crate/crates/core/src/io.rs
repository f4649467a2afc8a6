//! JSON formats for meshes, factor fields and length fields.
//!
//! Floats are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly; non-finite values become `null`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

use crate::conformal::FactorField;
use crate::error::{Error, Result};
use crate::hyp::DiskPoint;
use crate::mesh::{Edge, GeodesicMap, LengthField, Triangulation, VertexId};

struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn write_null<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        CompactFormatter.write_null(writer)
    }
}

/// Compact JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SeventeenDigits);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

/// A triangulated patch with its geodesic map and, optionally, a factor field.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub triangulation: Triangulation,
    pub map: GeodesicMap,
    pub factors: Option<FactorField>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: VertexId,
    x: f64,
    y: f64,
    boundary: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    vertices: Vec<VertexRecord>,
    faces: Vec<[VertexId; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<BTreeMap<VertexId, f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorFile {
    factors: BTreeMap<VertexId, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LengthRecord {
    i: VertexId,
    j: VertexId,
    l: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LengthFile {
    lengths: Vec<LengthRecord>,
}

fn factor_map(u: &FactorField) -> BTreeMap<VertexId, f64> {
    u.iter().collect()
}

fn checked_factors(values: BTreeMap<VertexId, f64>, n: usize) -> Result<FactorField> {
    if let Some((v, u)) = values.iter().find(|(&v, u)| v >= n || !u.is_finite()) {
        return Err(Error::Format(format!("bad factor {u} for vertex {v}")));
    }
    Ok(FactorField::new(values))
}

pub fn write_mesh(mesh: &Mesh) -> String {
    let t = &mesh.triangulation;
    let vertices = t
        .vertices()
        .iter()
        .map(|&v| {
            let p = mesh.map.get(v).unwrap_or(DiskPoint::ORIGIN);
            VertexRecord {
                id: v,
                x: p.x(),
                y: p.y(),
                boundary: t.is_boundary_vertex(v),
            }
        })
        .collect();
    to_json(&MeshFile {
        vertices,
        faces: t.faces().to_vec(),
        factors: mesh.factors.as_ref().map(factor_map),
    })
}

/// Parses a mesh, requiring ids `0..n` each exactly once, positions inside
/// the disk, and boundary flags that match the complex.
pub fn read_mesh(text: &str) -> Result<Mesh> {
    let file: MeshFile = parse(text)?;
    let n = file.vertices.len();
    let ids: BTreeSet<VertexId> = file.vertices.iter().map(|r| r.id).collect();
    if ids.len() != n || ids.last().is_some_and(|&m| m + 1 != n) {
        return Err(Error::Format(format!("vertex ids must be 0..{n}, each once")));
    }
    let mut map = GeodesicMap::default();
    for r in &file.vertices {
        map.set(r.id, DiskPoint::new(r.x, r.y)?);
    }
    let triangulation = Triangulation::from_faces(n, file.faces)?;
    for r in &file.vertices {
        if triangulation.is_boundary_vertex(r.id) != r.boundary {
            return Err(Error::Format(format!(
                "vertex {} is marked boundary={} but the faces say otherwise",
                r.id, r.boundary
            )));
        }
    }
    let factors = file.factors.map(|f| checked_factors(f, n)).transpose()?;
    Ok(Mesh {
        triangulation,
        map,
        factors,
    })
}

pub fn write_factors(u: &FactorField) -> String {
    to_json(&FactorFile { factors: factor_map(u) })
}

pub fn read_factors(text: &str) -> Result<FactorField> {
    let file: FactorFile = parse(text)?;
    checked_factors(file.factors, usize::MAX)
}

pub fn write_lengths(l: &LengthField) -> String {
    let lengths = l
        .iter()
        .map(|(e, len)| LengthRecord {
            i: e.lo(),
            j: e.hi(),
            l: len,
        })
        .collect();
    to_json(&LengthFile { lengths })
}

pub fn read_lengths(text: &str) -> Result<LengthField> {
    let file: LengthFile = parse(text)?;
    let mut l = LengthField::default();
    for r in file.lengths {
        if r.i == r.j || !(r.l.is_finite() && r.l > 0.0) {
            return Err(Error::Format(format!("bad length {} on edge ({}, {})", r.l, r.i, r.j)));
        }
        l.insert(Edge::new(r.i, r.j), r.l);
    }
    Ok(l)
}
