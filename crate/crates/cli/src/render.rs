//! SVG drawings of geodesic triangulations in the Poincaré disk.
//!
//! Edges are arcs of circles orthogonal to the unit circle. The circle
//! through `p` and `q` is the one through the inverse point `p/|p|²`; its
//! centre `c` solves `2⟨c, p⟩ = 1 + |p|²`, `2⟨c, q⟩ = 1 + |q|²`. When `p`, `q`
//! and the origin are collinear the edge lies on a diameter and is drawn
//! straight.

use std::collections::BTreeSet;
use std::fmt::Write;

use hyperconf::hyp::PlanePoint;
use hyperconf::mesh::{check_embedding, is_delaunay, Edge, GeodesicMap, Triangulation};

pub const SIZE: f64 = 1000.0;
const MARGIN: f64 = 20.0;
const COLLINEAR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Overlay the straight chords of every edge, dashed.
    pub companion: bool,
}

fn scale() -> f64 {
    SIZE / 2.0 - MARGIN
}

fn screen(z: PlanePoint) -> (f64, f64) {
    (SIZE / 2.0 + scale() * z.re, SIZE / 2.0 - scale() * z.im)
}

/// The orthogonal circle through `p` and `q` as `(centre, radius)`, or `None`
/// when the geodesic is a diameter.
pub fn geodesic_circle(p: PlanePoint, q: PlanePoint) -> Option<(PlanePoint, f64)> {
    let det = p.re * q.im - p.im * q.re;
    if det.abs() <= COLLINEAR_TOLERANCE {
        return None;
    }
    let (bp, bq) = ((1.0 + p.norm_sqr()) / 2.0, (1.0 + q.norm_sqr()) / 2.0);
    let centre = PlanePoint::new((bp * q.im - bq * p.im) / det, (p.re * bq - q.re * bp) / det);
    Some((centre, (centre - p).norm()))
}

/// Path segment from the current point (at `p`) to `q` along the geodesic.
fn segment(p: PlanePoint, q: PlanePoint) -> String {
    let (x, y) = screen(q);
    match geodesic_circle(p, q) {
        None => format!("L {x:.4} {y:.4}"),
        Some((c, r)) => {
            let (u, v) = (p - c, q - c);
            // Counterclockwise in the plane is clockwise on screen, which is
            // SVG's positive sweep direction.
            let sweep = u32::from(u.re * v.im - u.im * v.re > 0.0);
            let r = r * scale();
            format!("A {r:.4} {r:.4} 0 0 {sweep} {x:.4} {y:.4}")
        }
    }
}

fn move_to(p: PlanePoint) -> String {
    let (x, y) = screen(p);
    format!("M {x:.4} {y:.4}")
}

/// Draws `phi` on a 1000×1000 canvas. Edges that break the Delaunay
/// condition and faces that are inverted or overlapping are drawn in red;
/// a map too degenerate to check is drawn without highlighting.
pub fn render_svg(t: &Triangulation, phi: &GeodesicMap, options: &RenderOptions) -> String {
    let pos = phi.to_plane();
    let bad_edges: BTreeSet<Edge> = is_delaunay(t, phi)
        .map(|r| r.violations.into_iter().collect())
        .unwrap_or_default();
    let (bad_faces, bad_vertex) = match check_embedding(t, phi) {
        Ok(r) => (r.inverted_faces, r.witness),
        Err(_) => (Vec::new(), None),
    };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r##"<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r##"<circle class="boundary" cx="{c}" cy="{c}" r="{r}" fill="none" stroke="#888888" stroke-width="1.5"/>"##,
        c = SIZE / 2.0,
        r = scale()
    );

    for &fi in &bad_faces {
        let f = t.faces()[fi];
        let Some(z) = f.iter().map(|v| pos.get(v).copied()).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let _ = writeln!(
            svg,
            r##"<path class="face violation" d="{} {} {} {} Z" fill="#ff000040" stroke="none"/>"##,
            move_to(z[0]),
            segment(z[0], z[1]),
            segment(z[1], z[2]),
            segment(z[2], z[0])
        );
    }

    for &e in t.edges() {
        let (Some(&p), Some(&q)) = (pos.get(&e.lo()), pos.get(&e.hi())) else {
            continue;
        };
        let (class, colour) = if bad_edges.contains(&e) {
            ("edge violation", "#d00000")
        } else {
            ("edge", "#1f3a93")
        };
        let _ = writeln!(
            svg,
            r#"<path class="{class}" d="{} {}" fill="none" stroke="{colour}" stroke-width="1"/>"#,
            move_to(p),
            segment(p, q)
        );
    }

    if options.companion {
        for &e in t.edges() {
            let (Some(&p), Some(&q)) = (pos.get(&e.lo()), pos.get(&e.hi())) else {
                continue;
            };
            let ((x1, y1), (x2, y2)) = (screen(p), screen(q));
            let _ = writeln!(
                svg,
                r##"<line class="chord" x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}" stroke="#2a9d3a" stroke-width="0.75" stroke-dasharray="4 3"/>"##
            );
        }
    }

    for (&v, &z) in &pos {
        let (x, y) = screen(z);
        let (class, colour, r) = if bad_vertex == Some(v) {
            ("vertex violation", "#d00000", 4.0)
        } else {
            ("vertex", "#000000", 2.0)
        };
        let _ = writeln!(svg, r#"<circle class="{class}" cx="{x:.4}" cy="{y:.4}" r="{r}" fill="{colour}"/>"#);
    }
    svg.push_str("</svg>\n");
    svg
}
