//! Poincaré disk geometry.
//!
//! Points live in the open unit disk `D` with the metric `4|dz|²/(1-|z|²)²`.
//! Everything here is a closed-form expression on plain coordinates; no
//! function allocates or holds state.


use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point of the Euclidean plane that carries no disk constraint.
pub type PlanePoint = Complex64;

/// Relative tolerance for the "on the circle" verdict of [`in_circumdisk`].
pub const ON_CIRCLE_TOLERANCE: f64 = 1e-12;

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DiskPoint {
    x: f64,
    y: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && x * x + y * y < 1.0 {
            Ok(DiskPoint { x, y })
        } else {
            Err(Error::OutsideDisk { x, y })
        }
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// The point at hyperbolic distance `distance` from the origin in direction `angle`.
    pub fn from_polar_hyperbolic(distance: f64, angle: f64) -> Result<Self> {
        Self::from_complex(Complex64::from_polar((distance / 2.0).tanh(), angle))
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `1 - |z|²`, the inverse of the conformal scale of the metric (up to the factor 2).
    pub fn defect(&self) -> f64 {
        1.0 - self.norm_sqr()
    }

    /// Image in the Klein model, where geodesics are straight chords.
    pub fn to_klein(self) -> PlanePoint {
        self.to_complex() * (2.0 / (1.0 + self.norm_sqr()))
    }

    /// Clamps a rounding-level escape from the disk back inside.
    fn from_complex_clamped(z: Complex64) -> Self {
        let n = z.norm();
        if n < 1.0 {
            DiskPoint { x: z.re, y: z.im }
        } else {
            let w = z * ((1.0 - f64::EPSILON) / n);
            DiskPoint { x: w.re, y: w.im }
        }
    }
}

/// `sinh(d(p, q) / 2)`, the quantity the conformal change acts on.
pub fn sinh_half_distance(p: DiskPoint, q: DiskPoint) -> f64 {
    let chord = (p.to_complex() - q.to_complex()).norm();
    chord / (p.defect() * q.defect()).sqrt()
}

/// Hyperbolic distance.
///
/// Equal to `arccosh(1 + 2|p-q|²/((1-|p|²)(1-|q|²)))`; evaluated through the
/// half-distance form, which keeps full relative precision for short edges.
pub fn hyp_distance(p: DiskPoint, q: DiskPoint) -> f64 {
    2.0 * sinh_half_distance(p, q).asinh()
}

/// Distance between arbitrary plane points, infinite when either lies outside `D`.
pub fn distance_or_infinite(z1: PlanePoint, z2: PlanePoint) -> f64 {
    match (DiskPoint::from_complex(z1), DiskPoint::from_complex(z2)) {
        (Ok(p), Ok(q)) => hyp_distance(p, q),
        _ => f64::INFINITY,
    }
}

/// Disk automorphism `z ↦ e^{iθ}(z - a)/(1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub center: DiskPoint,
    pub rotation: f64,
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        center: DiskPoint::ORIGIN,
        rotation: 0.0,
    };

    pub fn new(center: DiskPoint, rotation: f64) -> Self {
        MobiusMap { center, rotation }
    }

    /// The automorphism sending `p` to the origin without rotating.
    pub fn centering(p: DiskPoint) -> Self {
        MobiusMap::new(p, 0.0)
    }

    pub fn apply(&self, p: DiskPoint) -> DiskPoint {
        DiskPoint::from_complex_clamped(self.apply_complex(p.to_complex()))
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        let a = self.center.to_complex();
        Complex64::from_polar(1.0, self.rotation) * (z - a) / (1.0 - a.conj() * z)
    }

    pub fn inverse(&self) -> MobiusMap {
        let a = -self.center.to_complex() * Complex64::from_polar(1.0, self.rotation);
        MobiusMap {
            center: DiskPoint::from_complex_clamped(a),
            rotation: -self.rotation,
        }
    }
}

pub fn mobius_apply(m: &MobiusMap, p: DiskPoint) -> DiskPoint {
    m.apply(p)
}

/// Side lengths of a geodesic triangle; side `a` is opposite vertex `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypTriangle {
    a: f64,
    b: f64,
    c: f64,
}

impl HypTriangle {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let lengths = [a, b, c];
        for (side, &l) in lengths.iter().enumerate() {
            let others: f64 = lengths.iter().sum::<f64>() - l;
            if !(l.is_finite() && l > 0.0 && l < others) {
                return Err(Error::TriangleInequality { side, lengths });
            }
        }
        Ok(HypTriangle { a, b, c })
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }
}

/// Inner angles `[A, B, C]` opposite the sides `[a, b, c]`.
///
/// Uses the half-angle form of the hyperbolic law of cosines,
/// `tan²(A/2) = sinh(s-b) sinh(s-c) / (sinh s · sinh(s-a))`, which is free of
/// the cancellation `cosh b cosh c - cosh a` suffers on short sides.
pub fn triangle_angles(t: &HypTriangle) -> [f64; 3] {
    let [a, b, c] = t.sides();
    let s = 0.5 * (a + b + c);
    let (sa, sb, sc) = ((s - a).sinh(), (s - b).sinh(), (s - c).sinh());
    let ss = s.sinh();
    let half = |x: f64, y: f64, opposite: f64| 2.0 * (x * y).sqrt().atan2((ss * opposite).sqrt());
    [half(sb, sc, sa), half(sa, sc, sb), half(sa, sb, sc)]
}

/// Places the triangle with `A` at the origin, `B` on the positive real axis
/// and `C` in the upper half plane.
pub fn layout_triangle(t: &HypTriangle) -> [DiskPoint; 3] {
    let [_, b, c] = t.sides();
    let [alpha, _, _] = triangle_angles(t);
    let vb = DiskPoint {
        x: (c / 2.0).tanh(),
        y: 0.0,
    };
    let vc = DiskPoint::from_complex_clamped(Complex64::from_polar((b / 2.0).tanh(), alpha));
    [DiskPoint::ORIGIN, vb, vc]
}

fn cross(p: Complex64, q: Complex64) -> f64 {
    p.re * q.im - p.im * q.re
}

/// Twice the signed Euclidean area of `(p, q, r)`; positive when counterclockwise.
pub fn orient2d(p: PlanePoint, q: PlanePoint, r: PlanePoint) -> f64 {
    cross(q - p, r - p)
}

/// Orientation of the geodesic triangle `(p, q, r)`, read off the Klein model
/// where the sides are straight.
pub fn hyperbolic_orientation(p: DiskPoint, q: DiskPoint, r: DiskPoint) -> f64 {
    orient2d(p.to_klein(), q.to_klein(), r.to_klein())
}

/// Angle at `p` between the hyperbolic geodesic arc `pq` and the Euclidean segment `pq`.
///
/// Zero when the geodesic is a diameter. Otherwise the geodesic lies on a
/// circle orthogonal to the unit circle with center `z*`, and the angle is half
/// the central angle `∠ p z* q`.
pub fn chord_vs_geodesic_angle(p: DiskPoint, q: DiskPoint) -> Result<f64> {
    let (zp, zq) = (p.to_complex(), q.to_complex());
    if zp == zq {
        return Err(Error::CoincidentPoints);
    }
    let det = cross(zp, zq);
    if det.abs() <= 1e-15 * zp.norm() * zq.norm() {
        return Ok(0.0);
    }
    // Orthogonality to the unit circle: |z* - z|² = |z*|² - 1, i.e. z*·z = (1 + |z|²)/2.
    let hp = 0.5 * (1.0 + p.norm_sqr());
    let hq = 0.5 * (1.0 + q.norm_sqr());
    let center = Complex64::new((hp * zq.im - zp.im * hq) / det, (zp.re * hq - hp * zq.re) / det);
    let ratio = (zq - zp).norm() / (2.0 * (center - zp).norm());
    Ok(ratio.min(1.0).asin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanCircle {
    pub center: PlanePoint,
    pub radius: f64,
}

fn longest_side(p: PlanePoint, q: PlanePoint, r: PlanePoint) -> f64 {
    (p - q).norm().max((q - r).norm()).max((r - p).norm())
}

fn degenerate(p: PlanePoint, q: PlanePoint, r: PlanePoint) -> bool {
    let scale = longest_side(p, q, r);
    scale == 0.0 || orient2d(p, q, r).abs() <= 1e-14 * scale * scale
}

/// The Euclidean circle through three points.
///
/// In the disk model hyperbolic circles, horocycles and hypercycles are all
/// Euclidean circles, so this one circle serves every case.
pub fn circumcircle(p: DiskPoint, q: DiskPoint, r: DiskPoint) -> Result<EuclideanCircle> {
    let (a, b, c) = (p.to_complex(), q.to_complex(), r.to_complex());
    if degenerate(a, b, c) {
        return Err(Error::DegenerateTriangle);
    }
    let (bp, cp) = (b - a, c - a);
    let d = 2.0 * cross(bp, cp);
    let (b2, c2) = (bp.norm_sqr(), cp.norm_sqr());
    let offset = Complex64::new((cp.im * b2 - bp.im * c2) / d, (bp.re * c2 - cp.re * b2) / d);
    Ok(EuclideanCircle {
        center: a + offset,
        radius: offset.norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleSide {
    Inside,
    On,
    Outside,
}

/// Incircle determinant; positive when `s` is inside the circle through the
/// counterclockwise triple `(a, b, c)`.
pub fn incircle_det(a: PlanePoint, b: PlanePoint, c: PlanePoint, s: PlanePoint) -> f64 {
    let (ad, bd, cd) = (a - s, b - s, c - s);
    ad.norm_sqr() * cross(bd, cd) + bd.norm_sqr() * cross(cd, ad) + cd.norm_sqr() * cross(ad, bd)
}

/// Incircle determinant of `(p, q, r)` reordered counterclockwise, divided by
/// the fourth power of the triangle's longest side.
pub fn normalized_incircle(p: PlanePoint, q: PlanePoint, r: PlanePoint, s: PlanePoint) -> Result<f64> {
    if degenerate(p, q, r) {
        return Err(Error::DegenerateTriangle);
    }
    let (q, r) = if orient2d(p, q, r) > 0.0 { (q, r) } else { (r, q) };
    Ok(incircle_det(p, q, r, s) / longest_side(p, q, r).powi(4))
}

/// Classifies `s` against the open disk bounded by the circumcircle of `(p, q, r)`.
pub fn in_circumdisk(p: DiskPoint, q: DiskPoint, r: DiskPoint, s: DiskPoint) -> Result<CircleSide> {
    let value = normalized_incircle(p.to_complex(), q.to_complex(), r.to_complex(), s.to_complex())?;
    Ok(classify_incircle(value))
}

pub fn classify_incircle(normalized: f64) -> CircleSide {
    if normalized.abs() <= ON_CIRCLE_TOLERANCE {
        CircleSide::On
    } else if normalized > 0.0 {
        CircleSide::Inside
    } else {
        CircleSide::Outside
    }
}

/// Euclidean inner angles of the straight triangle `(p, q, r)`.
pub fn euclidean_angles(p: PlanePoint, q: PlanePoint, r: PlanePoint) -> [f64; 3] {
    let corner = |at: PlanePoint, u: PlanePoint, v: PlanePoint| {
        let (e1, e2) = (u - at, v - at);
        cross(e1, e2).abs().atan2(e1.re * e2.re + e1.im * e2.im)
    };
    [corner(p, q, r), corner(q, r, p), corner(r, p, q)]
}
