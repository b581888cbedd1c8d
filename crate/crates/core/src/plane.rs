//! Upper half-plane geometry: points, ideal points, geodesics and
//! orientation-preserving isometries as PSL(2, R) matrices.

use std::cmp::Ordering;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, NonHyperbolicKind, Result};
use crate::trig::stable_acosh;

const SHARED_ENDPOINT_TOL: f64 = 1e-12;
const DET_DRIFT: f64 = 1e-13;
const PARABOLIC_BAND: f64 = 1e-12;
/// Parameters closer than this to a segment end do not count as interior.
pub const CROSSING_STRICTNESS: f64 = 1e-10;
/// Crossings at smaller angles are reported as a precision failure.
pub const TANGENCY_ANGLE: f64 = 1e-8;

/// A point of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && y > 0.0) {
            return Err(domain(format!("({x}, {y}) is not in the upper half-plane")));
        }
        Ok(Point { x, y })
    }

    pub const I: Point = Point { x: 0.0, y: 1.0 };
}

/// Hyperbolic distance between two interior points.
pub fn point_distance(p: Point, q: Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// Checked variant of [`point_distance`].
pub fn try_point_distance(p: Point, q: Point) -> Result<f64> {
    Point::new(p.x, p.y)?;
    Point::new(q.x, q.y)?;
    Ok(point_distance(p, q))
}

/// A point of the boundary circle R ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum IdealPoint {
    Finite(f64),
    Infinity,
}

impl IdealPoint {
    fn sort_key(self) -> f64 {
        match self {
            IdealPoint::Finite(x) => x,
            IdealPoint::Infinity => f64::INFINITY,
        }
    }

    fn close_to(self, other: IdealPoint, tol: f64) -> bool {
        match (self, other) {
            (IdealPoint::Infinity, IdealPoint::Infinity) => true,
            (IdealPoint::Finite(a), IdealPoint::Finite(b)) => (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
            (IdealPoint::Finite(a), IdealPoint::Infinity) | (IdealPoint::Infinity, IdealPoint::Finite(a)) => {
                a.abs() >= 1.0 / tol
            }
        }
    }
}

/// An oriented complete geodesic, running from `start` to `end`.
///
/// Equality as a set ignores orientation; see [`Geodesic::same_carrier`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub start: IdealPoint,
    pub end: IdealPoint,
}

impl Geodesic {
    pub fn new(start: IdealPoint, end: IdealPoint) -> Result<Self> {
        if start.close_to(end, 0.0) {
            return Err(domain("geodesic endpoints coincide"));
        }
        Ok(Geodesic { start, end })
    }

    pub fn reversed(self) -> Geodesic {
        Geodesic { start: self.end, end: self.start }
    }

    pub fn same_carrier(&self, other: &Geodesic) -> bool {
        let tol = SHARED_ENDPOINT_TOL;
        (self.start.close_to(other.start, tol) && self.end.close_to(other.end, tol))
            || (self.start.close_to(other.end, tol) && self.end.close_to(other.start, tol))
    }

    /// The isometry taking the imaginary axis (0 → ∞) to this geodesic; the
    /// image of `i` is the unit-speed origin of [`Geodesic::point_at`].
    pub fn normalizer(&self) -> Isometry {
        match (self.start, self.end) {
            (IdealPoint::Finite(p), IdealPoint::Finite(q)) => {
                let s = if q > p { 1.0 } else { -1.0 };
                let k = 1.0 / (q - p).abs().sqrt();
                Isometry::from_entries_unchecked([[q * k, p * s * k], [k, s * k]])
            }
            (IdealPoint::Finite(p), IdealPoint::Infinity) => Isometry::from_entries_unchecked([[1.0, p], [0.0, 1.0]]),
            (IdealPoint::Infinity, IdealPoint::Finite(q)) => Isometry::from_entries_unchecked([[q, -1.0], [1.0, 0.0]]),
            (IdealPoint::Infinity, IdealPoint::Infinity) => unreachable!("validated on construction"),
        }
    }

    /// Point at signed arclength `t` from the origin.
    pub fn point_at(&self, t: f64) -> Point {
        self.normalizer().apply_point(Point { x: 0.0, y: t.exp() })
    }

    /// Arclength parameter of a point assumed to lie on the geodesic.
    pub fn parameter_of(&self, p: Point) -> f64 {
        self.normalizer().inverse().apply_point(p).y.ln()
    }

    fn sort_key(&self) -> (f64, f64) {
        let (a, b) = (self.start.sort_key(), self.end.sort_key());
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Distance from an interior point to a geodesic.
pub fn point_geodesic_distance(p: Point, g: &Geodesic) -> f64 {
    let w = g.normalizer().inverse().apply_point(p);
    (w.x.abs() / w.y).asinh()
}

/// An element of PSL(2, R): a determinant-one real matrix up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    m: [[f64; 2]; 2],
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { m: [[1.0, 0.0], [0.0, 1.0]] };

    /// Builds an isometry, rescaling to determinant one.
    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det > 0.0) || !det.is_finite() {
            return Err(domain(format!("matrix determinant {det} is not positive")));
        }
        let k = 1.0 / det.sqrt();
        Ok(Isometry { m: [[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]] }.normalized())
    }

    pub(crate) fn from_entries_unchecked(m: [[f64; 2]; 2]) -> Self {
        Isometry { m }
    }

    /// Translation by `len` along the imaginary axis, towards ∞.
    pub fn translation(len: f64) -> Isometry {
        let h = 0.5 * len;
        Isometry { m: [[h.exp(), 0.0], [0.0, (-h).exp()]] }
    }

    /// Counter-clockwise rotation by `angle` about `i`.
    pub fn rotation(angle: f64) -> Isometry {
        let (s, c) = (0.5 * angle).sin_cos();
        Isometry { m: [[c, s], [-s, c]] }
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.m;
        let w = b * c;
        let e = (-b).mul_add(c, w);
        a.mul_add(d, -w) + e
    }

    /// Departure of the determinant from one, relative to the size of the
    /// products it is computed from. Rounding in a product of unimodular
    /// matrices keeps this near machine precision.
    pub fn det_drift(&self) -> f64 {
        let [[a, b], [c, d]] = self.m;
        (self.det() - 1.0).abs() / (a * d).abs().max((b * c).abs()).max(1.0)
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Isometry {
        let [[a, b], [c, d]] = self.m;
        Isometry { m: [[d, -b], [-c, a]] }
    }

    /// Sign representative with the first nonzero entry (row-major) positive.
    pub fn normalized(self) -> Isometry {
        let first = self.m.iter().flatten().copied().find(|v| *v != 0.0).unwrap_or(1.0);
        if first < 0.0 {
            Isometry { m: self.m.map(|row| row.map(|v| -v)) }
        } else {
            self
        }
    }

    pub fn compose(&self, rhs: &Isometry) -> Isometry {
        let a = &self.m;
        let b = &rhs.m;
        let mut out = Isometry {
            m: [
                [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
            ],
        };
        if out.det_drift() > DET_DRIFT {
            let k = 1.0 / out.det().sqrt();
            out.m = out.m.map(|row| row.map(|v| v * k));
        }
        out
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn max_entry(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// Largest entrywise difference after sign normalization.
    pub fn distance_entrywise(&self, other: &Isometry) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        let mut d = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((a.m[i][j] - b.m[i][j]).abs());
            }
        }
        d
    }

    pub fn apply_point(&self, p: Point) -> Point {
        let [[a, b], [c, d]] = self.m;
        let qx = c * p.x + d;
        let qy = c * p.y;
        let q2 = qx * qx + qy * qy;
        let nx = a * p.x + b;
        Point { x: (nx * qx + a * c * p.y * p.y) / q2, y: self.det() * p.y / q2 }
    }

    pub fn apply_ideal(&self, x: IdealPoint) -> IdealPoint {
        let [[a, b], [c, d]] = self.m;
        match x {
            IdealPoint::Infinity => {
                if c == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(a / c)
                }
            }
            IdealPoint::Finite(x) => {
                let den = c * x + d;
                if den == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((a * x + b) / den)
                }
            }
        }
    }

    pub fn apply_geodesic(&self, g: &Geodesic) -> Geodesic {
        Geodesic { start: self.apply_ideal(g.start), end: self.apply_ideal(g.end) }
    }

    pub fn apply_segment(&self, s: &GeodesicSegment) -> GeodesicSegment {
        let carrier = self.apply_geodesic(&s.carrier);
        let p0 = self.apply_point(s.carrier.point_at(s.t0));
        let p1 = self.apply_point(s.carrier.point_at(s.t1));
        GeodesicSegment { carrier, t0: carrier.parameter_of(p0), t1: carrier.parameter_of(p1) }
    }

    fn classify(&self) -> Result<f64> {
        let tr = if self.det_drift() > DET_DRIFT { self.trace().abs() / self.det().sqrt() } else { self.trace().abs() };
        if tr < 2.0 - PARABOLIC_BAND {
            Err(Error::NotHyperbolic { kind: NonHyperbolicKind::Elliptic, abs_trace: tr })
        } else if tr <= 2.0 + PARABOLIC_BAND {
            Err(Error::NotHyperbolic { kind: NonHyperbolicKind::Parabolic, abs_trace: tr })
        } else {
            Ok(tr)
        }
    }

    pub fn translation_length(&self) -> Result<f64> {
        let tr = self.classify()?;
        Ok(2.0 * stable_acosh(0.5 * tr))
    }

    /// The invariant geodesic of a hyperbolic element, oriented from the
    /// repelling to the attracting fixed point.
    pub fn axis(&self) -> Result<Geodesic> {
        let tr = self.classify()?;
        let s = if self.trace() < 0.0 { -1.0 } else { 1.0 };
        let [[a, b], [c, d]] = self.m.map(|row| row.map(|v| v * s));
        let disc = (tr * tr - 4.0).sqrt();
        // fixed points solve c z^2 + (d - a) z - b = 0
        let (p, q) = if c == 0.0 {
            (IdealPoint::Infinity, IdealPoint::Finite(b / (d - a)))
        } else {
            let e = d - a;
            let qq = -0.5 * (e + e.signum_or_one() * disc);
            if qq == 0.0 {
                let r = (b / c).sqrt();
                (IdealPoint::Finite(r), IdealPoint::Finite(-r))
            } else {
                (IdealPoint::Finite(qq / c), IdealPoint::Finite(-b / qq))
            }
        };
        let attracting = |z: IdealPoint| match z {
            IdealPoint::Infinity => a.abs() > d.abs(),
            IdealPoint::Finite(z) => (c * z + d).abs() > 1.0,
        };
        if attracting(p) {
            Ok(Geodesic { start: q, end: p })
        } else {
            Ok(Geodesic { start: p, end: q })
        }
    }
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

impl Mul for &Isometry {
    type Output = Isometry;
    fn mul(self, rhs: &Isometry) -> Isometry {
        self.compose(rhs)
    }
}

/// A compact piece `[t0, t1]` (or `[t1, t0]`) of a carrier geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub carrier: Geodesic,
    pub t0: f64,
    pub t1: f64,
}

impl GeodesicSegment {
    pub fn new(carrier: Geodesic, t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
            return Err(domain("degenerate segment parameters"));
        }
        Ok(GeodesicSegment { carrier, t0, t1 })
    }

    pub fn from_points(p: Point, q: Point) -> Result<Self> {
        let carrier = geodesic_through(p, q)?;
        GeodesicSegment::new(carrier, carrier.parameter_of(p), carrier.parameter_of(q))
    }

    pub fn endpoints(&self) -> (Point, Point) {
        (self.carrier.point_at(self.t0), self.carrier.point_at(self.t1))
    }

    pub fn length(&self) -> f64 {
        (self.t1 - self.t0).abs()
    }

    pub fn midpoint(&self) -> Point {
        self.carrier.point_at(0.5 * (self.t0 + self.t1))
    }

    fn strictly_inside(&self, t: f64) -> bool {
        let (lo, hi) = if self.t0 < self.t1 { (self.t0, self.t1) } else { (self.t1, self.t0) };
        t > lo + CROSSING_STRICTNESS && t < hi - CROSSING_STRICTNESS
    }
}

/// The oriented geodesic through `p` then `q`.
pub fn geodesic_through(p: Point, q: Point) -> Result<Geodesic> {
    if p == q {
        return Err(domain("points coincide"));
    }
    let dx = q.x - p.x;
    if dx.abs() <= 1e-15 * (1.0 + p.x.abs()) {
        let x = 0.5 * (p.x + q.x);
        return Ok(if q.y > p.y {
            Geodesic { start: IdealPoint::Finite(x), end: IdealPoint::Infinity }
        } else {
            Geodesic { start: IdealPoint::Infinity, end: IdealPoint::Finite(x) }
        });
    }
    // center on the real axis equidistant from p and q
    let cx = ((q.x * q.x + q.y * q.y) - (p.x * p.x + p.y * p.y)) / (2.0 * dx);
    let r = ((p.x - cx).powi(2) + p.y * p.y).sqrt();
    let (lo, hi) = (IdealPoint::Finite(cx - r), IdealPoint::Finite(cx + r));
    Ok(if dx > 0.0 { Geodesic { start: lo, end: hi } } else { Geodesic { start: hi, end: lo } })
}

/// The common perpendicular of two disjoint geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerpResult {
    pub length: f64,
    /// Arclength parameter of the foot on the first geodesic.
    pub foot1: f64,
    /// Arclength parameter of the foot on the second geodesic.
    pub foot2: f64,
    pub point1: Point,
    pub point2: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perpendicular {
    Perp(PerpResult),
    Crossing,
    SharedEndpoint,
}

/// Images of `g`'s endpoints when `base` is mapped onto the imaginary axis.
fn normalized_endpoints(base: &Geodesic, g: &Geodesic) -> (IdealPoint, IdealPoint) {
    let inv = base.normalizer().inverse();
    (inv.apply_ideal(g.start), inv.apply_ideal(g.end))
}

fn near_axis_end(x: IdealPoint) -> bool {
    match x {
        IdealPoint::Infinity => true,
        IdealPoint::Finite(v) => v.abs() <= SHARED_ENDPOINT_TOL || v.abs() >= 1.0 / SHARED_ENDPOINT_TOL,
    }
}

pub fn common_perpendicular(g1: &Geodesic, g2: &Geodesic) -> Perpendicular {
    if g2.sort_key().partial_cmp(&g1.sort_key()) == Some(Ordering::Less) {
        return match perpendicular_ordered(g2, g1) {
            Perpendicular::Perp(p) => Perpendicular::Perp(PerpResult {
                length: p.length,
                foot1: p.foot2,
                foot2: p.foot1,
                point1: p.point2,
                point2: p.point1,
            }),
            other => other,
        };
    }
    perpendicular_ordered(g1, g2)
}

fn perpendicular_ordered(g1: &Geodesic, g2: &Geodesic) -> Perpendicular {
    let (c, d) = normalized_endpoints(g1, g2);
    if near_axis_end(c) || near_axis_end(d) {
        return Perpendicular::SharedEndpoint;
    }
    let (IdealPoint::Finite(c), IdealPoint::Finite(d)) = (c, d) else {
        return Perpendicular::SharedEndpoint;
    };
    if c * d < 0.0 {
        return Perpendicular::Crossing;
    }
    let (u, v) = if c.abs() < d.abs() { (c.abs(), d.abs()) } else { (d.abs(), c.abs()) };
    let length = 2.0 * (u / v).sqrt().atanh();
    if !(length >= SHARED_ENDPOINT_TOL) {
        return Perpendicular::SharedEndpoint;
    }
    let r = (u * v).sqrt();
    let sign = c.signum();
    let cos_t = 2.0 * r / (u + v);
    let sin_t = (v - u) / (u + v);
    let n1 = g1.normalizer();
    let point1 = n1.apply_point(Point { x: 0.0, y: r });
    let point2 = n1.apply_point(Point { x: sign * r * cos_t, y: r * sin_t });
    Perpendicular::Perp(PerpResult {
        length,
        foot1: r.ln(),
        foot2: g2.parameter_of(point2),
        point1,
        point2,
    })
}

/// Transversal intersection of two carriers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierCrossing {
    pub point: Point,
    pub t1: f64,
    pub t2: f64,
    /// Acute angle between the carriers at the crossing.
    pub angle: f64,
}

/// Where two distinct carriers cross, if they do.
pub fn carrier_crossing(g1: &Geodesic, g2: &Geodesic) -> Result<Option<CarrierCrossing>> {
    if g1.same_carrier(g2) {
        return Err(Error::SameCarrier);
    }
    let (c, d) = normalized_endpoints(g1, g2);
    let (IdealPoint::Finite(c), IdealPoint::Finite(d)) = (c, d) else {
        return Ok(None);
    };
    if !(c * d < 0.0) {
        return Ok(None);
    }
    let y = (-c * d).sqrt();
    let center = 0.5 * (c + d);
    let angle = y.atan2(center.abs());
    let point = g1.normalizer().apply_point(Point { x: 0.0, y });
    Ok(Some(CarrierCrossing { point, t1: y.ln(), t2: g2.parameter_of(point), angle }))
}

/// The crossing point of two segments if it is interior to both.
pub fn segment_crossing(s1: &GeodesicSegment, s2: &GeodesicSegment) -> Result<Option<CarrierCrossing>> {
    let Some(x) = carrier_crossing(&s1.carrier, &s2.carrier)? else {
        return Ok(None);
    };
    if !(s1.strictly_inside(x.t1) && s2.strictly_inside(x.t2)) {
        return Ok(None);
    }
    if x.angle < TANGENCY_ANGLE {
        return Err(Error::Precision { angle: x.angle });
    }
    Ok(Some(x))
}

pub fn segments_cross(s1: &GeodesicSegment, s2: &GeodesicSegment) -> Result<bool> {
    Ok(segment_crossing(s1, s2)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_isometry(rng: &mut ChaCha8Rng) -> Isometry {
        loop {
            let m = [[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)], [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]];
            if let Ok(g) = Isometry::new(m) {
                if g.m.iter().flatten().all(|v| v.abs() < 20.0) {
                    return g;
                }
            }
        }
    }

    fn random_point(rng: &mut ChaCha8Rng) -> Point {
        Point { x: rng.gen_range(-3.0..3.0), y: rng.gen_range(0.1..3.0) }
    }

    fn semicircle(c: f64, r: f64) -> Geodesic {
        Geodesic { start: IdealPoint::Finite(c - r), end: IdealPoint::Finite(c + r) }
    }

    #[test]
    fn identity_and_diagonal_action() {
        let p = Point { x: 0.3, y: 1.7 };
        assert_eq!(Isometry::IDENTITY.apply_point(p), p);
        let g = semicircle(0.5, 2.0);
        assert_eq!(Isometry::IDENTITY.apply_geodesic(&g), g);
        let lam: f64 = 3.0;
        let diag = Isometry::new([[lam, 0.0], [0.0, 1.0 / lam]]).unwrap();
        assert_eq!(diag.apply_ideal(IdealPoint::Finite(0.0)), IdealPoint::Finite(0.0));
        assert_eq!(diag.apply_ideal(IdealPoint::Infinity), IdealPoint::Infinity);
        assert!((diag.translation_length().unwrap() - 2.0 * lam.ln()).abs() < 1e-14);
        let ax = diag.axis().unwrap();
        assert_eq!(ax, Geodesic { start: IdealPoint::Finite(0.0), end: IdealPoint::Infinity });
    }

    #[test]
    fn isometries_preserve_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_point(&mut rng);
        let q = random_point(&mut rng);
        let d = point_distance(p, q);
        for _ in 0..100 {
            let g = random_isometry(&mut rng);
            let d2 = point_distance(g.apply_point(p), g.apply_point(q));
            assert!((d - d2).abs() < 1e-12 * d.max(1.0), "{d} vs {d2}");
        }
    }

    #[test]
    fn trace_formula_and_classification() {
        let m = Isometry::new([[2.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!((m.translation_length().unwrap() - 1.924_847_300_238_413_8).abs() < 1e-14);
        let rot = Isometry::rotation(0.7);
        assert!(matches!(
            rot.translation_length(),
            Err(Error::NotHyperbolic { kind: NonHyperbolicKind::Elliptic, .. })
        ));
        let para = Isometry::new([[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(para.axis(), Err(Error::NotHyperbolic { kind: NonHyperbolicKind::Parabolic, .. })));
    }

    #[test]
    fn conjugation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = Isometry::new([[3.0, 1.0], [2.0, 1.0]]).unwrap();
        let len = m.translation_length().unwrap();
        let ax = m.axis().unwrap();
        for _ in 0..100 {
            let g = random_isometry(&mut rng);
            let c = g * m * g.inverse();
            assert!((c.translation_length().unwrap() - len).abs() < 1e-12 * len.max(1.0));
            let cax = c.axis().unwrap();
            let gax = g.apply_geodesic(&ax);
            assert!(cax.same_carrier(&gax) || geodesics_close(&cax, &gax, 1e-8));
            // orientation follows the conjugate as well
            let p = cax.point_at(0.0);
            let moved = c.apply_point(p);
            assert!(cax.parameter_of(moved) > 0.0);
        }
    }

    fn geodesics_close(a: &Geodesic, b: &Geodesic, tol: f64) -> bool {
        a.start.close_to(b.start, tol) && a.end.close_to(b.end, tol)
    }

    #[test]
    fn axis_fixed_points_solve_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        while checked < 100 {
            let g = random_isometry(&mut rng);
            if g.trace().abs() < 2.1 {
                continue;
            }
            checked += 1;
            let ax = g.axis().unwrap();
            let [[a, b], [c, d]] = g.m;
            for z in [ax.start, ax.end] {
                if let IdealPoint::Finite(z) = z {
                    // independent check: bisection on the quadratic near z
                    let f = |x: f64| c * x * x + (d - a) * x - b;
                    let scale = 1.0 + z.abs();
                    let (mut lo, mut hi) = (z - 1e-6 * scale, z + 1e-6 * scale);
                    assert!(f(lo).signum() != f(hi).signum(), "no sign change at {z}");
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if f(mid).signum() == f(lo).signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    assert!((0.5 * (lo + hi) - z).abs() < 1e-10 * scale);
                }
            }
            let moved = g.apply_geodesic(&ax);
            assert!(geodesics_close(&moved, &ax, 1e-10));
        }
    }

    #[test]
    fn concentric_perpendicular() {
        for &r in &[1.5f64, 2.0, 7.0, 100.0] {
            let Perpendicular::Perp(p) = common_perpendicular(&semicircle(0.0, 1.0), &semicircle(0.0, r)) else {
                panic!("expected perpendicular");
            };
            assert!((p.length - r.ln()).abs() < 1e-12);
            assert!(p.point1.x.abs() < 1e-12 && (p.point1.y - 1.0).abs() < 1e-12);
            assert!(p.point2.x.abs() < 1e-12 && (p.point2.y - r).abs() < 1e-10 * r);
        }
    }

    #[test]
    fn crossing_and_shared_endpoints() {
        let vertical = Geodesic { start: IdealPoint::Finite(0.0), end: IdealPoint::Infinity };
        assert_eq!(common_perpendicular(&semicircle(0.0, 1.0), &vertical), Perpendicular::Crossing);
        assert_eq!(common_perpendicular(&semicircle(1.0, 1.0), &vertical), Perpendicular::SharedEndpoint);
        assert_eq!(common_perpendicular(&semicircle(1.0, 1.0), &semicircle(3.0, 1.0)), Perpendicular::SharedEndpoint);
    }

    #[test]
    fn perpendicular_is_symmetric_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let a = semicircle(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..1.0));
            let b = semicircle(rng.gen_range(3.0..6.0), rng.gen_range(0.1..1.0));
            let (Perpendicular::Perp(p), Perpendicular::Perp(q)) = (common_perpendicular(&a, &b), common_perpendicular(&b, &a)) else {
                panic!("disjoint semicircles");
            };
            assert_eq!(p.length.to_bits(), q.length.to_bits());
            assert_eq!(p.foot1.to_bits(), q.foot2.to_bits());
            assert_eq!(p.foot2.to_bits(), q.foot1.to_bits());
            // the connecting geodesic meets both carriers at right angles
            let conn = geodesic_through(p.point1, p.point2).unwrap();
            for g in [&a, &b] {
                let x = carrier_crossing(&conn, g).unwrap().unwrap();
                assert!((x.angle - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn deck_invariance_of_perpendicular() {
        let m = Isometry::new([[2.0, 0.0], [0.0, 0.5]]).unwrap();
        let ax = m.axis().unwrap();
        let g = semicircle(2.0, 0.5);
        let len = |h: &Geodesic| match common_perpendicular(&ax, h) {
            Perpendicular::Perp(p) => p.length,
            other => panic!("{other:?}"),
        };
        assert!((len(&g) - len(&m.apply_geodesic(&g))).abs() < 1e-10);
    }

    #[test]
    fn distance_properties() {
        let d = point_distance(Point::I, Point { x: 0.0, y: 5.0 });
        assert!((d - 5f64.ln()).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..1000 {
            let (p, q, r) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
            assert_eq!(point_distance(p, q), point_distance(q, p));
            assert!(point_distance(p, r) <= point_distance(p, q) + point_distance(q, r) + 1e-12);
        }
        assert_eq!(point_distance(Point::I, Point::I), 0.0);
        assert!(try_point_distance(Point { x: 0.0, y: -1.0 }, Point::I).is_err());
    }

    #[test]
    fn segment_crossing_cases() {
        let vertical = Geodesic { start: IdealPoint::Finite(0.0), end: IdealPoint::Infinity };
        let circle = semicircle(0.0, 1.0);
        let s1 = GeodesicSegment::new(vertical, -0.5, 0.5).unwrap();
        let s2 = GeodesicSegment::new(circle, -0.5, 0.5).unwrap();
        assert!(segments_cross(&s1, &s2).unwrap());
        let far = GeodesicSegment::new(semicircle(5.0, 1.0), -3.0, 3.0).unwrap();
        assert!(!segments_cross(&s1, &far).unwrap());
        let short = GeodesicSegment::new(circle, 0.2, 0.9).unwrap();
        assert!(!segments_cross(&s1, &short).unwrap());
        assert!(matches!(segments_cross(&s1, &GeodesicSegment::new(vertical, 1.0, 2.0).unwrap()), Err(Error::SameCarrier)));
    }

    #[test]
    fn segment_crossing_matches_sampling() {
        // dense sampling of s2: a sign change of the signed distance to the
        // carrier of s1 inside s1's span marks a crossing
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let vertical = Geodesic { start: IdealPoint::Finite(0.0), end: IdealPoint::Infinity };
        for _ in 0..300 {
            let s1 = GeodesicSegment::new(vertical, rng.gen_range(-2.0..0.0), rng.gen_range(0.01..2.0)).unwrap();
            let g = semicircle(rng.gen_range(-1.5..1.5), rng.gen_range(0.3..2.0));
            let s2 = GeodesicSegment::new(g, rng.gen_range(-2.0..0.0), rng.gen_range(0.01..2.0)).unwrap();
            let fast = segments_cross(&s1, &s2).unwrap();
            let n = 20000;
            let mut sampled = false;
            let mut prev = s2.carrier.point_at(s2.t0);
            for k in 1..=n {
                let t = s2.t0 + (s2.t1 - s2.t0) * k as f64 / n as f64;
                let p = s2.carrier.point_at(t);
                if prev.x.signum() != p.x.signum() {
                    let y = 0.5 * (p.y + prev.y);
                    let t1 = y.ln();
                    sampled |= t1 > s1.t0.min(s1.t1) && t1 < s1.t0.max(s1.t1);
                }
                prev = p;
            }
            assert_eq!(fast, sampled);
        }
    }

    #[test]
    fn parametrization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for g in [
            semicircle(0.3, 2.0),
            semicircle(0.3, 2.0).reversed(),
            Geodesic { start: IdealPoint::Finite(1.0), end: IdealPoint::Infinity },
            Geodesic { start: IdealPoint::Infinity, end: IdealPoint::Finite(-1.0) },
        ] {
            for _ in 0..20 {
                let t = rng.gen_range(-4.0..4.0);
                let p = g.point_at(t);
                assert!((g.parameter_of(p) - t).abs() < 1e-12);
                assert!(point_geodesic_distance(p, &g) < 1e-12);
            }
            let d = point_distance(g.point_at(0.25), g.point_at(1.75));
            assert!((d - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_normalization() {
        let a = Isometry::new([[-1.0, 2.0], [0.0, -1.0]]).unwrap();
        assert!(a.m[0][0] > 0.0);
        let b = Isometry::new([[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(b.m[0][1], 1.0);
        assert_eq!(a.distance_entrywise(&Isometry { m: a.m.map(|r| r.map(|v| -v)) }), 0.0);
    }
}
