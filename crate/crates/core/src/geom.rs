//! Tolerance-based geometric primitives: points, lines (as oriented
//! half-planes), convex polygons and the predicates the rest of the crate is
//! built on.
//!
//! Predicates map near-zero values to an exact zero so that "on the line"
//! versus "strictly off the line" decisions are stable on hand-authored
//! coordinates. The zero band is relative to the scale of the inputs.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative tolerance for sign predicates.
pub const REL_TOL: f64 = 1e-9;

/// A point of the plane, identified with the complex number `x + iy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn sub(&self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(&self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(&self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(&self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: Point) -> f64 {
        self.sub(other).norm()
    }

    /// Rotate by 90 degrees counter-clockwise.
    pub fn perp(&self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalize(&self) -> Result<Point> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::Degenerate("zero-length vector".into()));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn approx_eq(&self, other: Point, tol: f64) -> bool {
        self.dist(other) <= tol
    }

    /// Midpoint of `self` and `other`.
    pub fn mid(&self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

/// Tolerance used for "is this the same point" questions, relative to the
/// magnitude of the coordinates involved.
pub fn point_tol(scale: f64) -> f64 {
    REL_TOL * scale.max(1.0)
}

/// Orientation of the triple `(p, q, r)`: sign of the cross product
/// `(q-p) x (r-p)`, with a symmetric tolerance band mapping to 0.
pub fn orient(p: Point, q: Point, r: Point) -> Result<i8> {
    if !p.is_finite() || !q.is_finite() || !r.is_finite() {
        return Err(Error::NonFinite);
    }
    let a = q.sub(p);
    let b = r.sub(p);
    let v = a.cross(b);
    let scale = (a.norm() * b.norm()).max(1.0);
    Ok(if v.abs() <= REL_TOL * scale {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    })
}

/// An oriented line `{x : (x - u) . v = 0}` with unit normal `v`; also the
/// closed half-plane `H = {x : (x - u) . v >= 0}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Line {
    pub u: Point,
    pub v: Point,
}

impl Line {
    pub fn new(u: Point, v: Point) -> Result<Self> {
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite);
        }
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("line normal is not unit".into()));
        }
        Ok(Line { u, v })
    }

    /// Line through `a` and `b`, normal pointing to the left of `a -> b`.
    pub fn through(a: Point, b: Point) -> Result<Self> {
        let dir = b.sub(a).normalize()?;
        Ok(Line { u: a, v: dir.perp() })
    }

    /// Line through `p` with the given (not necessarily unit) normal.
    pub fn with_normal(p: Point, normal: Point) -> Result<Self> {
        Ok(Line { u: p, v: normal.normalize()? })
    }

    pub fn signed_dist(&self, p: Point) -> f64 {
        p.sub(self.u).dot(self.v)
    }

    /// Side of the line `p` falls on: sign of `(p - u) . v` with a zero band.
    pub fn side(&self, p: Point) -> i8 {
        let d = self.signed_dist(p);
        let scale = p.sub(self.u).norm().max(1.0);
        if d.abs() <= REL_TOL * scale {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        }
    }

    /// The same line with the half-plane on the other side.
    pub fn flipped(&self) -> Line {
        Line { u: self.u, v: self.v.scale(-1.0) }
    }

    /// The line translated by `delta` along its normal.
    pub fn translated(&self, delta: f64) -> Line {
        Line { u: self.u.add(self.v.scale(delta)), v: self.v }
    }

    /// The line rotated by `angle` radians about `pivot`.
    pub fn rotated_about(&self, pivot: Point, angle: f64) -> Line {
        let (s, c) = angle.sin_cos();
        let rot = |p: Point| {
            let d = p.sub(pivot);
            pivot.add(Point::new(c * d.x - s * d.y, s * d.x + c * d.y))
        };
        let u = rot(self.u);
        let v = Point::new(c * self.v.x - s * self.v.y, s * self.v.x + c * self.v.y);
        Line { u, v }
    }
}

/// Convenience alias: side of `l` the point `p` is on.
pub fn side(l: &Line, p: Point) -> i8 {
    l.side(p)
}

/// A convex polygon stored as a CCW cycle of vertices, canonicalized to start
/// at the lexicographically smallest vertex. Collinear (straight-angle)
/// vertices are permitted; consecutive duplicates are not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon("fewer than 3 vertices".into()));
        }
        for p in &vertices {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        // Drop repeated adjacent vertices (cyclically).
        let scale = vertices.iter().map(|p| p.norm()).fold(1.0, f64::max);
        let tol = point_tol(scale);
        let mut dedup: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices.drain(..) {
            if dedup.last().map_or(true, |q| !q.approx_eq(p, tol)) {
                dedup.push(p);
            }
        }
        while dedup.len() > 1 && dedup[0].approx_eq(*dedup.last().unwrap(), tol) {
            dedup.pop();
        }
        if dedup.len() < 3 {
            return Err(Error::InvalidPolygon("degenerate after dedup".into()));
        }
        if signed_area(&dedup) < 0.0 {
            dedup.reverse();
        }
        let n = dedup.len();
        for i in 0..n {
            let p = dedup[i];
            let q = dedup[(i + 1) % n];
            let r = dedup[(i + 2) % n];
            if orient(p, q, r)? < 0 {
                return Err(Error::InvalidPolygon(format!(
                    "reflex corner at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        if signed_area(&dedup).abs() <= tol * tol {
            return Err(Error::InvalidPolygon("zero area".into()));
        }
        let mut poly = ConvexPolygon { vertices: dedup };
        poly.canonicalize();
        Ok(poly)
    }

    fn canonicalize(&mut self) {
        let mut best = 0;
        for i in 1..self.vertices.len() {
            let (a, b) = (self.vertices[i], self.vertices[best]);
            if (a.x, a.y) < (b.x, b.y) {
                best = i;
            }
        }
        self.vertices.rotate_left(best);
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as f64;
        let mut c = Point::new(0.0, 0.0);
        for p in &self.vertices {
            c = c.add(*p);
        }
        c.scale(1.0 / n)
    }

    pub fn scale_hint(&self) -> f64 {
        self.vertices.iter().map(|p| p.norm()).fold(1.0, f64::max)
    }

    /// Edges as CCW (start, end) pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Signed distance from `p` to the boundary: positive inside.
    pub fn inner_dist(&self, p: Point) -> f64 {
        let mut d = f64::INFINITY;
        for (a, b) in self.edges() {
            let inward = b.sub(a).perp();
            if let Ok(n) = inward.normalize() {
                d = d.min(p.sub(a).dot(n));
            }
        }
        d
    }

    pub fn contains(&self, p: Point) -> bool {
        self.inner_dist(p) >= -point_tol(self.scale_hint().max(p.norm()))
    }

    pub fn strictly_contains(&self, p: Point) -> bool {
        self.inner_dist(p) > point_tol(self.scale_hint().max(p.norm()))
    }

    pub fn is_vertex(&self, p: Point) -> bool {
        let tol = point_tol(self.scale_hint().max(p.norm()));
        self.vertices.iter().any(|v| v.approx_eq(p, tol))
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        let tol = point_tol(self.scale_hint().max(p.norm()));
        self.inner_dist(p).abs() <= tol && self.contains(p)
    }

    /// Insert `p` as an explicit (possibly collinear) vertex if it lies on the
    /// boundary and is not already a vertex.
    pub fn with_vertex(&self, p: Point) -> Result<ConvexPolygon> {
        if self.is_vertex(p) {
            return Ok(self.clone());
        }
        let tol = point_tol(self.scale_hint().max(p.norm()));
        let n = self.vertices.len();
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            if dist_to_segment(p, a, b) <= tol {
                let mut vs = self.vertices.clone();
                vs.insert(i + 1, p);
                let mut poly = ConvexPolygon { vertices: vs };
                poly.canonicalize();
                return Ok(poly);
            }
        }
        Err(Error::InvalidPolygon("point not on polygon boundary".into()))
    }

    /// Half-planes whose intersection is the polygon (normals pointing in).
    pub fn halfplanes(&self) -> Vec<Line> {
        self.edges()
            .filter_map(|(a, b)| Line::with_normal(a, b.sub(a).perp()).ok())
            .collect()
    }

    /// Polygon shrunk by clipping with every side moved inward by `delta`.
    pub fn inner_offset(&self, delta: f64) -> Option<ConvexPolygon> {
        let mut current = self.clone();
        for h in self.halfplanes() {
            match clip_halfplane(&current, &h.translated(delta)) {
                Ok(Some(p)) => current = p,
                _ => return None,
            }
        }
        Some(current)
    }
}

pub fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut a = 0.0;
    for i in 0..n {
        a += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * a
}

pub fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 <= 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

/// Clip a convex polygon against the closed half-plane of `h`.
///
/// Returns `Ok(None)` when the intersection is empty, and an error when the
/// intersection is degenerate (a point or segment of zero area).
pub fn clip_halfplane(p: &ConvexPolygon, h: &Line) -> Result<Option<ConvexPolygon>> {
    let verts = p.vertices();
    let n = verts.len();
    let scale = p.scale_hint();
    let tol = point_tol(scale);
    let mut out: Vec<Point> = Vec::with_capacity(n + 2);
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let da = h.signed_dist(a);
        let db = h.signed_dist(b);
        let a_in = da >= -tol;
        let b_in = db >= -tol;
        if a_in {
            out.push(a);
        }
        if a_in != b_in {
            // Edge crosses the cut line.
            let t = da / (da - db);
            out.push(a.add(b.sub(a).scale(t)));
        }
    }
    if out.len() < 3 {
        return Ok(None);
    }
    match ConvexPolygon::new(out) {
        Ok(poly) => Ok(Some(poly)),
        Err(Error::InvalidPolygon(m)) if m.contains("zero area") || m.contains("degenerate") => {
            Err(Error::Degenerate(format!("clip produced a flat polygon: {m}")))
        }
        Err(e) => Err(e),
    }
}

/// Classification of the intersection of two convex polygons.
#[derive(Debug, Clone, PartialEq)]
pub enum PairContact {
    Disjoint,
    /// A single common point.
    Vertex(Point),
    /// A common segment.
    Side(Point, Point),
    /// Two-dimensional overlap.
    Overlap(f64),
}

/// Classify how two convex polygons meet, by clipping one against the other.
pub fn classify_pair(p: &ConvexPolygon, q: &ConvexPolygon) -> PairContact {
    let scale = p.scale_hint().max(q.scale_hint());
    let tol = point_tol(scale);
    let mut cur = p.vertices().to_vec();
    for h in q.halfplanes() {
        let mut next: Vec<Point> = Vec::new();
        let n = cur.len();
        for i in 0..n {
            let a = cur[i];
            let b = cur[(i + 1) % n];
            let da = h.signed_dist(a);
            let db = h.signed_dist(b);
            if da >= -tol {
                next.push(a);
            }
            if (da >= -tol) != (db >= -tol) {
                let t = da / (da - db);
                next.push(a.add(b.sub(a).scale(t)));
            }
        }
        cur = next;
        if cur.is_empty() {
            return PairContact::Disjoint;
        }
    }
    // Collapse near-duplicate vertices of the intersection.
    let mut pts: Vec<Point> = Vec::new();
    for c in cur {
        if !pts.iter().any(|p| p.approx_eq(c, tol * 10.0)) {
            pts.push(c);
        }
    }
    match pts.len() {
        0 => PairContact::Disjoint,
        1 => PairContact::Vertex(pts[0]),
        2 => PairContact::Side(pts[0], pts[1]),
        _ => {
            let area = signed_area(&pts).abs();
            if area <= tol * scale {
                // Numerically flat: farthest pair spans the contact segment.
                let mut best = (pts[0], pts[1], 0.0);
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        let d = pts[i].dist(pts[j]);
                        if d > best.2 {
                            best = (pts[i], pts[j], d);
                        }
                    }
                }
                PairContact::Side(best.0, best.1)
            } else {
                PairContact::Overlap(area)
            }
        }
    }
}

/// An invertible affine map `x -> A x + b` of the plane.
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    /// Row-major 2x2 matrix.
    pub a: [f64; 4],
    pub b: Point,
}

impl Affine {
    pub fn identity() -> Self {
        Affine { a: [1.0, 0.0, 0.0, 1.0], b: Point::new(0.0, 0.0) }
    }

    pub fn new(a: [f64; 4], b: Point) -> Result<Self> {
        let det = a[0] * a[3] - a[1] * a[2];
        if !det.is_finite() || det.abs() < 1e-12 {
            return Err(Error::Degenerate("affine map is not invertible".into()));
        }
        Ok(Affine { a, b })
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.a[0] * p.x + self.a[1] * p.y + self.b.x,
            self.a[2] * p.x + self.a[3] * p.y + self.b.y,
        )
    }

    pub fn inverse(&self) -> Affine {
        let det = self.a[0] * self.a[3] - self.a[1] * self.a[2];
        let inv = [self.a[3] / det, -self.a[1] / det, -self.a[2] / det, self.a[0] / det];
        let bi = Point::new(
            -(inv[0] * self.b.x + inv[1] * self.b.y),
            -(inv[2] * self.b.x + inv[3] * self.b.y),
        );
        Affine { a: inv, b: bi }
    }

    /// Similarity taking segment `(p, q)` onto segment `(0,0)-(1,0)`.
    pub fn chord_to_unit(p: Point, q: Point) -> Result<Affine> {
        let d = q.sub(p);
        let len2 = d.dot(d);
        if len2 <= 0.0 {
            return Err(Error::Degenerate("coincident chord endpoints".into()));
        }
        // Rotation+scaling sending d to (1, 0).
        let a = [d.x / len2, d.y / len2, -d.y / len2, d.x / len2];
        let m = Affine { a, b: Point::new(0.0, 0.0) };
        let b = m.apply(p).scale(-1.0);
        Ok(Affine { a, b })
    }
}
