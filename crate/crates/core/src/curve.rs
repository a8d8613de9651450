//! Sampled parameterized plane curves: convexity, projectability, splitting
//! and the parameterized variation pvar.

use crate::error::{Error, Result};
use crate::func::PlaneFunction;
use crate::geom::{point_tol, Affine, Point};

/// Analytic shape of a curve. Analytic kinds carry a closed-form point map
/// for resampling at arbitrary density; polyline samples are fixed-resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// Straight segment from `a` to `b`, parameter in [0,1].
    Segment { a: Point, b: Point },
    /// Circular arc `center + r(cos θ, sin θ)`, θ from `theta0` to `theta1`
    /// (either direction, |sweep| < 2π).
    CircularArc { center: Point, radius: f64, theta0: f64, theta1: f64 },
    /// Quadratic Bézier with control points `p0, p1, p2`, parameter in [0,1].
    ParabolicArc { p0: Point, p1: Point, p2: Point },
    /// Piecewise-linear interpolation of the sample points.
    PolylineSample,
}

/// A curve with a strictly increasing parameter grid and its sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    kind: CurveKind,
    ts: Vec<f64>,
    pts: Vec<Point>,
}

impl Curve {
    fn validate(kind: CurveKind, ts: Vec<f64>, pts: Vec<Point>) -> Result<Self> {
        if ts.len() != pts.len() || ts.len() < 2 {
            return Err(Error::InvalidCurve("need at least 2 samples".into()));
        }
        for w in ts.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidCurve("parameter grid not strictly increasing".into()));
            }
        }
        let scale = pts.iter().map(|p| p.norm()).fold(1.0, f64::max);
        let tol = point_tol(scale);
        for p in &pts {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        for w in pts.windows(2) {
            if w[0].approx_eq(w[1], tol) {
                return Err(Error::InvalidCurve("consecutive sample points coincide".into()));
            }
        }
        if pts[0].approx_eq(pts[pts.len() - 1], tol) {
            return Err(Error::InvalidCurve("endpoints must be distinct".into()));
        }
        Ok(Curve { kind, ts, pts })
    }

    /// Evaluate the analytic point map of `kind` at parameter `t`.
    fn gamma_of(kind: &CurveKind, ts: &[f64], pts: &[Point], t: f64) -> Point {
        match kind {
            CurveKind::Segment { a, b } => a.add(b.sub(*a).scale(t)),
            CurveKind::CircularArc { center, radius, theta0, theta1 } => {
                let th = theta0 + (theta1 - theta0) * t;
                Point::new(center.x + radius * th.cos(), center.y + radius * th.sin())
            }
            CurveKind::ParabolicArc { p0, p1, p2 } => {
                let u = 1.0 - t;
                p0.scale(u * u).add(p1.scale(2.0 * u * t)).add(p2.scale(t * t))
            }
            CurveKind::PolylineSample => {
                // piecewise-linear interpolation over the stored grid
                let t = t.clamp(ts[0], ts[ts.len() - 1]);
                let i = match ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(i) => return pts[i],
                    Err(i) => i.clamp(1, ts.len() - 1),
                };
                let (t0, t1) = (ts[i - 1], ts[i]);
                let s = (t - t0) / (t1 - t0);
                pts[i - 1].add(pts[i].sub(pts[i - 1]).scale(s))
            }
        }
    }

    pub fn point_at(&self, t: f64) -> Point {
        Self::gamma_of(&self.kind, &self.ts, &self.pts, t)
    }

    fn from_kind(kind: CurveKind, t0: f64, t1: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCurve("sample count must be >= 2".into()));
        }
        let ts: Vec<f64> =
            (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
        let pts: Vec<Point> =
            ts.iter().map(|&t| Self::gamma_of(&kind, &[], &[], t)).collect();
        Self::validate(kind, ts, pts)
    }

    pub fn segment(a: Point, b: Point, n: usize) -> Result<Self> {
        Self::from_kind(CurveKind::Segment { a, b }, 0.0, 1.0, n)
    }

    pub fn circular_arc(
        center: Point,
        radius: f64,
        theta0: f64,
        theta1: f64,
        n: usize,
    ) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidCurve("radius must be positive".into()));
        }
        if (theta1 - theta0).abs() >= 2.0 * std::f64::consts::PI {
            return Err(Error::InvalidCurve("arc sweep must be < 2π (distinct endpoints)".into()));
        }
        Self::from_kind(CurveKind::CircularArc { center, radius, theta0, theta1 }, 0.0, 1.0, n)
    }

    pub fn parabolic_arc(p0: Point, p1: Point, p2: Point, n: usize) -> Result<Self> {
        Self::from_kind(CurveKind::ParabolicArc { p0, p1, p2 }, 0.0, 1.0, n)
    }

    pub fn polyline(pts: Vec<Point>) -> Result<Self> {
        // chord-length parameter grid
        let mut ts = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                acc += p.dist(pts[i - 1]);
            }
            ts.push(acc);
        }
        Self::validate(CurveKind::PolylineSample, ts, pts)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn samples(&self) -> &[Point] {
        &self.pts
    }

    pub fn params(&self) -> &[f64] {
        &self.ts
    }

    pub fn start(&self) -> Point {
        self.pts[0]
    }

    pub fn end(&self) -> Point {
        self.pts[self.pts.len() - 1]
    }

    pub fn endpoints(&self) -> (Point, Point) {
        (self.start(), self.end())
    }

    /// Chord from start to end.
    pub fn chord(&self) -> Point {
        self.end().sub(self.start())
    }

    fn scale_hint(&self) -> f64 {
        self.pts.iter().map(|p| p.norm()).fold(1.0, f64::max)
    }

    /// Resample to `n` points, preserving the parameter interval. Analytic
    /// kinds re-evaluate the closed form; polylines interpolate linearly.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCurve("sample count must be >= 2".into()));
        }
        let (t0, t1) = (self.ts[0], self.ts[self.ts.len() - 1]);
        let ts: Vec<f64> =
            (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
        let pts: Vec<Point> = ts.iter().map(|&t| self.point_at(t)).collect();
        Self::validate(self.kind.clone(), ts, pts)
    }

    /// The same point set traversed in the opposite direction.
    pub fn reversed(&self) -> Curve {
        let pts: Vec<Point> = self.pts.iter().rev().copied().collect();
        let last = self.ts[self.ts.len() - 1];
        let ts: Vec<f64> = self.ts.iter().rev().map(|&t| last - t).collect();
        let kind = match &self.kind {
            CurveKind::Segment { a, b } => CurveKind::Segment { a: *b, b: *a },
            CurveKind::CircularArc { center, radius, theta0, theta1 } => CurveKind::CircularArc {
                center: *center,
                radius: *radius,
                theta0: *theta1,
                theta1: *theta0,
            },
            CurveKind::ParabolicArc { p0, p1, p2 } => {
                CurveKind::ParabolicArc { p0: *p2, p1: *p1, p2: *p0 }
            }
            CurveKind::PolylineSample => CurveKind::PolylineSample,
        };
        // reversal preserves validity
        Curve { kind, ts, pts }
    }

    /// Cumulative arc length (chordal) at each sample; last entry is the total.
    pub fn arc_lengths(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pts.len());
        let mut acc = 0.0;
        for (i, p) in self.pts.iter().enumerate() {
            if i > 0 {
                acc += p.dist(self.pts[i - 1]);
            }
            out.push(acc);
        }
        out
    }

    /// Point at the given arc-length fraction in [0,1] of the sampled polyline.
    pub fn point_at_arc_fraction(&self, frac: f64) -> Point {
        let lens = self.arc_lengths();
        let total = lens[lens.len() - 1];
        let target = frac.clamp(0.0, 1.0) * total;
        for i in 1..lens.len() {
            if target <= lens[i] || i == lens.len() - 1 {
                let seg = lens[i] - lens[i - 1];
                let s = if seg > 0.0 { (target - lens[i - 1]) / seg } else { 0.0 };
                return self.pts[i - 1].add(self.pts[i].sub(self.pts[i - 1]).scale(s.clamp(0.0, 1.0)));
            }
        }
        self.end()
    }

    /// Grid parameter at the given arc-length fraction (linear within a cell).
    pub fn param_at_arc_fraction(&self, frac: f64) -> f64 {
        let lens = self.arc_lengths();
        let total = lens[lens.len() - 1];
        let target = frac.clamp(0.0, 1.0) * total;
        for i in 1..lens.len() {
            if target <= lens[i] || i == lens.len() - 1 {
                let seg = lens[i] - lens[i - 1];
                let s = if seg > 0.0 { (target - lens[i - 1]) / seg } else { 0.0 };
                return self.ts[i - 1] + (self.ts[i] - self.ts[i - 1]) * s.clamp(0.0, 1.0);
            }
        }
        self.ts[self.ts.len() - 1]
    }

    /// Apply an affine map. Segments stay segments; other kinds become
    /// polyline samples of the mapped points (a circle's affine image is not
    /// a circle).
    pub fn transform(&self, a: &Affine) -> Result<Curve> {
        let pts: Vec<Point> = self.pts.iter().map(|p| a.apply(*p)).collect();
        match &self.kind {
            CurveKind::Segment { a: s, b: e } => {
                let kind = CurveKind::Segment { a: a.apply(*s), b: a.apply(*e) };
                Curve::validate(kind, self.ts.clone(), pts)
            }
            CurveKind::ParabolicArc { p0, p1, p2 } => {
                // affine images of Bézier control points give the image curve
                let kind = CurveKind::ParabolicArc {
                    p0: a.apply(*p0),
                    p1: a.apply(*p1),
                    p2: a.apply(*p2),
                };
                Curve::validate(kind, self.ts.clone(), pts)
            }
            _ => Curve::validate(CurveKind::PolylineSample, self.ts.clone(), pts),
        }
    }

    /// Split at sample index `i` (strictly interior), sharing the sample point.
    pub fn split_at_index(&self, i: usize) -> Result<(Curve, Curve)> {
        if i == 0 || i + 1 >= self.pts.len() {
            return Err(Error::InvalidParameter("split index must be strictly interior".into()));
        }
        let left = Curve::validate(
            self.kind.piece(),
            self.ts[..=i].to_vec(),
            self.pts[..=i].to_vec(),
        )?;
        let right = Curve::validate(
            self.kind.piece(),
            self.ts[i..].to_vec(),
            self.pts[i..].to_vec(),
        )?;
        Ok((left, right))
    }
}

impl CurveKind {
    /// Kind carried by a sub-curve: analytic kinds keep their closed form
    /// (the parameter grid records the sub-interval); polylines stay polylines.
    fn piece(&self) -> CurveKind {
        self.clone()
    }
}

/// True iff all nonzero cross products of consecutive sampled edge vectors
/// share one sign. Fewer than 3 samples: a segment, convex.
pub fn is_convex(c: &Curve) -> bool {
    let pts = c.samples();
    if pts.len() < 3 {
        return true;
    }
    let mut sign = 0i8;
    for w in pts.windows(3) {
        let s = match crate::geom::orient(w[0], w[1], w[2]) {
            Ok(s) => s,
            Err(_) => return false,
        };
        if s != 0 {
            if sign == 0 {
                sign = s;
            } else if s != sign {
                return false;
            }
        }
    }
    true
}

/// Projection parameters of the samples onto the endpoint chord.
fn chord_params(c: &Curve) -> Vec<f64> {
    let a = c.start();
    let d = c.chord();
    c.samples().iter().map(|p| p.sub(a).dot(d) / d.norm()).collect()
}

/// True iff the samples project monotonically onto the endpoint chord:
/// repeats within tolerance are allowed, reversals are not.
pub fn is_projectable(c: &Curve) -> Result<bool> {
    if !is_convex(c) {
        return Err(Error::NotConvex);
    }
    let u = chord_params(c);
    let tol = 1e-9 * c.chord().norm();
    Ok(u.windows(2).all(|w| w[1] >= w[0] - tol))
}

/// Split a convex curve at the sample indices where the finite-difference
/// tangent turns against the current endpoint chord, recursing until every
/// piece is projectable. Each output piece is verified with
/// [`is_projectable`] rather than assumed.
pub fn split_projectable(c: &Curve) -> Result<Vec<Curve>> {
    if !is_convex(c) {
        return Err(Error::NotConvex);
    }
    fn rec(c: &Curve, out: &mut Vec<Curve>, depth: usize) -> Result<()> {
        if depth > 64 {
            return Err(Error::Degenerate("projectable splitting did not terminate".into()));
        }
        if is_projectable(c)? {
            out.push(c.clone());
            return Ok(());
        }
        let pts = c.samples();
        let d = c.chord();
        // signs of tangent · chord at interior samples (central differences);
        // cut at every sign change in one pass
        let mut cuts: Vec<usize> = Vec::new();
        let mut prev_sign = 0i8;
        for i in 1..pts.len() - 1 {
            let tan = pts[i + 1].sub(pts[i - 1]);
            let dp = tan.dot(d);
            let s = if dp > 0.0 {
                1
            } else if dp < 0.0 {
                -1
            } else {
                0
            };
            if s != 0 {
                if prev_sign != 0 && s != prev_sign {
                    cuts.push(i);
                }
                prev_sign = s;
            }
        }
        // fall back to the middle when no sign change is visible (can happen
        // when the reversal sits at the very first interior sample)
        if cuts.is_empty() {
            cuts.push((pts.len() / 2).clamp(1, pts.len() - 2));
        }
        let mut remainder = c.clone();
        let mut consumed = 0usize;
        for cut in cuts {
            let local = cut - consumed;
            if local == 0 || local + 1 >= remainder.samples().len() {
                continue;
            }
            let (l, r) = remainder.split_at_index(local)?;
            rec(&l, out, depth + 1)?;
            remainder = r;
            consumed = cut;
        }
        rec(&remainder, out, depth + 1)
    }
    let mut out = Vec::new();
    rec(c, &mut out, 0)?;
    Ok(out)
}

/// Split at a parameter value, snapping to the nearest interior grid sample.
pub fn split_at(c: &Curve, t: f64) -> Result<(Curve, Curve)> {
    let ts = c.params();
    let scale = ts[ts.len() - 1] - ts[0];
    let tol = 1e-9 * scale.max(1.0);
    if t <= ts[0] + tol || t >= ts[ts.len() - 1] - tol {
        return Err(Error::InvalidParameter("split parameter must be strictly interior".into()));
    }
    let mut best = 1usize;
    let mut best_d = f64::INFINITY;
    for (i, &ti) in ts.iter().enumerate().take(ts.len() - 1).skip(1) {
        let d = (ti - t).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    c.split_at_index(best)
}

/// Parameterized variation: the sum of `|Δf|` over consecutive samples. For a
/// finite ordered grid the full partition maximizes the defining sup.
pub fn pvar(f: &PlaneFunction, c: &Curve) -> Result<f64> {
    let vals = f.eval_all(c.samples())?;
    Ok(vals.windows(2).map(|w| (w[1] - w[0]).norm()).sum())
}

/// Scale hint used by callers when comparing against curve samples.
pub fn curve_tol(c: &Curve) -> f64 {
    point_tol(c.scale_hint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::Poly2;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn semicircle() -> Curve {
        Curve::circular_arc(pt(0., 0.), 1.0, PI, 0.0, 50).unwrap()
    }

    #[test]
    fn convexity_examples() {
        assert!(is_convex(&Curve::segment(pt(0., 0.), pt(1., 0.), 2).unwrap()));
        assert!(is_convex(&semicircle()));
        // S-shaped cubic y = x^3 - x on [-1,1]
        let pts: Vec<Point> = (0..41)
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / 40.0;
                pt(x, x * x * x - x)
            })
            .collect();
        assert!(!is_convex(&Curve::polyline(pts).unwrap()));
    }

    #[test]
    fn projectability_examples() {
        assert!(is_projectable(&semicircle()).unwrap());
        assert!(is_projectable(&Curve::segment(pt(0., 0.), pt(2., 1.), 5).unwrap()).unwrap());
        let arc300 = Curve::circular_arc(pt(0., 0.), 1.0, 0.0, 300f64.to_radians(), 121).unwrap();
        assert!(!is_projectable(&arc300).unwrap());
        let s_curve: Vec<Point> =
            (0..21).map(|i| { let x = -1.0 + 2.0 * i as f64 / 20.0; pt(x, x * x * x - x) }).collect();
        assert!(is_projectable(&Curve::polyline(s_curve).unwrap()).is_err());
    }

    #[test]
    fn split_projectable_examples() {
        let pieces = split_projectable(&semicircle()).unwrap();
        assert_eq!(pieces.len(), 1);

        let arc300 = Curve::circular_arc(pt(0., 0.), 1.0, 0.0, 300f64.to_radians(), 121).unwrap();
        let pieces = split_projectable(&arc300).unwrap();
        assert_eq!(pieces.len(), 3);
        let mut total = 0;
        for (i, p) in pieces.iter().enumerate() {
            assert!(is_projectable(p).unwrap());
            total += p.samples().len() - if i > 0 { 1 } else { 0 };
        }
        // pieces partition the sample set, sharing split points
        assert_eq!(total, 121);
        assert_eq!(pieces[0].start(), arc300.start());
        assert_eq!(pieces[2].end(), arc300.end());
    }

    #[test]
    fn split_at_examples() {
        let seg = Curve::segment(pt(0., 0.), pt(2., 0.), 3).unwrap();
        let (l, r) = split_at(&seg, 0.5).unwrap();
        assert_eq!(l.endpoints(), (pt(0., 0.), pt(1., 0.)));
        assert_eq!(r.endpoints(), (pt(1., 0.), pt(2., 0.)));

        let semi = Curve::circular_arc(pt(0., 0.), 1.0, PI, 0.0, 51).unwrap();
        let (l, r) = split_at(&semi, 0.5).unwrap();
        assert!(l.end().approx_eq(pt(0., 1.), 1e-9));
        assert_eq!(l.end(), r.start());

        assert!(split_at(&seg, 0.0).is_err());
        assert!(split_at(&seg, 1.0).is_err());
    }

    #[test]
    fn pvar_examples() {
        let seg = Curve::segment(pt(0., 0.), pt(1., 0.), 64).unwrap();
        let c = PlaneFunction::constant_re(7.0);
        assert_eq!(pvar(&c, &seg).unwrap(), 0.0);

        let re_z = PlaneFunction::poly(Poly2::new(vec![(1, 0, Complex64::new(1.0, 0.0))]));
        assert!((pvar(&re_z, &seg).unwrap() - 1.0).abs() < 1e-12);

        // split additivity
        let semi = semicircle();
        let (l, r) = split_at(&semi, 0.37).unwrap();
        let whole = pvar(&re_z, &semi).unwrap();
        let parts = pvar(&re_z, &l).unwrap() + pvar(&re_z, &r).unwrap();
        assert!((whole - parts).abs() < 1e-12);
    }

    #[test]
    fn pvar_reparameterization_independent() {
        // same sample points, different strictly monotone parameter grid
        let pts: Vec<Point> = (0..20).map(|i| pt(i as f64, (i as f64).sin())).collect();
        let c1 = Curve::polyline(pts.clone()).unwrap();
        let ts: Vec<f64> = (0..20).map(|i| (i as f64).powi(2)).collect();
        let c2 = Curve::validate(CurveKind::PolylineSample, ts, pts).unwrap();
        let f = PlaneFunction::poly(Poly2::new(vec![(0, 1, Complex64::new(1.0, 0.0))]));
        assert_eq!(pvar(&f, &c1).unwrap(), pvar(&f, &c2).unwrap());
    }

    #[test]
    fn resample_and_arc_fraction() {
        let semi = semicircle();
        let dense = semi.resample(200).unwrap();
        assert_eq!(dense.samples().len(), 200);
        assert!(dense.start().approx_eq(semi.start(), 1e-12));
        assert!(dense.end().approx_eq(semi.end(), 1e-12));
        let mid = semi.point_at_arc_fraction(0.5);
        assert!(mid.approx_eq(pt(0., 1.), 1e-3));
        let rev = semi.reversed();
        assert_eq!(rev.start(), semi.end());
        assert!(is_projectable(&rev).unwrap());
    }
}
