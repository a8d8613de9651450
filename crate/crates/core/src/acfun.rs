//! Constructive function builders: cut-off functions with their variation
//! bounds, projection extensions, extension by zero, and a heuristic
//! polynomial-approximation distance.

use crate::error::{Error, Result};
use crate::func::PlaneFunction;
pub use crate::func::Poly2;
use crate::geom::{ConvexPolygon, Line, Point};
use crate::mosaic::PicSet;
use crate::picnorm::pic_norm;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Exact monomial-sum evaluation.
pub fn poly_eval(p: &Poly2, z: Point) -> Complex64 {
    p.eval(z)
}

/// The ramp: 0 for t ≤ ε/2, (2t−ε)/ε for ε/2 < t < ε, 1 for t ≥ ε.
pub fn g_eps(t: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("g_eps needs eps > 0".into()));
    }
    Ok(if t <= eps / 2.0 {
        0.0
    } else if t >= eps {
        1.0
    } else {
        (2.0 * t - eps) / eps
    })
}

/// h_{H,ε}(x) = g_ε((x − u) · v): 0 outside the half-plane and within ε/2 of
/// its boundary, ramping to 1 at depth ε.
pub fn cutoff_halfplane(h: &Line, eps: f64) -> Result<PlaneFunction> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("cutoff needs eps > 0".into()));
    }
    let h = *h;
    Ok(PlaneFunction::from_fn(move |p| {
        Ok(Complex64::new(g_eps(h.signed_dist(p), eps)?, 0.0))
    }))
}

/// h_ε = Π over sides of the half-plane cut-offs: 1 on the inner offset
/// region, 0 on a neighborhood of the complement of P.
pub fn cutoff_polygon(p: &ConvexPolygon, eps: f64) -> Result<PlaneFunction> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("cutoff needs eps > 0".into()));
    }
    if p.inner_offset(eps).is_none() {
        return Err(Error::InvalidParameter(
            "inner region empty: eps too large for this polygon".into(),
        ));
    }
    let sides = p.halfplanes();
    Ok(PlaneFunction::from_fn(move |z| {
        let mut acc = 1.0;
        for h in &sides {
            acc *= g_eps(h.signed_dist(z), eps)?;
            if acc == 0.0 {
                break;
            }
        }
        Ok(Complex64::new(acc, 0.0))
    }))
}

/// Extend a function known on a normalized curve (endpoints at Re z = 0 and
/// Re z = 1, projectable over the real axis) to the whole plane:
/// f_c(z) = f(γ(0)) for Re z < 0, f at the curve point over Re z on the
/// strip, f(γ(1)) for Re z > 1.
pub fn extend_along_projection(f: &PlaneFunction, c: &crate::curve::Curve) -> Result<PlaneFunction> {
    let pts: Vec<Point> = c.samples().to_vec();
    let n = pts.len();
    let tol = 1e-9;
    if pts[0].x.abs() > tol || (pts[n - 1].x - 1.0).abs() > tol {
        return Err(Error::InvalidParameter(
            "curve endpoints must sit at Re z = 0 and Re z = 1 (apply the normalizing affine first)".into(),
        ));
    }
    for w in pts.windows(2) {
        if w[1].x < w[0].x - tol {
            return Err(Error::NotProjectable(
                "curve is not projectable over the real axis".into(),
            ));
        }
    }
    let vals = f.eval_all(&pts)?;
    Ok(PlaneFunction::from_fn(move |z| {
        let x = z.x.clamp(0.0, 1.0);
        // locate x within the monotone Re-grid and interpolate the curve point
        if x <= pts[0].x {
            return Ok(vals[0]);
        }
        for i in 1..n {
            if x <= pts[i].x {
                let span = pts[i].x - pts[i - 1].x;
                if span <= 0.0 {
                    return Ok(vals[i]);
                }
                let s = (x - pts[i - 1].x) / span;
                return Ok(vals[i - 1] + (vals[i] - vals[i - 1]) * s);
            }
        }
        Ok(vals[n - 1])
    }))
}

/// Extend g by zero across a strictly separated second component: after the
/// caller's normalization, every point of `sigma1` lies strictly left of
/// every point of `sigma2`; the result equals g left of the gap, 0 right.
pub fn extend_by_zero(
    g: &PlaneFunction,
    sigma1: &PicSet,
    sigma2: &PicSet,
) -> Result<PlaneFunction> {
    let max1 = sigma1.all_samples().iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let min2 = sigma2.all_samples().iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    if !(max1 < min2) {
        return Err(Error::NotSeparated(
            "no vertical line strictly separates the components".into(),
        ));
    }
    let cut = 0.5 * (max1 + min2);
    let g = g.clone();
    Ok(PlaneFunction::from_fn(move |z| {
        if z.x < cut {
            g.eval(z)
        } else {
            Ok(Complex64::new(0.0, 0.0))
        }
    }))
}

/// Budget for the coordinate-descent polynomial fit.
#[derive(Debug, Clone)]
pub struct AcBudget {
    pub restarts: u32,
    pub sweeps: u32,
    pub init_step: f64,
    pub seed: u64,
}

impl Default for AcBudget {
    fn default() -> Self {
        AcBudget { restarts: 16, sweeps: 40, init_step: 1.0, seed: 0 }
    }
}

fn monomials(degree: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for n in 0..=degree {
        for m in 0..=degree - n {
            out.push((n, m));
        }
    }
    out
}

fn objective(
    f: &PlaneFunction,
    ps: &PicSet,
    monos: &[(u32, u32)],
    coeffs: &[Complex64],
) -> Result<f64> {
    let p = Poly2::new(
        monos.iter().zip(coeffs).map(|(&(n, m), &c)| (n, m, c)).collect(),
    );
    pic_norm(&PlaneFunction::difference(f.clone(), PlaneFunction::poly(p)), ps)
}

/// Heuristic upper bound on the PIC-norm distance from `f` to polynomials of
/// total degree ≤ `degree`: derivative-free coordinate descent over the
/// complex coefficients with seeded restarts, warm-started degree by degree
/// (so the result is monotone nonincreasing in the degree for a fixed
/// schedule). Never a membership verdict.
pub fn ac_distance(
    f: &PlaneFunction,
    ps: &PicSet,
    degree: u32,
    budget: &AcBudget,
) -> Result<f64> {
    let mut best_val = f64::INFINITY;
    let mut warm: Vec<((u32, u32), Complex64)> = Vec::new();

    for d in 0..=degree {
        let monos = monomials(d);
        let k = monos.len();
        let mut starts: Vec<Vec<Complex64>> = Vec::new();
        // warm start from the previous degree's best coefficients
        let mut carried = vec![Complex64::new(0.0, 0.0); k];
        for (mono, c) in &warm {
            if let Some(i) = monos.iter().position(|m| m == mono) {
                carried[i] = *c;
            }
        }
        starts.push(carried);
        // f's own coefficients, when f is a polynomial that fits
        if let Some(poly) = f.as_poly() {
            if poly.degree() <= d {
                let mut own = vec![Complex64::new(0.0, 0.0); k];
                for (n, m, c) in poly.terms() {
                    if let Some(i) = monos.iter().position(|&mm| mm == (*n, *m)) {
                        own[i] += *c;
                    }
                }
                starts.push(own);
            }
        }
        for r in 0..budget.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(r as u64));
            starts.push(
                (0..k)
                    .map(|_| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    })
                    .collect(),
            );
        }

        for mut coeffs in starts {
            let mut val = objective(f, ps, &monos, &coeffs)?;
            let mut step = budget.init_step;
            for _ in 0..budget.sweeps {
                let mut improved = false;
                for i in 0..k {
                    for delta in [
                        Complex64::new(step, 0.0),
                        Complex64::new(-step, 0.0),
                        Complex64::new(0.0, step),
                        Complex64::new(0.0, -step),
                    ] {
                        let saved = coeffs[i];
                        coeffs[i] = saved + delta;
                        let v = objective(f, ps, &monos, &coeffs)?;
                        if v < val {
                            val = v;
                            improved = true;
                        } else {
                            coeffs[i] = saved;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                    if step < 1e-9 {
                        break;
                    }
                }
            }
            if val < best_val {
                best_val = val;
                warm = monos.iter().copied().zip(coeffs.iter().copied()).collect();
            }
        }
    }
    Ok(best_val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{pvar, Curve};
    use crate::mosaic::Mosaic;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![pt(0., 0.), pt(1., 0.), pt(1., 1.), pt(0., 1.)]).unwrap()
    }

    #[test]
    fn g_eps_examples() {
        let e = 0.4;
        assert_eq!(g_eps(e / 2.0, e).unwrap(), 0.0);
        assert_eq!(g_eps(e, e).unwrap(), 1.0);
        assert!((g_eps(3.0 * e / 4.0, e).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(g_eps(-1.0, e).unwrap(), 0.0);
        assert!(g_eps(0.1, 0.0).is_err());
        assert!(g_eps(0.1, -1.0).is_err());
    }

    #[test]
    fn cutoff_halfplane_examples() {
        let h = Line::new(pt(0., 0.), pt(0., 1.)).unwrap(); // upper half-plane
        let f = cutoff_halfplane(&h, 0.2).unwrap();
        assert_eq!(f.eval(pt(3.0, 1.0)).unwrap().re, 1.0);
        assert_eq!(f.eval(pt(-1.0, 0.0)).unwrap().re, 0.0);

        // single monotone ramp along a straight segment: pvar ≤ 2·1
        let seg = Curve::segment(pt(0., -1.), pt(0., 1.), 256).unwrap();
        assert!(pvar(&f, &seg).unwrap() <= 2.0 + 1e-9);
    }

    #[test]
    fn cutoff_polygon_examples() {
        let sq = unit_square();
        let h = cutoff_polygon(&sq, 0.1).unwrap();
        assert_eq!(h.eval(pt(0.5, 0.5)).unwrap().re, 1.0);
        assert_eq!(h.eval(pt(2.0, 0.5)).unwrap().re, 0.0);
        assert!(cutoff_polygon(&sq, 10.0).is_err());

        // product structure at random points
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sides = sq.halfplanes();
        for _ in 0..50 {
            let z = pt(rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5));
            let mut prod = 1.0;
            for s in &sides {
                prod *= g_eps(s.signed_dist(z), 0.1).unwrap();
            }
            assert!((h.eval(z).unwrap().re - prod).abs() < 1e-12);
            let v = h.eval(z).unwrap().re;
            assert!((0.0..=1.0).contains(&v));
        }

        // pvar bound 2n = 8 along a convex curve inside the square
        for eps in [0.05, 0.1] {
            let h = cutoff_polygon(&sq, eps).unwrap();
            let arc =
                Curve::parabolic_arc(pt(0.05, 0.1), pt(0.5, 0.9), pt(0.95, 0.1), 512)
                    .unwrap();
            assert!(pvar(&h, &arc).unwrap() <= 8.0 + 1e-9);
        }
    }

    #[test]
    fn extend_along_projection_examples() {
        let c = Curve::parabolic_arc(pt(0., 0.), pt(0.5, 0.6), pt(1., 0.), 65).unwrap();
        let konst = PlaneFunction::constant_re(4.0);
        let ext = extend_along_projection(&konst, &c).unwrap();
        assert_eq!(ext.eval(pt(-3.0, 7.0)).unwrap().re, 4.0);
        assert_eq!(ext.eval(pt(0.5, -2.0)).unwrap().re, 4.0);

        let re_z = PlaneFunction::poly(Poly2::new(vec![(1, 0, Complex64::new(1.0, 0.0))]));
        let ext = extend_along_projection(&re_z, &c).unwrap();
        for x in [-0.5f64, 0.0, 0.25, 0.7, 1.0, 1.5] {
            let want = x.clamp(0.0, 1.0);
            assert!((ext.eval(pt(x, 5.0)).unwrap().re - want).abs() < 1e-9);
        }
        // restriction back to the curve is the identity on samples
        let f = PlaneFunction::poly(Poly2::new(vec![(0, 1, Complex64::new(1.0, 0.0))]));
        let ext = extend_along_projection(&f, &c).unwrap();
        for &s in c.samples() {
            assert!((ext.eval(s).unwrap() - f.eval(s).unwrap()).norm() < 1e-9);
        }
        // non-normalized endpoints are rejected
        let bad = Curve::segment(pt(0., 0.), pt(2., 0.), 5).unwrap();
        assert!(extend_along_projection(&konst, &bad).is_err());
    }

    fn kite_picset(dx: f64) -> PicSet {
        let poly = ConvexPolygon::new(vec![
            pt(dx, 0.),
            pt(dx + 0.5, -0.5),
            pt(dx + 1., 0.),
            pt(dx + 0.5, 0.5),
        ])
        .unwrap();
        let c = Curve::segment(pt(dx, 0.), pt(dx + 1., 0.), 33).unwrap();
        PicSet::new(vec![c], Mosaic::new_unchecked(vec![poly])).unwrap()
    }

    #[test]
    fn extend_by_zero_examples() {
        let s1 = kite_picset(-3.0);
        let s2 = kite_picset(2.0);
        let one = PlaneFunction::constant_re(1.0);
        let ext = extend_by_zero(&one, &s1, &s2).unwrap();
        for p in s1.all_samples() {
            assert_eq!(ext.eval(p).unwrap().re, 1.0);
        }
        for p in s2.all_samples() {
            assert_eq!(ext.eval(p).unwrap().re, 0.0);
        }
        assert!(extend_by_zero(&one, &s1, &kite_picset(-2.5)).is_err());
    }

    #[test]
    fn ac_distance_examples() {
        let ps = kite_picset(0.0);
        let budget = AcBudget { restarts: 2, sweeps: 25, ..AcBudget::default() };

        let c = PlaneFunction::constant(Complex64::new(2.0, -1.0));
        assert!(ac_distance(&c, &ps, 0, &budget).unwrap() < 1e-6);

        let f = PlaneFunction::poly(Poly2::new(vec![
            (1, 0, Complex64::new(1.0, 0.0)),
            (0, 0, Complex64::new(0.0, 0.5)),
        ]));
        assert!(ac_distance(&f, &ps, 1, &budget).unwrap() < 1e-6);

        // monotone nonincreasing in the degree
        let d1 = ac_distance(&f, &ps, 0, &budget).unwrap();
        let d2 = ac_distance(&f, &ps, 1, &budget).unwrap();
        assert!(d2 <= d1 + 1e-9, "{d2} > {d1}");
    }
}
