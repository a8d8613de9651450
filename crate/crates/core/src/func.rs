//! Complex-valued functions on plane sets.
//!
//! A [`PlaneFunction`] is anything we can evaluate at the points we care
//! about: a constant, a two-variable polynomial, a table of samples keyed by
//! point, an analytic closure, or pointwise sums/products of these.

use crate::error::{Error, Result};
use crate::geom::{point_tol, Point};
use num_complex::Complex64;
use std::sync::Arc;

/// A complex polynomial in two real variables, `p(x, y) = sum c_nm x^n y^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    /// Terms `(n, m, c_nm)` with nonnegative exponents.
    terms: Vec<(u32, u32, Complex64)>,
}

impl Poly2 {
    pub fn new(terms: Vec<(u32, u32, Complex64)>) -> Self {
        Poly2 { terms }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly2 { terms: vec![(0, 0, c)] }
    }

    /// The coordinate polynomial `z = x + iy`.
    pub fn z() -> Self {
        Poly2 { terms: vec![(1, 0, Complex64::new(1.0, 0.0)), (0, 1, Complex64::new(0.0, 1.0))] }
    }

    pub fn terms(&self) -> &[(u32, u32, Complex64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(n, m, _)| n + m).max().unwrap_or(0)
    }

    /// Evaluate with Horner-style nesting: group terms by the power of `y`,
    /// evaluate each group in `x` by Horner, then the result in `y` by Horner.
    pub fn eval(&self, z: Point) -> Complex64 {
        if self.terms.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let max_m = self.terms.iter().map(|&(_, m, _)| m).max().unwrap() as usize;
        let max_n = self.terms.iter().map(|&(n, _, _)| n).max().unwrap() as usize;
        // coefficient grid c[m][n]
        let mut grid = vec![vec![Complex64::new(0.0, 0.0); max_n + 1]; max_m + 1];
        for &(n, m, c) in &self.terms {
            grid[m as usize][n as usize] += c;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for m in (0..=max_m).rev() {
            let mut row = Complex64::new(0.0, 0.0);
            for n in (0..=max_n).rev() {
                row = row * z.x + grid[m][n];
            }
            acc = acc * z.y + row;
        }
        acc
    }
}

/// A table of function samples keyed by plane point.
#[derive(Debug, Clone)]
pub struct SampleTable {
    entries: Vec<(Point, Complex64)>,
    tol: f64,
}

impl SampleTable {
    pub fn new(entries: Vec<(Point, Complex64)>) -> Result<Self> {
        let scale = entries.iter().map(|(p, _)| p.norm()).fold(1.0, f64::max);
        let tol = point_tol(scale);
        for (p, v) in &entries {
            if !p.is_finite() || !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(SampleTable { entries, tol })
    }

    pub fn lookup(&self, p: Point) -> Option<Complex64> {
        let mut best: Option<(f64, Complex64)> = None;
        for (q, v) in &self.entries {
            let d = p.dist(*q);
            if d <= self.tol && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, *v));
            }
        }
        best.map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(Point, Complex64)] {
        &self.entries
    }
}

type EvalFn = dyn Fn(Point) -> Result<Complex64> + Send + Sync;

/// An evaluable complex-valued function on (part of) the plane.
#[derive(Clone)]
pub enum PlaneFunction {
    Const(Complex64),
    Poly(Poly2),
    Samples(Arc<SampleTable>),
    Closure(Arc<EvalFn>),
    Sum(Arc<PlaneFunction>, Arc<PlaneFunction>),
    Product(Arc<PlaneFunction>, Arc<PlaneFunction>),
    Scaled(Complex64, Arc<PlaneFunction>),
}

impl std::fmt::Debug for PlaneFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlaneFunction::Const(c) => write!(f, "Const({c})"),
            PlaneFunction::Poly(p) => write!(f, "Poly(deg {})", p.degree()),
            PlaneFunction::Samples(t) => write!(f, "Samples({} pts)", t.entries().len()),
            PlaneFunction::Closure(_) => write!(f, "Closure"),
            PlaneFunction::Sum(a, b) => write!(f, "Sum({a:?}, {b:?})"),
            PlaneFunction::Product(a, b) => write!(f, "Product({a:?}, {b:?})"),
            PlaneFunction::Scaled(c, g) => write!(f, "Scaled({c}, {g:?})"),
        }
    }
}

impl PlaneFunction {
    pub fn constant(c: Complex64) -> Self {
        PlaneFunction::Const(c)
    }

    pub fn constant_re(c: f64) -> Self {
        PlaneFunction::Const(Complex64::new(c, 0.0))
    }

    pub fn poly(p: Poly2) -> Self {
        PlaneFunction::Poly(p)
    }

    /// The underlying polynomial, when this function is one.
    pub fn as_poly(&self) -> Option<&Poly2> {
        match self {
            PlaneFunction::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn from_samples(entries: Vec<(Point, Complex64)>) -> Result<Self> {
        Ok(PlaneFunction::Samples(Arc::new(SampleTable::new(entries)?)))
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(Point) -> Result<Complex64> + Send + Sync + 'static,
    {
        PlaneFunction::Closure(Arc::new(f))
    }

    pub fn sum(a: PlaneFunction, b: PlaneFunction) -> Self {
        PlaneFunction::Sum(Arc::new(a), Arc::new(b))
    }

    pub fn product(a: PlaneFunction, b: PlaneFunction) -> Self {
        PlaneFunction::Product(Arc::new(a), Arc::new(b))
    }

    pub fn scaled(c: Complex64, f: PlaneFunction) -> Self {
        PlaneFunction::Scaled(c, Arc::new(f))
    }

    /// `f - g` as a plane function.
    pub fn difference(f: PlaneFunction, g: PlaneFunction) -> Self {
        PlaneFunction::sum(f, PlaneFunction::scaled(Complex64::new(-1.0, 0.0), g))
    }

    pub fn eval(&self, p: Point) -> Result<Complex64> {
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        let v = match self {
            PlaneFunction::Const(c) => *c,
            PlaneFunction::Poly(poly) => poly.eval(p),
            PlaneFunction::Samples(t) => t.lookup(p).ok_or_else(|| Error::Eval {
                x: p.x,
                y: p.y,
                reason: "point not in sample table".into(),
            })?,
            PlaneFunction::Closure(f) => f(p)?,
            PlaneFunction::Sum(a, b) => a.eval(p)? + b.eval(p)?,
            PlaneFunction::Product(a, b) => a.eval(p)? * b.eval(p)?,
            PlaneFunction::Scaled(c, f) => *c * f.eval(p)?,
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Eval { x: p.x, y: p.y, reason: "non-finite value".into() });
        }
        Ok(v)
    }

    /// Evaluate on a slice of points.
    pub fn eval_all(&self, pts: &[Point]) -> Result<Vec<Complex64>> {
        pts.iter().map(|p| self.eval(*p)).collect()
    }

    /// Sup of |f| over the given points.
    pub fn sup_norm(&self, pts: &[Point]) -> Result<f64> {
        let mut s: f64 = 0.0;
        for p in pts {
            s = s.max(self.eval(*p)?.norm());
        }
        Ok(s)
    }
}
