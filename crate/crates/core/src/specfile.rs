//! JSON spec files: a serializable description of a PIC set together with
//! named functions and point lists, plus the bundled example geometries.
//!
//! The format keys every coordinate that several objects must share (polygon
//! corners, curve endpoints) by a vertex *name*, so shared points are shared
//! exactly, bit for bit, after a round trip through the file.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::func::{PlaneFunction, Poly2};
use crate::geom::{dist_to_segment, point_tol, ConvexPolygon, Point};
use crate::mosaic::{validate, Mosaic, PicSet};
use crate::variation::PointList;

/// A PIC set spec: named vertices, polygons over those names, one component
/// curve per polygon, and optional named functions and point lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub name: String,
    /// Named plane points referenced by `polygons` and curve endpoints.
    pub vertices: BTreeMap<String, [f64; 2]>,
    /// Convex polygons as cyclic lists of vertex names (either orientation).
    pub polygons: Vec<Vec<String>>,
    /// Component curves; `curves[i].polygon` indexes into `polygons` and the
    /// polygon indices must form a permutation of `0..polygons.len()`.
    pub curves: Vec<CurveSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, FunctionSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lists: BTreeMap<String, Vec<[f64; 2]>>,
}

/// One component curve, running from vertex `from` to vertex `to` inside
/// polygon `polygon`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSpec {
    pub from: String,
    pub to: String,
    pub polygon: usize,
    /// Sample count; the loader's default applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(flatten)]
    pub geometry: CurveGeometry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveGeometry {
    /// Straight segment between the two endpoint vertices.
    Segment,
    /// Circular arc `center + radius·(cos θ, sin θ)`, θ from `theta0` to
    /// `theta1` (radians); its endpoints must land on `from`/`to`.
    CircularArc { center: [f64; 2], radius: f64, theta0: f64, theta1: f64 },
    /// Quadratic Bézier arc with the given interior control point.
    ParabolicArc { control: [f64; 2] },
    /// Piecewise-linear curve through the listed points (endpoints included).
    Polyline { points: Vec<[f64; 2]> },
}

/// A named complex-valued function on the PIC set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// Terms `[i, j, re, im]` meaning `(re + im·𝕚) · x^i · y^j`.
    Polynomial { terms: Vec<(u32, u32, f64, f64)> },
    /// Characteristic function of the union of the listed component curves
    /// (by curve index, after reordering by polygon): 1 there, 0 on the rest.
    Indicator { curves: Vec<usize> },
    /// Explicit sample table `[x, y, re, im]`.
    Samples { entries: Vec<(f64, f64, f64, f64)> },
}

/// A spec file resolved into live objects.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub name: String,
    pub picset: PicSet,
    pub functions: BTreeMap<String, PlaneFunction>,
    pub lists: BTreeMap<String, PointList>,
}

fn pt(a: [f64; 2]) -> Point {
    Point::new(a[0], a[1])
}

/// Resolve a spec into a validated PIC set plus its functions and lists.
pub fn load_spec(spec: &SpecFile, default_samples: usize) -> Result<LoadedSpec> {
    if default_samples < 2 {
        return Err(Error::SpecFile("default sample count must be at least 2".into()));
    }
    let vertex = |name: &str| -> Result<Point> {
        spec.vertices
            .get(name)
            .map(|&a| pt(a))
            .ok_or_else(|| Error::SpecFile(format!("unknown vertex name {name:?}")))
    };

    let mut polygons = Vec::with_capacity(spec.polygons.len());
    for (i, names) in spec.polygons.iter().enumerate() {
        let pts = names.iter().map(|n| vertex(n)).collect::<Result<Vec<_>>>()?;
        let poly = ConvexPolygon::new(pts)
            .map_err(|e| Error::SpecFile(format!("polygon {i}: {e}")))?;
        polygons.push(poly);
    }

    if spec.curves.len() != spec.polygons.len() {
        return Err(Error::SpecFile(format!(
            "{} curves for {} polygons; each polygon needs exactly one curve",
            spec.curves.len(),
            spec.polygons.len()
        )));
    }
    let mut curves: Vec<Option<Curve>> = vec![None; spec.polygons.len()];
    for (i, cs) in spec.curves.iter().enumerate() {
        let a = vertex(&cs.from)?;
        let b = vertex(&cs.to)?;
        let n = cs.samples.unwrap_or(default_samples);
        let curve = match &cs.geometry {
            CurveGeometry::Segment => Curve::segment(a, b, n),
            CurveGeometry::CircularArc { center, radius, theta0, theta1 } => {
                Curve::circular_arc(pt(*center), *radius, *theta0, *theta1, n)
            }
            CurveGeometry::ParabolicArc { control } => {
                Curve::parabolic_arc(a, pt(*control), b, n)
            }
            CurveGeometry::Polyline { points } => {
                Curve::polyline(points.iter().map(|&p| pt(p)).collect())
            }
        }
        .map_err(|e| Error::SpecFile(format!("curve {i}: {e}")))?;
        let scale = a.norm().max(b.norm()).max(1.0);
        let tol = point_tol(scale);
        if !curve.start().approx_eq(a, tol) || !curve.end().approx_eq(b, tol) {
            return Err(Error::SpecFile(format!(
                "curve {i}: geometry runs {:?} → {:?}, but from/to name {:?} → {:?}",
                curve.start(),
                curve.end(),
                a,
                b
            )));
        }
        let slot = curves.get_mut(cs.polygon).ok_or_else(|| {
            Error::SpecFile(format!("curve {i}: polygon index {} out of range", cs.polygon))
        })?;
        if slot.is_some() {
            return Err(Error::SpecFile(format!(
                "curve {i}: polygon {} already has a curve",
                cs.polygon
            )));
        }
        *slot = Some(curve);
    }
    let curves: Vec<Curve> = curves.into_iter().map(|c| c.unwrap()).collect();

    let picset = PicSet::new(curves, Mosaic::new(polygons)?)?;
    let report = validate(&picset);
    if !report.ok() {
        return Err(Error::SpecFile(format!(
            "PIC set fails validation: {}",
            report.violations.join("; ")
        )));
    }

    let mut functions = BTreeMap::new();
    for (name, fs) in &spec.functions {
        let f = match fs {
            FunctionSpec::Constant { re, im } => {
                PlaneFunction::constant(Complex64::new(*re, *im))
            }
            FunctionSpec::Polynomial { terms } => PlaneFunction::poly(Poly2::new(
                terms
                    .iter()
                    .map(|&(i, j, re, im)| (i, j, Complex64::new(re, im)))
                    .collect(),
            )),
            FunctionSpec::Indicator { curves: idx } => {
                for &k in idx {
                    if k >= picset.curves().len() {
                        return Err(Error::SpecFile(format!(
                            "function {name:?}: curve index {k} out of range"
                        )));
                    }
                }
                indicator_of_curves(&picset, idx)
            }
            FunctionSpec::Samples { entries } => PlaneFunction::from_samples(
                entries
                    .iter()
                    .map(|&(x, y, re, im)| (Point::new(x, y), Complex64::new(re, im)))
                    .collect(),
            )?,
        };
        functions.insert(name.clone(), f);
    }

    let mut lists = BTreeMap::new();
    for (name, raw) in &spec.lists {
        let list = PointList::new(raw.iter().map(|&p| pt(p)).collect())
            .map_err(|e| Error::SpecFile(format!("list {name:?}: {e}")))?;
        lists.insert(name.clone(), list);
    }

    Ok(LoadedSpec { name: spec.name.clone(), picset, functions, lists })
}

/// Characteristic function of the union of the listed component curves,
/// evaluated by distance to their sampled polylines.
fn indicator_of_curves(ps: &PicSet, idx: &[usize]) -> PlaneFunction {
    let polylines: Vec<Vec<Point>> =
        idx.iter().map(|&k| ps.curves()[k].samples().to_vec()).collect();
    let scale = ps
        .all_samples()
        .iter()
        .map(|p| p.norm())
        .fold(1.0, f64::max);
    let tol = point_tol(scale);
    PlaneFunction::from_fn(move |p: Point| {
        let on = polylines.iter().any(|pl| {
            pl.windows(2).any(|w| dist_to_segment(p, w[0], w[1]) <= tol)
        });
        Ok(Complex64::new(if on { 1.0 } else { 0.0 }, 0.0))
    })
}

/// Parse a spec from JSON text, with serde's line/column diagnostics.
pub fn parse_spec(text: &str) -> Result<SpecFile> {
    serde_json::from_str(text).map_err(|e| Error::SpecFile(e.to_string()))
}

/// Read and parse a spec file from disk.
pub fn read_spec_file(path: &Path) -> Result<SpecFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::SpecFile(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| Error::SpecFile(format!("{}: {e}", path.display())))
}

/// Serialize a spec as pretty JSON. Numbers use serde_json's
/// shortest-round-trip form, which re-parses bit-exactly.
pub fn spec_to_json(spec: &SpecFile) -> String {
    let mut s = serde_json::to_string_pretty(spec).expect("spec serialization cannot fail");
    s.push('\n');
    s
}

/// Write a spec file to disk.
pub fn write_spec_file(spec: &SpecFile, path: &Path) -> Result<()> {
    std::fs::write(path, spec_to_json(spec))
        .map_err(|e| Error::SpecFile(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Bundled example geometries.
// ---------------------------------------------------------------------------

struct Builder {
    spec: SpecFile,
    interned: Vec<(u64, u64, String)>,
}

impl Builder {
    fn new(name: &str) -> Self {
        Builder {
            spec: SpecFile {
                name: name.into(),
                vertices: BTreeMap::new(),
                polygons: Vec::new(),
                curves: Vec::new(),
                functions: BTreeMap::new(),
                lists: BTreeMap::new(),
            },
            interned: Vec::new(),
        }
    }

    /// Intern a point (bit-exact) and return its name.
    fn vertex(&mut self, p: Point) -> String {
        let key = (p.x.to_bits(), p.y.to_bits());
        if let Some((_, _, name)) =
            self.interned.iter().find(|(x, y, _)| (*x, *y) == key)
        {
            return name.clone();
        }
        let name = format!("v{:02}", self.interned.len());
        self.interned.push((key.0, key.1, name.clone()));
        self.spec.vertices.insert(name.clone(), [p.x, p.y]);
        name
    }

    fn polygon(&mut self, pts: &[Point]) -> usize {
        let names = pts.iter().map(|&p| self.vertex(p)).collect();
        self.spec.polygons.push(names);
        self.spec.polygons.len() - 1
    }

    /// A kite around the segment `a`–`b` with half-width `w`; the segment is
    /// the kite's diagonal.
    fn kite(&mut self, a: Point, b: Point, w: f64) -> usize {
        let mid = a.mid(b);
        let n = b.sub(a).perp().normalize().expect("kite over a degenerate segment");
        self.polygon(&[a, mid.add(n.scale(-w)), b, mid.add(n.scale(w))])
    }

    fn curve(&mut self, from: Point, to: Point, polygon: usize, geometry: CurveGeometry) {
        let from = self.vertex(from);
        let to = self.vertex(to);
        self.spec.curves.push(CurveSpec { from, to, polygon, samples: None, geometry });
    }

    /// Segment curve inside its own kite.
    fn segment_in_kite(&mut self, a: Point, b: Point, w: f64) {
        let poly = self.kite(a, b, w);
        self.curve(a, b, poly, CurveGeometry::Segment);
    }

    fn finish(self) -> SpecFile {
        self.spec
    }
}

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// A single unit segment in a kite.
pub fn fixture_segment() -> SpecFile {
    let mut b = Builder::new("segment");
    b.segment_in_kite(p(0.0, 0.0), p(1.0, 0.0), 0.35);
    b.finish()
}

/// Four segments closing up around the unit square, one kite each.
pub fn fixture_square_cycle() -> SpecFile {
    let mut b = Builder::new("square_cycle");
    let c = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
    for i in 0..4 {
        b.segment_in_kite(c[i], c[(i + 1) % 4], 0.35);
    }
    b.finish()
}

/// A larger square cycle (side 2, centered at the origin).
pub fn fixture_square() -> SpecFile {
    let mut b = Builder::new("square");
    let c = [p(-1.0, -1.0), p(1.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)];
    for i in 0..4 {
        b.segment_in_kite(c[i], c[(i + 1) % 4], 0.5);
    }
    b.finish()
}

/// A triangle cycle of three segments.
pub fn fixture_triangle() -> SpecFile {
    let mut b = Builder::new("triangle");
    let c = [p(0.0, 0.0), p(4.0, 0.0), p(2.0, 3.0)];
    for i in 0..3 {
        b.segment_in_kite(c[i], c[(i + 1) % 3], 0.3);
    }
    b.finish()
}

/// Four segments meeting at a central degree-4 vertex.
pub fn fixture_plus_sign() -> SpecFile {
    let mut b = Builder::new("plus_sign");
    let o = p(0.0, 0.0);
    for tip in [p(1.0, 0.0), p(0.0, 1.0), p(-1.0, 0.0), p(0.0, -1.0)] {
        b.segment_in_kite(o, tip, 0.15);
    }
    b.finish()
}

/// A unit segment plus the list `l1`, a 4-point zigzag with variation
/// factor 3.
pub fn fixture_zigzag() -> SpecFile {
    let mut b = Builder::new("zigzag");
    b.segment_in_kite(p(0.0, 0.0), p(1.0, 0.0), 0.35);
    let mut spec = b.finish();
    spec.lists.insert(
        "l1".into(),
        vec![[0.0, -1.0], [1.0, 1.0], [2.0, -1.0], [3.0, 1.0]],
    );
    spec
}

/// Two interleaved polylines joined at one point: the upper (red) chain of
/// five segments and the lower (blue) chain of four, each segment in a thin
/// kite. The `red_indicator` function is 1 on the upper chain; the `dashed`
/// list alternates between the chains along the line y = 1/2.
pub fn fixture_bad_bv_ex() -> SpecFile {
    let mut b = Builder::new("bad_bv_ex");
    let w = 0.04;
    let red = [
        p(0.0, 0.0),
        p(0.75, 0.75),
        p(1.0, 1.0),
        p(2.0, 0.0),
        p(3.0, 1.15),
        p(4.0, 0.0),
    ];
    let blue = [
        p(0.75, 0.75),
        p(2.0, -0.5),
        p(3.0, 0.7),
        p(4.0, -0.5),
        p(5.0, 0.7),
    ];
    for seg in red.windows(2) {
        b.segment_in_kite(seg[0], seg[1], w);
    }
    for seg in blue.windows(2) {
        b.segment_in_kite(seg[0], seg[1], w);
    }
    let mut spec = b.finish();
    spec.functions.insert(
        "red_indicator".into(),
        FunctionSpec::Indicator { curves: vec![0, 1, 2, 3, 4] },
    );
    spec.lists.insert(
        "dashed".into(),
        vec![
            [0.5, 0.5],
            [1.0, 0.5],
            [1.5, 0.5],
            [2.0 + 5.0 / 6.0, 0.5],
            [4.0 - 10.0 / 23.0, 0.5],
            [4.0 + 5.0 / 6.0, 0.5],
        ],
    );
    spec
}

/// The unit circle (five arcs) with a parabolic tail, over a six-polygon
/// mosaic: a pentagon for the tail and a square, two quadrilaterals and two
/// triangles around the circle.
pub fn fixture_pic_fig_sigma() -> SpecFile {
    use std::f64::consts::PI;
    let s = 3.0_f64.sqrt() / 2.0;
    let mut b = Builder::new("pic_fig_sigma");
    let x1 = p(2.0, 1.0);
    let x2 = p(1.0, 0.0);
    let x3 = p(0.0, 1.0);
    let x4 = p(-s, 0.5);
    let x5 = p(-s, -0.5);
    let x6 = p(0.0, -1.0);
    let o = p(0.0, 0.0);

    let pentagon = b.polygon(&[x2, p(1.5, -0.5), p(2.0, 0.0), x1, p(1.5, 1.0)]);
    b.curve(x2, x1, pentagon, CurveGeometry::ParabolicArc { control: [1.5, 0.0] });

    let arc = |theta0: f64, theta1: f64| CurveGeometry::CircularArc {
        center: [0.0, 0.0],
        radius: 1.0,
        theta0,
        theta1,
    };
    let square = b.polygon(&[o, x2, p(1.0, 1.0), x3]);
    b.curve(x2, x3, square, arc(0.0, PI / 2.0));
    let quad_nw = b.polygon(&[o, x3, p(-s, 1.0), x4]);
    b.curve(x3, x4, quad_nw, arc(PI / 2.0, 5.0 * PI / 6.0));
    let tri_w = b.polygon(&[x5, x4, p(-1.5, 0.0)]);
    b.curve(x4, x5, tri_w, arc(5.0 * PI / 6.0, 7.0 * PI / 6.0));
    let quad_sw = b.polygon(&[o, x5, p(-s, -1.0), x6]);
    b.curve(x5, x6, quad_sw, arc(-5.0 * PI / 6.0, -PI / 2.0));
    let tri_se = b.polygon(&[x6, p(1.0, -1.0), x2]);
    b.curve(x6, x2, tri_se, arc(-PI / 2.0, 0.0));
    b.finish()
}

/// Six segments, homeomorphic to [`fixture_pic_fig_sigma`]: a quadrilateral
/// cycle with a two-segment tail, each segment the diagonal of a kite.
pub fn fixture_pic_fig_tau() -> SpecFile {
    let mut b = Builder::new("pic_fig_tau");
    let y1 = p(0.0, -0.5);
    let y2 = p(0.0, 0.0);
    let y3 = p(1.0, 1.0);
    let y4 = p(-1.0, 1.0);
    let y5 = p(-1.0, -1.0);
    let y6 = p(1.0, -1.0);
    let a12 = p(-0.5, -0.25);
    let b12 = p(0.5, -0.25);

    let q = b.polygon(&[y1, b12, y2, a12]);
    b.curve(y1, y2, q, CurveGeometry::Segment);
    let q = b.polygon(&[y2, b12, y3, p(0.0, 0.5)]);
    b.curve(y2, y3, q, CurveGeometry::Segment);
    let q = b.polygon(&[y3, p(0.0, 0.5), y4, p(0.0, 1.4)]);
    b.curve(y3, y4, q, CurveGeometry::Segment);
    let q = b.polygon(&[y4, a12, y5, p(-1.4, 0.0)]);
    b.curve(y4, y5, q, CurveGeometry::Segment);
    let q = b.polygon(&[y5, p(0.0, -0.75), y6, p(0.0, -1.4)]);
    b.curve(y5, y6, q, CurveGeometry::Segment);
    let q = b.polygon(&[y3, p(1.4, 0.0), y6, b12]);
    b.curve(y6, y3, q, CurveGeometry::Segment);
    b.finish()
}

/// Describe an existing PIC set as a spec (e.g. after refinement). Curves
/// are written out as sampled polylines, so the description is exact for the
/// grid the set carries.
pub fn spec_of_picset(name: &str, ps: &PicSet) -> SpecFile {
    let mut b = Builder::new(name);
    for poly in ps.mosaic().polygons() {
        b.polygon(poly.vertices());
    }
    for (i, c) in ps.curves().iter().enumerate() {
        let points = c.samples().iter().map(|p| [p.x, p.y]).collect();
        b.curve(c.start(), c.end(), i, CurveGeometry::Polyline { points });
    }
    b.finish()
}

/// The bundled example geometries, by name.
pub fn builtin_fixtures() -> Vec<SpecFile> {
    vec![
        fixture_segment(),
        fixture_square_cycle(),
        fixture_square(),
        fixture_triangle(),
        fixture_plus_sign(),
        fixture_zigzag(),
        fixture_bad_bv_ex(),
        fixture_pic_fig_sigma(),
        fixture_pic_fig_tau(),
    ]
}

/// Look up a bundled geometry by name.
pub fn builtin(name: &str) -> Option<SpecFile> {
    builtin_fixtures().into_iter().find(|s| s.name == name)
}
