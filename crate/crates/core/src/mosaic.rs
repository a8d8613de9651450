//! Polygonal mosaics and PIC sets: validation of the mosaic axioms, the
//! constructive Partition Lemma, refinement to a simple projectable
//! decomposition, and the side-count statistic.

use crate::curve::{is_projectable, split_projectable, Curve};
use crate::error::{Error, Result};
use crate::geom::{classify_pair, clip_halfplane, point_tol, ConvexPolygon, Line, PairContact, Point};

/// A finite connected family of convex polygons meeting only at shared
/// vertices or shared full sides.
#[derive(Debug, Clone)]
pub struct Mosaic {
    polygons: Vec<ConvexPolygon>,
}

impl Mosaic {
    /// Build a mosaic, rejecting axiom violations.
    pub fn new(polygons: Vec<ConvexPolygon>) -> Result<Self> {
        let m = Mosaic { polygons };
        let violations = m.violations();
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(Error::Validation(violations.join("; ")))
        }
    }

    /// Build without validating (used by [`validate`] to report violations
    /// as data rather than errors).
    pub fn new_unchecked(polygons: Vec<ConvexPolygon>) -> Self {
        Mosaic { polygons }
    }

    pub fn polygons(&self) -> &[ConvexPolygon] {
        &self.polygons
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    /// Axiom violations: every pairwise intersection must be empty, a shared
    /// vertex, or a segment whose endpoints are vertices of both polygons
    /// (a full side modulo collinear subdivision); the union must connect.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.polygons.len();
        if n == 0 {
            out.push("mosaic is empty".to_string());
            return out;
        }
        let mut dsu = Dsu::new(n);
        for i in 0..n {
            for j in i + 1..n {
                match classify_pair(&self.polygons[i], &self.polygons[j]) {
                    PairContact::Disjoint => {}
                    PairContact::Vertex(p) => {
                        dsu.union(i, j);
                        if !self.polygons[i].is_vertex(p) || !self.polygons[j].is_vertex(p) {
                            out.push(format!(
                                "polygons {i},{j}: contact point ({},{}) is not a vertex of both",
                                p.x, p.y
                            ));
                        }
                    }
                    PairContact::Side(a, b) => {
                        dsu.union(i, j);
                        for p in [a, b] {
                            if !self.polygons[i].is_vertex(p) || !self.polygons[j].is_vertex(p) {
                                out.push(format!(
                                    "polygons {i},{j}: shared segment endpoint ({},{}) is not a vertex of both (not a full side)",
                                    p.x, p.y
                                ));
                            }
                        }
                    }
                    PairContact::Overlap(area) => {
                        dsu.union(i, j);
                        out.push(format!(
                            "polygons {i},{j}: interiors overlap (area {area:.3e})"
                        ));
                    }
                }
            }
        }
        if dsu.components() > 1 {
            out.push("mosaic union is not connected".to_string());
        }
        out
    }
}

/// Maximum side count over the mosaic's polygons.
pub fn sides_max(m: &Mosaic) -> Result<usize> {
    m.polygons
        .iter()
        .map(|p| p.len())
        .max()
        .ok_or_else(|| Error::Empty("sides_max of empty mosaic".into()))
}

/// A PIC set: one differentiable convex curve per mosaic polygon, joining
/// two of its vertices and touching its boundary only there.
#[derive(Debug, Clone)]
pub struct PicSet {
    curves: Vec<Curve>,
    mosaic: Mosaic,
}

impl PicSet {
    pub fn new(curves: Vec<Curve>, mosaic: Mosaic) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::Empty("PIC set needs at least one curve".into()));
        }
        if curves.len() != mosaic.len() {
            return Err(Error::Validation(format!(
                "curve count {} != polygon count {}",
                curves.len(),
                mosaic.len()
            )));
        }
        Ok(PicSet { curves, mosaic })
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn mosaic(&self) -> &Mosaic {
        &self.mosaic
    }

    /// All distinct curve endpoints.
    pub fn vertex_set(&self) -> Vec<Point> {
        let scale =
            self.curves.iter().map(|c| c.samples()[0].norm()).fold(1.0, f64::max);
        let tol = point_tol(scale);
        let mut out: Vec<Point> = Vec::new();
        for c in &self.curves {
            for p in [c.start(), c.end()] {
                if !out.iter().any(|q| q.approx_eq(p, tol)) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Union of all curve sample points.
    pub fn all_samples(&self) -> Vec<Point> {
        self.curves.iter().flat_map(|c| c.samples().iter().copied()).collect()
    }
}

/// Validation report: violations are data, not errors.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every Mosaic and PicSet invariant, pinpointing polygon/curve indices.
pub fn validate(ps: &PicSet) -> ValidationReport {
    let mut violations = ps.mosaic.violations();
    let n = ps.curves.len();
    let mut dsu = Dsu::new(n);
    let verts = ps.vertex_set();
    let scale = verts.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = point_tol(scale);

    for (i, c) in ps.curves.iter().enumerate() {
        let poly = &ps.mosaic.polygons[i];
        let (a, b) = c.endpoints();
        if !poly.is_vertex(a) || !poly.is_vertex(b) {
            violations.push(format!("curve {i}: endpoints are not vertices of polygon {i}"));
        }
        for (k, p) in c.samples().iter().enumerate() {
            if !poly.contains(*p) {
                violations.push(format!("curve {i}: sample {k} leaves polygon {i}"));
                break;
            }
        }
        for (k, p) in c.samples().iter().enumerate().skip(1).take(c.samples().len() - 2) {
            if poly.on_boundary(*p) {
                violations
                    .push(format!("curve {i}: sample {k} touches boundary off-vertex"));
                break;
            }
        }
        // connectivity of the union of curves via shared endpoints
        for (j, d) in ps.curves.iter().enumerate().skip(i + 1) {
            let (c0, c1) = c.endpoints();
            let (d0, d1) = d.endpoints();
            if c0.approx_eq(d0, tol)
                || c0.approx_eq(d1, tol)
                || c1.approx_eq(d0, tol)
                || c1.approx_eq(d1, tol)
            {
                dsu.union(i, j);
            }
        }
    }
    if dsu.components() > 1 {
        violations.push("union of curves is not connected".to_string());
    }
    ValidationReport { violations }
}

/// Region `R_c`: the polygon clipped by every sampled tangent half-plane on
/// the side containing the curve. The curve lies on the boundary of `R_c`.
fn region_rc(p: &ConvexPolygon, c: &Curve) -> Result<ConvexPolygon> {
    let pts = c.samples();
    let scale = p.scale_hint();
    let tol = point_tol(scale);
    let mut current = p.clone();
    // Subsample tangents for large grids; the postcondition checker is the
    // source of truth, not the tangent density.
    let m = pts.len();
    let step = (m / 48).max(1);
    let mut idxs: Vec<usize> = (1..m - 1).step_by(step).collect();
    if *idxs.last().unwrap_or(&0) != m - 2 {
        idxs.push(m - 2);
    }
    for j in idxs {
        let tan = pts[j + 1].sub(pts[j - 1]);
        let normal = match tan.perp().normalize() {
            Ok(n) => n,
            Err(_) => continue,
        };
        let mut line = Line { u: pts[j], v: normal };
        // orient the half-plane so the curve lies on its nonnegative side
        let min_side = pts.iter().map(|q| line.signed_dist(*q)).fold(f64::INFINITY, f64::min);
        let max_side = pts.iter().map(|q| line.signed_dist(*q)).fold(f64::NEG_INFINITY, f64::max);
        if min_side < -tol && max_side > tol {
            return Err(Error::Degenerate(format!(
                "tangent at sample {j} is not a supporting line of the curve"
            )));
        }
        if min_side < -tol {
            line = line.flipped();
        }
        match clip_halfplane(&current, &line)? {
            Some(next) => current = next,
            None => {
                return Err(Error::Degenerate("tangent clipping emptied the region".into()))
            }
        }
    }
    Ok(current)
}

fn min_dist_to_curve(p: Point, c: &Curve) -> f64 {
    let pts = c.samples();
    let mut d = f64::INFINITY;
    for w in pts.windows(2) {
        d = d.min(crate::geom::dist_to_segment(p, w[0], w[1]));
    }
    d
}

/// The Partition Lemma: split a convex polygon at an interior point `v` of
/// the curve `c` joining two of its vertices, producing convex polygons that
/// partition `P`, each containing one arm of the curve, with `v` a vertex of
/// both.
///
/// Construction: build `R_c` from sampled tangent half-planes, pick a
/// boundary point `m` of `R_c` off `c`, and cut `P` by the line through `v`
/// and `m`; `v` is inserted as an explicit (collinear) vertex of both pieces,
/// which makes the pieces partition `P` exactly (area-additive). Candidates
/// for `m` are tried in order of distance from the curve, and every output is
/// verified against the lemma's postconditions before being returned.
pub fn partition_at(p: &ConvexPolygon, c: &Curve, v: Point) -> Result<(ConvexPolygon, ConvexPolygon)> {
    let pts = c.samples();
    let scale = p.scale_hint();
    let tol = point_tol(scale);
    // snap v to the nearest curve sample
    let (iv, snapped) = pts
        .iter()
        .enumerate()
        .map(|(i, q)| (i, *q))
        .min_by(|a, b| a.1.dist(v).partial_cmp(&b.1.dist(v)).unwrap())
        .unwrap();
    if snapped.dist(v) > 1e-6 * scale.max(1.0) {
        return Err(Error::Partition("v does not lie on the curve".into()));
    }
    let v = snapped;
    if iv == 0 || iv + 1 == pts.len() {
        return Err(Error::Partition("v must be interior to the curve".into()));
    }
    if !p.strictly_contains(v) {
        return Err(Error::Partition("v must be strictly interior to the polygon".into()));
    }
    let (va, vb) = c.endpoints();
    if !p.is_vertex(va) || !p.is_vertex(vb) {
        return Err(Error::Partition("curve endpoints must be vertices of the polygon".into()));
    }

    let rc = region_rc(p, c)?;
    // candidate pivots: R_c vertices and edge midpoints that avoid the curve
    let mut candidates: Vec<Point> = rc.vertices().to_vec();
    for (a, b) in rc.edges() {
        candidates.push(a.mid(b));
    }
    candidates.push(rc.centroid());
    let mut scored: Vec<(f64, Point)> = candidates
        .into_iter()
        .map(|m| (min_dist_to_curve(m, c), m))
        .filter(|(d, m)| *d > 10.0 * tol && m.dist(v) > 10.0 * tol)
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    if scored.is_empty() {
        return Err(Error::Partition("no cutting pivot found on R_c off the curve".into()));
    }

    let mut last_err = String::new();
    for (_, m) in scored.into_iter().take(8) {
        match try_cut(p, c, v, iv, m, tol) {
            Ok(pair) => return Ok(pair),
            Err(e) => last_err = e.to_string(),
        }
    }
    Err(Error::Partition(format!("all cutting pivots failed postconditions: {last_err}")))
}

fn try_cut(
    p: &ConvexPolygon,
    c: &Curve,
    v: Point,
    iv: usize,
    m: Point,
    tol: f64,
) -> Result<(ConvexPolygon, ConvexPolygon)> {
    let cut = Line::through(v, m)?;
    let q1 = clip_halfplane(p, &cut)?
        .ok_or_else(|| Error::Partition("cut produced an empty piece".into()))?;
    let q2 = clip_halfplane(p, &cut.flipped())?
        .ok_or_else(|| Error::Partition("cut produced an empty piece".into()))?;
    let q1 = q1.with_vertex(v)?;
    let q2 = q2.with_vertex(v)?;

    let pts = c.samples();
    let (va, vb) = c.endpoints();
    // orient: piece 1 holds the arm from the curve start
    let (p1, p2) = if q1.contains(va) && cut.signed_dist(va) > tol {
        (q1, q2)
    } else if q2.contains(va) && cut.signed_dist(va) < -tol {
        (q2, q1)
    } else {
        return Err(Error::Partition("cut does not separate the curve endpoints".into()));
    };
    if !(p2.contains(vb) && cut.signed_dist(vb).abs() > tol) {
        return Err(Error::Partition("cut does not separate the curve endpoints".into()));
    }

    // lemma postconditions
    if !p1.is_vertex(va) || !p2.is_vertex(vb) || !p1.is_vertex(v) || !p2.is_vertex(v) {
        return Err(Error::Partition("required vertices missing from the pieces".into()));
    }
    for (k, q) in pts.iter().enumerate() {
        let in1 = k <= iv;
        let (inside, outside) = if in1 { (&p1, &p2) } else { (&p2, &p1) };
        if !inside.contains(*q) {
            return Err(Error::Partition(format!("curve sample {k} escapes its piece")));
        }
        if k != iv && outside.contains(*q) && !outside.on_boundary(*q) {
            return Err(Error::Partition(format!("curve sample {k} enters the other piece")));
        }
    }
    match classify_pair(&p1, &p2) {
        PairContact::Side(a, b) => {
            if crate::geom::dist_to_segment(v, a, b) > 10.0 * tol {
                return Err(Error::Partition("shared boundary does not contain v".into()));
            }
        }
        _ => return Err(Error::Partition("pieces do not meet in a segment".into())),
    }
    let area_gap = (p1.area() + p2.area() - p.area()).abs();
    if area_gap > 1e-9 * p.area() {
        return Err(Error::Partition("pieces are not area-additive".into()));
    }
    Ok((p1, p2))
}

/// Endpoint-pair key for simplicity checking.
fn same_pair(a: &Curve, b: &Curve, tol: f64) -> bool {
    let (a0, a1) = a.endpoints();
    let (b0, b1) = b.endpoints();
    (a0.approx_eq(b0, tol) && a1.approx_eq(b1, tol))
        || (a0.approx_eq(b1, tol) && a1.approx_eq(b0, tol))
}

/// Refine a PIC set so that every curve is projectable and no two curves
/// share an endpoint pair, keeping the union of points identical. Curves are
/// split with [`split_projectable`] (plus a midpoint split for duplicate
/// endpoint pairs) and polygons with [`partition_at`]; neighbor polygons then
/// receive collinear vertices where cut endpoints land on shared sides.
pub fn refine_simple(ps: &PicSet) -> Result<PicSet> {
    let report = validate(ps);
    if !report.ok() {
        return Err(Error::Validation(report.violations.join("; ")));
    }
    let scale = ps.vertex_set().iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = point_tol(scale);

    // 1. split curves into projectable pieces
    let mut pieces: Vec<Vec<Curve>> = Vec::with_capacity(ps.curves.len());
    for c in &ps.curves {
        pieces.push(split_projectable(c)?);
    }
    // 2. duplicate endpoint pairs: split both offenders at a middle sample
    loop {
        let flat: Vec<(usize, usize)> = pieces
            .iter()
            .enumerate()
            .flat_map(|(i, v)| (0..v.len()).map(move |j| (i, j)))
            .collect();
        let mut split_one: Option<(usize, usize)> = None;
        'outer: for a in 0..flat.len() {
            for b in a + 1..flat.len() {
                let ca = &pieces[flat[a].0][flat[a].1];
                let cb = &pieces[flat[b].0][flat[b].1];
                if same_pair(ca, cb, tol) {
                    split_one = Some(flat[b]);
                    // also split the first of the pair for symmetry
                    let (i, j) = flat[a];
                    let c = pieces[i][j].clone();
                    let mid = c.samples().len() / 2;
                    let (l, r) = c.split_at_index(mid)?;
                    pieces[i].splice(j..=j, [l, r]);
                    break 'outer;
                }
            }
        }
        match split_one {
            None => break,
            Some((i, mut j)) => {
                // indices may have shifted if the first split was in the same list
                if j >= pieces[i].len() {
                    j = pieces[i].len() - 1;
                }
                let c = pieces[i][j].clone();
                let mid = c.samples().len() / 2;
                let (l, r) = c.split_at_index(mid)?;
                pieces[i].splice(j..=j, [l, r]);
            }
        }
    }

    // 3. partition polygons at the interior split points
    let mut new_curves: Vec<Curve> = Vec::new();
    let mut new_polys: Vec<ConvexPolygon> = Vec::new();
    for (i, parts) in pieces.iter().enumerate() {
        let polys = partition_pieces(&ps.mosaic.polygons[i], parts)?;
        new_curves.extend(parts.iter().cloned());
        new_polys.extend(polys);
    }

    // 4. harmonize collinear vertices across the new sides
    harmonize(&mut new_polys)?;

    let refined = PicSet::new(new_curves, Mosaic::new_unchecked(new_polys))?;
    let report = validate(&refined);
    if !report.ok() {
        return Err(Error::Partition(format!(
            "refinement failed validation: {}",
            report.violations.join("; ")
        )));
    }
    Ok(refined)
}

/// Successively apply [`partition_at`] so that every curve piece receives its
/// own convex polygon partitioning the original.
fn partition_pieces(poly0: &ConvexPolygon, parts: &[Curve]) -> Result<Vec<ConvexPolygon>> {
    if parts.len() == 1 {
        return Ok(vec![poly0.clone()]);
    }
    let mut out = Vec::with_capacity(parts.len());
    let mut poly = poly0.clone();
    for (k, piece) in parts.iter().enumerate() {
        if k + 1 == parts.len() {
            out.push(poly.clone());
            break;
        }
        let v = piece.end();
        // re-assemble the not-yet-partitioned remainder of the original
        // curve to drive the R_c construction
        let mut rest_pts: Vec<Point> = Vec::new();
        for q in parts.iter().skip(k) {
            let skip = if rest_pts.is_empty() { 0 } else { 1 };
            rest_pts.extend(q.samples().iter().skip(skip));
        }
        let rest = Curve::polyline(rest_pts)?;
        // the driver's start is the previous split point, already a vertex
        // of the running polygon after the previous partition
        poly = poly.with_vertex(rest.samples()[0])?;
        let (p_here, p_rest) = partition_at(&poly, &rest, v)?;
        out.push(p_here);
        poly = p_rest;
    }
    Ok(out)
}

/// Insert every polygon vertex lying on another polygon's side as an explicit
/// collinear vertex there, restoring the shared-full-side axiom after cuts.
fn harmonize(polys: &mut [ConvexPolygon]) -> Result<()> {
    loop {
        let all_vs: Vec<Point> =
            polys.iter().flat_map(|p| p.vertices().iter().copied()).collect();
        let mut changed = false;
        for poly in polys.iter_mut() {
            for v in &all_vs {
                if !poly.is_vertex(*v) && poly.on_boundary(*v) {
                    *poly = poly.with_vertex(*v)?;
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Split selected curves of a PIC set at interior arc-length fractions,
/// partitioning their polygons to match and harmonizing the mosaic. `plan`
/// maps curve index to strictly increasing fractions in (0,1); fractions are
/// snapped to the curve's sample grid. Returns the refined set and, per
/// original curve, the indices of its pieces in the new curve list (in the
/// original curve's direction).
pub fn split_curves(ps: &PicSet, plan: &[(usize, Vec<f64>)]) -> Result<(PicSet, Vec<Vec<usize>>)> {
    let mut pieces: Vec<Vec<Curve>> = ps.curves.iter().map(|c| vec![c.clone()]).collect();
    for (idx, fractions) in plan {
        let c = &ps.curves[*idx];
        let mut parts: Vec<Curve> = Vec::new();
        let mut rest = c.clone();
        for frac in fractions {
            // pieces keep the original absolute parameter grid, so the
            // original curve's parameter can be used on the remainder
            let t = c.param_at_arc_fraction(*frac);
            let (l, r) = crate::curve::split_at(&rest, t)?;
            parts.push(l);
            rest = r;
        }
        parts.push(rest);
        pieces[*idx] = parts;
    }

    let mut new_curves: Vec<Curve> = Vec::new();
    let mut new_polys: Vec<ConvexPolygon> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(ps.curves.len());
    for (i, parts) in pieces.iter().enumerate() {
        let polys = partition_pieces(&ps.mosaic.polygons[i], parts)?;
        let start = new_curves.len();
        groups.push((start..start + parts.len()).collect());
        new_curves.extend(parts.iter().cloned());
        new_polys.extend(polys);
    }
    harmonize(&mut new_polys)?;
    let refined = PicSet::new(new_curves, Mosaic::new_unchecked(new_polys))?;
    let report = validate(&refined);
    if !report.ok() {
        return Err(Error::Partition(format!(
            "curve splitting failed validation: {}",
            report.violations.join("; ")
        )));
    }
    Ok((refined, groups))
}

/// Replace each curve with a resampled copy (same geometry, new grid density)
/// without re-deriving polygons. Validation is re-checked.
pub fn resample_curves(ps: &PicSet, n: usize) -> Result<PicSet> {
    let curves: Vec<Curve> =
        ps.curves.iter().map(|c| c.resample(n)).collect::<Result<_>>()?;
    let out = PicSet { curves, mosaic: ps.mosaic.clone() };
    let report = validate(&out);
    if !report.ok() {
        return Err(Error::Validation(format!(
            "resampling broke validation: {}",
            report.violations.join("; ")
        )));
    }
    Ok(out)
}

/// Is the PIC set already simple (no duplicate endpoint pairs) with every
/// curve projectable?
pub fn is_simple_projectable(ps: &PicSet) -> Result<bool> {
    let scale = ps.vertex_set().iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = point_tol(scale);
    for (i, c) in ps.curves.iter().enumerate() {
        if !is_projectable(c)? {
            return Ok(false);
        }
        for d in ps.curves.iter().skip(i + 1) {
            if same_pair(c, d, tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Union-find over polygon / curve indices.
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn components(&mut self) -> usize {
        let n = self.parent.len();
        let mut roots = std::collections::HashSet::new();
        for i in 0..n {
            roots.insert(self.find(i));
        }
        roots.len()
    }
}
