//! Graph view of PIC sets: extraction, subdivision, smoothing, graph
//! homeomorphism, matched subdivisions and the induced point homeomorphism.

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::func::PlaneFunction;
use crate::geom::{point_tol, Point};
use crate::mosaic::{refine_simple, split_curves, validate, PicSet};
use num_complex::Complex64;

/// A loop-free multigraph drawn in the plane: vertices are curve endpoints,
/// one edge per curve.
#[derive(Debug, Clone)]
pub struct PicGraph {
    vertices: Vec<Point>,
    /// (vertex index, vertex index, curve id)
    edges: Vec<(usize, usize, usize)>,
}

impl PicGraph {
    pub fn new(vertices: Vec<Point>, edges: Vec<(usize, usize, usize)>) -> Result<Self> {
        for &(u, v, _) in &edges {
            if u >= vertices.len() || v >= vertices.len() {
                return Err(Error::Homeo("edge references a missing vertex".into()));
            }
            if u == v {
                return Err(Error::Homeo("loops are not allowed".into()));
            }
        }
        Ok(PicGraph { vertices, edges })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b, _)| a == v || b == v).count()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.vertices.len()).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }
}

/// Vertices are distinct curve endpoints, one edge per curve.
pub fn extract_graph(ps: &PicSet) -> Result<PicGraph> {
    let scale = ps.vertex_set().iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = point_tol(scale);
    let mut vertices: Vec<Point> = Vec::new();
    let find = |p: Point, vertices: &mut Vec<Point>| -> usize {
        if let Some(i) = vertices.iter().position(|q| q.approx_eq(p, tol)) {
            i
        } else {
            vertices.push(p);
            vertices.len() - 1
        }
    };
    let mut edges = Vec::with_capacity(ps.curves().len());
    for (cid, c) in ps.curves().iter().enumerate() {
        let u = find(c.start(), &mut vertices);
        let v = find(c.end(), &mut vertices);
        edges.push((u, v, cid));
    }
    PicGraph::new(vertices, edges)
}

/// Replace edge `edge` with two edges meeting at `split`, increasing the
/// vertex count by one. The split point must not coincide with an existing
/// vertex.
pub fn subdivide_edge(g: &PicGraph, edge: usize, split: Point) -> Result<PicGraph> {
    if edge >= g.edges.len() {
        return Err(Error::InvalidParameter("edge index out of range".into()));
    }
    let scale = g.vertices.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = point_tol(scale);
    if g.vertices.iter().any(|q| q.approx_eq(split, tol)) {
        return Err(Error::Homeo("split point is an existing vertex".into()));
    }
    let (u, v, cid) = g.edges[edge];
    let mut vertices = g.vertices.clone();
    vertices.push(split);
    let w = vertices.len() - 1;
    let mut edges = g.edges.clone();
    let next_id = edges.iter().map(|e| e.2).max().unwrap_or(0) + 1;
    edges[edge] = (u, w, cid);
    edges.push((w, v, next_id));
    PicGraph::new(vertices, edges)
}

/// A smoothed edge together with the ordered original edges it replaces.
/// Each chain element is (edge index in the input graph, traversed forward?).
#[derive(Debug, Clone)]
pub struct Smoothed {
    pub graph: PicGraph,
    pub chains: Vec<Vec<(usize, bool)>>,
}

/// Iteratively suppress degree-2 vertices whose two incident edges lead to
/// distinct neighbors; a pure cycle stops at a 2-vertex dipole (the loop
/// guard keeps the multigraph loop-free).
pub fn smooth_with_chains(g: &PicGraph) -> Smoothed {
    // working edges: (u, v, chain from u to v)
    let mut edges: Vec<(usize, usize, Vec<(usize, bool)>)> = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v, _))| (u, v, vec![(i, true)]))
        .collect();
    let n = g.vertices.len();
    loop {
        let mut deg = vec![0usize; n];
        for &(u, v, _) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut suppressed = false;
        for w in 0..n {
            if deg[w] != 2 {
                continue;
            }
            let inc: Vec<usize> = edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.0 == w || e.1 == w)
                .map(|(i, _)| i)
                .collect();
            if inc.len() != 2 {
                continue; // both endpoints at w would be a loop; guarded out
            }
            let (i1, i2) = (inc[0], inc[1]);
            let other = |e: &(usize, usize, Vec<(usize, bool)>)| if e.0 == w { e.1 } else { e.0 };
            let a = other(&edges[i1]);
            let b = other(&edges[i2]);
            if a == b {
                // loop guard: suppression would close a loop; a pure cycle
                // therefore stops at a 2-vertex dipole
                continue;
            }
            // orient chain i1 from a to w and i2 from w to b, then join
            let mut chain: Vec<(usize, bool)> = Vec::new();
            let e1 = edges[i1].clone();
            if e1.0 == a {
                chain.extend(e1.2.iter().copied());
            } else {
                chain.extend(e1.2.iter().rev().map(|&(id, f)| (id, !f)));
            }
            let e2 = edges[i2].clone();
            if e2.0 == w {
                chain.extend(e2.2.iter().copied());
            } else {
                chain.extend(e2.2.iter().rev().map(|&(id, f)| (id, !f)));
            }
            let (hi, lo) = if i1 > i2 { (i1, i2) } else { (i2, i1) };
            edges.remove(hi);
            edges.remove(lo);
            edges.push((a, b, chain));
            suppressed = true;
            break;
        }
        if !suppressed {
            break;
        }
    }
    // compact vertex indices to those still used
    let mut used: Vec<usize> = Vec::new();
    for &(u, v, _) in &edges {
        for x in [u, v] {
            if !used.contains(&x) {
                used.push(x);
            }
        }
    }
    used.sort_unstable();
    let remap = |x: usize| used.iter().position(|&y| y == x).unwrap();
    let vertices: Vec<Point> = used.iter().map(|&i| g.vertices[i]).collect();
    let mut chains = Vec::with_capacity(edges.len());
    let mut new_edges = Vec::with_capacity(edges.len());
    for (k, (u, v, chain)) in edges.into_iter().enumerate() {
        new_edges.push((remap(u), remap(v), k));
        chains.push(chain);
    }
    Smoothed { graph: PicGraph { vertices, edges: new_edges }, chains }
}

/// Canonical representative of the graph-homeomorphism class.
pub fn smooth(g: &PicGraph) -> PicGraph {
    smooth_with_chains(g).graph
}

/// Vertex and edge matching between two smoothed graphs.
#[derive(Debug, Clone)]
pub struct GraphMatching {
    /// vertex i of the first smoothed graph maps to vertex_map[i] of the second
    pub vertex_map: Vec<usize>,
    /// (edge index in first, edge index in second)
    pub edge_map: Vec<(usize, usize)>,
}

/// Multiset of edge multiplicities between mapped vertex pairs must agree.
fn multiplicity(g: &PicGraph, u: usize, v: usize) -> usize {
    g.edges
        .iter()
        .filter(|&&(a, b, _)| (a == u && b == v) || (a == v && b == u))
        .count()
}

/// Backtracking multigraph isomorphism with degree pruning; instances here
/// are tiny.
fn isomorphism(g1: &PicGraph, g2: &PicGraph) -> Option<GraphMatching> {
    let n = g1.vertices.len();
    if n != g2.vertices.len()
        || g1.edges.len() != g2.edges.len()
        || g1.degree_sequence() != g2.degree_sequence()
    {
        return None;
    }
    let deg1: Vec<usize> = (0..n).map(|v| g1.degree(v)).collect();
    let deg2: Vec<usize> = (0..n).map(|v| g2.degree(v)).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn rec(
        i: usize,
        n: usize,
        g1: &PicGraph,
        g2: &PicGraph,
        deg1: &[usize],
        deg2: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == n {
            return true;
        }
        for cand in 0..n {
            if used[cand] || deg1[i] != deg2[cand] {
                continue;
            }
            let mut ok = true;
            for j in 0..i {
                if multiplicity(g1, i, j) != multiplicity(g2, cand, map[j]) {
                    ok = false;
                    break;
                }
            }
            if ok {
                map[i] = cand;
                used[cand] = true;
                if rec(i + 1, n, g1, g2, deg1, deg2, map, used) {
                    return true;
                }
                used[cand] = false;
                map[i] = usize::MAX;
            }
        }
        false
    }

    if !rec(0, n, g1, g2, &deg1, &deg2, &mut map, &mut used) {
        return None;
    }
    // pair parallel edges between mapped vertex pairs in index order
    let mut taken = vec![false; g2.edges.len()];
    let mut edge_map = Vec::with_capacity(g1.edges.len());
    for (i, &(u, v, _)) in g1.edges.iter().enumerate() {
        let (mu, mv) = (map[u], map[v]);
        let j = g2
            .edges
            .iter()
            .enumerate()
            .position(|(j, &(a, b, _))| {
                !taken[j] && ((a == mu && b == mv) || (a == mv && b == mu))
            })?;
        taken[j] = true;
        edge_map.push((i, j));
    }
    Some(GraphMatching { vertex_map: map, edge_map })
}

/// Smooth both graphs and search for a multigraph isomorphism of the results.
pub fn is_homeomorphic(g1: &PicGraph, g2: &PicGraph) -> (bool, Option<GraphMatching>) {
    let s1 = smooth(g1);
    let s2 = smooth(g2);
    match isomorphism(&s1, &s2) {
        Some(m) => (true, Some(m)),
        None => (false, None),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A matched pair of PIC sets: curve lists of equal length with index `i`
/// pairing matched curves; `reversed` says the pair is traversed in opposite
/// intrinsic directions.
#[derive(Debug, Clone)]
pub struct MatchedPair {
    pub sigma: PicSet,
    pub tau: PicSet,
    /// (curve index in sigma, curve index in tau, reversed)
    pub pairs: Vec<(usize, usize, bool)>,
}

/// Refine two graph-homeomorphic PIC sets to a common curve decomposition:
/// matched smoothed edges have their chains subdivided to the least common
/// multiple of their lengths (at arc-length-proportional points, with mosaic
/// polygons split by the Partition Lemma), then both sides are resampled so
/// matched curves carry identical sample counts.
pub fn match_subdivisions(ps1: &PicSet, ps2: &PicSet) -> Result<MatchedPair> {
    let rs1 = refine_simple(ps1)?;
    let rs2 = refine_simple(ps2)?;
    let g1 = extract_graph(&rs1)?;
    let g2 = extract_graph(&rs2)?;
    let s1 = smooth_with_chains(&g1);
    let s2 = smooth_with_chains(&g2);
    let matching = isomorphism(&s1.graph, &s2.graph)
        .ok_or_else(|| Error::Homeo("PIC sets are not graph homeomorphic".into()))?;

    // subdivision plan: chain of length k grows to lcm(k1,k2) pieces
    let mut plan1: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut plan2: Vec<(usize, Vec<f64>)> = Vec::new();
    for &(e1, e2) in &matching.edge_map {
        let (k1, k2) = (s1.chains[e1].len(), s2.chains[e2].len());
        let l = lcm(k1, k2);
        let per1 = l / k1;
        let per2 = l / k2;
        if per1 > 1 {
            let fr: Vec<f64> = (1..per1).map(|j| j as f64 / per1 as f64).collect();
            for &(cid, _) in &s1.chains[e1] {
                plan1.push((cid, fr.clone()));
            }
        }
        if per2 > 1 {
            let fr: Vec<f64> = (1..per2).map(|j| j as f64 / per2 as f64).collect();
            for &(cid, _) in &s2.chains[e2] {
                plan2.push((cid, fr.clone()));
            }
        }
    }
    let (m1, groups1) = split_curves(&rs1, &plan1)?;
    let (m2, groups2) = split_curves(&rs2, &plan2)?;

    // walk each matched smoothed edge, orienting both chains from the mapped
    // start vertex, and zip the pieces
    let mut pairs: Vec<(usize, usize, bool)> = Vec::new();
    for &(e1, e2) in &matching.edge_map {
        let (u1, _v1, _) = s1.graph.edges()[e1];
        let (u2, _v2, _) = s2.graph.edges()[e2];
        // does edge e2 start at the image of e1's start?
        let forward2 = u2 == matching.vertex_map[u1];
        let seq1 = chain_pieces(&s1.chains[e1], &groups1, true);
        let seq2 = chain_pieces(&s2.chains[e2], &groups2, forward2);
        if seq1.len() != seq2.len() {
            return Err(Error::Homeo("matched chains refined to different lengths".into()));
        }
        for ((i, r1), (j, r2)) in seq1.into_iter().zip(seq2) {
            pairs.push((i, j, r1 != r2));
        }
    }

    // equal sample counts per pair, so the induced map is exact on samples
    let mut c1: Vec<Curve> = m1.curves().to_vec();
    let mut c2: Vec<Curve> = m2.curves().to_vec();
    for &(i, j, _) in &pairs {
        let n = c1[i].samples().len().max(c2[j].samples().len()).max(17);
        c1[i] = c1[i].resample(n)?;
        c2[j] = c2[j].resample(n)?;
    }
    let m1 = PicSet::new(c1, m1.mosaic().clone())?;
    let m2 = PicSet::new(c2, m2.mosaic().clone())?;
    for m in [&m1, &m2] {
        let rep = validate(m);
        if !rep.ok() {
            return Err(Error::Homeo(format!(
                "matched refinement failed validation: {}",
                rep.violations.join("; ")
            )));
        }
    }
    Ok(MatchedPair { sigma: m1, tau: m2, pairs })
}

/// Final-curve indices of a chain, traversed forward or backward, with the
/// traversal direction of each piece relative to its intrinsic direction.
fn chain_pieces(
    chain: &[(usize, bool)],
    groups: &[Vec<usize>],
    forward: bool,
) -> Vec<(usize, bool)> {
    let mut out: Vec<(usize, bool)> = Vec::new();
    for &(cid, fwd) in chain {
        let g = &groups[cid];
        if fwd {
            out.extend(g.iter().map(|&i| (i, false)));
        } else {
            out.extend(g.iter().rev().map(|&i| (i, true)));
        }
    }
    if forward {
        out
    } else {
        out.into_iter().rev().map(|(i, r)| (i, !r)).collect()
    }
}

/// A homeomorphism between matched PIC sets: per-curve arc-length affine
/// reparameterization; sample `k` of a sigma curve maps to sample `k` (or
/// `n-1-k` when reversed) of its tau partner.
#[derive(Debug, Clone)]
pub struct HomeoMap {
    pub matched: MatchedPair,
}

/// Verify endpoint consistency and package the matched pair as a point map.
pub fn build_homeo(matched: &MatchedPair) -> Result<HomeoMap> {
    let scale = matched
        .sigma
        .vertex_set()
        .iter()
        .chain(matched.tau.vertex_set().iter())
        .map(|p| p.norm())
        .fold(1.0, f64::max);
    let tol = point_tol(scale);
    // shared sigma endpoints must map to a single tau point
    let mut assoc: Vec<(Point, Point)> = Vec::new();
    for &(i, j, rev) in &matched.pairs {
        let cs = &matched.sigma.curves()[i];
        let ct = &matched.tau.curves()[j];
        if cs.samples().len() != ct.samples().len() {
            return Err(Error::Homeo("matched curves have different sample counts".into()));
        }
        let (s0, s1) = cs.endpoints();
        let (t0, t1) = ct.endpoints();
        let ends = if rev { [(s0, t1), (s1, t0)] } else { [(s0, t0), (s1, t1)] };
        for (a, b) in ends {
            if let Some((_, prev)) = assoc.iter().find(|(p, _)| p.approx_eq(a, tol)) {
                if !prev.approx_eq(b, tol) {
                    return Err(Error::Homeo(
                        "orientation conflict at a shared endpoint".into(),
                    ));
                }
            } else {
                assoc.push((a, b));
            }
        }
    }
    Ok(HomeoMap { matched: matched.clone() })
}

impl HomeoMap {
    fn locate(curves: &[Curve], p: Point) -> Result<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None; // (curve, fraction, dist)
        for (i, c) in curves.iter().enumerate() {
            let pts = c.samples();
            let lens = c.arc_lengths();
            let total = lens[lens.len() - 1];
            for w in 0..pts.len() - 1 {
                let (a, b) = (pts[w], pts[w + 1]);
                let ab = b.sub(a);
                let t = (p.sub(a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
                let proj = a.add(ab.scale(t));
                let d = p.dist(proj);
                let frac = (lens[w] + (lens[w + 1] - lens[w]) * t) / total;
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((i, frac, d));
                }
            }
        }
        let (i, frac, d) = best.ok_or_else(|| Error::Empty("no curves".into()))?;
        let scale = curves[i].samples().iter().map(|p| p.norm()).fold(1.0, f64::max);
        if d > 1e-6 * scale {
            return Err(Error::Homeo("point does not lie on the PIC set".into()));
        }
        Ok((i, frac))
    }

    /// h: sigma -> tau.
    pub fn apply(&self, p: Point) -> Result<Point> {
        let (i, frac) = Self::locate(self.matched.sigma.curves(), p)?;
        let &(_, j, rev) = self
            .matched
            .pairs
            .iter()
            .find(|&&(a, _, _)| a == i)
            .ok_or_else(|| Error::Homeo("unmatched sigma curve".into()))?;
        let f = if rev { 1.0 - frac } else { frac };
        Ok(self.matched.tau.curves()[j].point_at_arc_fraction(f))
    }

    /// h⁻¹: tau -> sigma.
    pub fn invert(&self, q: Point) -> Result<Point> {
        let (j, frac) = Self::locate(self.matched.tau.curves(), q)?;
        let &(i, _, rev) = self
            .matched
            .pairs
            .iter()
            .find(|&&(_, b, _)| b == j)
            .ok_or_else(|| Error::Homeo("unmatched tau curve".into()))?;
        let f = if rev { 1.0 - frac } else { frac };
        Ok(self.matched.sigma.curves()[i].point_at_arc_fraction(f))
    }
}

/// Value pairs (tau sample, f(sigma sample)) for the pushforward table.
fn transport_table(
    hm: &HomeoMap,
    f: &PlaneFunction,
    sigma_to_tau: bool,
) -> Result<Vec<(Point, Complex64)>> {
    let mut entries: Vec<(Point, Complex64)> = Vec::new();
    for &(i, j, rev) in &hm.matched.pairs {
        let cs = hm.matched.sigma.curves()[i].samples();
        let ct = hm.matched.tau.curves()[j].samples();
        let n = cs.len();
        for k in 0..n {
            let kt = if rev { n - 1 - k } else { k };
            let (key, src) = if sigma_to_tau { (ct[kt], cs[k]) } else { (cs[k], ct[kt]) };
            entries.push((key, f.eval(src)?));
        }
    }
    Ok(entries)
}

/// Pushforward Φ(f) = f ∘ h⁻¹: a function on tau from a function on sigma,
/// tabulated exactly on the matched sample grids.
pub fn pushforward(hm: &HomeoMap, f: &PlaneFunction) -> Result<PlaneFunction> {
    PlaneFunction::from_samples(transport_table(hm, f, true)?)
}

/// Pullback f ∘ h: a function on sigma from a function on tau.
pub fn pullback(hm: &HomeoMap, f: &PlaneFunction) -> Result<PlaneFunction> {
    PlaneFunction::from_samples(transport_table(hm, f, false)?)
}
