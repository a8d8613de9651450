//! Acceptance suite: one test per acceptance criterion, each printing a
//! single PASS line with its headline numbers and elapsed time.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use picbv::acfun::cutoff_polygon;
use picbv::curve::{pvar, Curve};
use picbv::geom::point_tol;
use picbv::mosaic::{partition_at, split_curves, validate, Mosaic, PicSet};
use picbv::picgraph::{build_homeo, extract_graph, is_homeomorphic, match_subdivisions};
use picbv::picnorm::{
    bv_bracket, bv_bracket_with_hints, direct_sum_join, direct_sum_split,
    equivalence_constants, pic_norm, transport_norm_check,
};
use picbv::specfile::{load_spec, parse_spec};
use picbv::variation::{cvar, var_lower, vf_exact, vf_random_oracle, PointList, SearchBudget};
use picbv::{Affine, ConvexPolygon, PlaneFunction, Point, Poly2};

fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn fixture(json: &str) -> picbv::LoadedSpec {
    load_spec(&parse_spec(json).expect("fixture parses"), 64).expect("fixture loads")
}

/// Random polynomial of total degree ≤ `deg` with coefficients in [-1, 1]².
fn random_poly(rng: &mut ChaCha8Rng, deg: u32) -> PlaneFunction {
    let mut terms = Vec::new();
    for i in 0..=deg {
        for j in 0..=(deg - i) {
            terms.push((i, j, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        }
    }
    PlaneFunction::poly(Poly2::new(terms))
}

/// A kite with the segment `a`–`b` as its diagonal.
fn kite(a: Point, b: Point, w: f64) -> ConvexPolygon {
    let mid = a.mid(b);
    let n = b.sub(a).perp().normalize().unwrap();
    ConvexPolygon::new(vec![a, mid.add(n.scale(-w)), b, mid.add(n.scale(w))]).unwrap()
}

/// Random zigzag chain of `m` segments in kites; a valid connected PIC set.
fn chain_picset(rng: &mut ChaCha8Rng, m: usize, samples: usize) -> PicSet {
    let mut pts = vec![pt(0.0, 0.0)];
    let mut sign = 1.0;
    for _ in 0..m {
        let last = *pts.last().unwrap();
        let dx = rng.gen_range(0.8..1.2);
        let dy = sign * rng.gen_range(0.5..1.2);
        sign = -sign;
        pts.push(pt(last.x + dx, last.y + dy));
    }
    let mut curves = Vec::new();
    let mut polys = Vec::new();
    for seg in pts.windows(2) {
        curves.push(Curve::segment(seg[0], seg[1], samples).unwrap());
        polys.push(kite(seg[0], seg[1], 0.1));
    }
    let ps = PicSet::new(curves, Mosaic::new(polys).unwrap()).unwrap();
    assert!(validate(&ps).ok());
    ps
}

/// Random projectable circular arc (sweep < π) inside a parallelogram hull
/// whose only boundary contact with the arc is at the endpoint vertices.
fn arc_picset(rng: &mut ChaCha8Rng, samples: usize) -> PicSet {
    let theta0 = rng.gen_range(0.0..std::f64::consts::TAU);
    let sweep = rng.gen_range(0.4..2.0);
    let theta1 = theta0 + sweep;
    let c = Curve::circular_arc(pt(0.0, 0.0), 1.0, theta0, theta1, samples).unwrap();
    let (a, b) = c.endpoints();
    let arc_mid = c.point_at_arc_fraction(0.5);
    let u = arc_mid.sub(a.mid(b)).normalize().unwrap();
    let d = 1.0 - (sweep / 2.0).cos() + 0.3; // sagitta + margin
    let hull =
        ConvexPolygon::new(vec![a, b, b.add(u.scale(d)), a.add(u.scale(d))]).unwrap();
    let ps = PicSet::new(vec![c], Mosaic::new(vec![hull]).unwrap()).unwrap();
    assert!(validate(&ps).ok(), "{:?}", validate(&ps).violations);
    ps
}

const BAD_BV_EX: &str = include_str!("../../../fixtures/bad_bv_ex.json");
const SIGMA: &str = include_str!("../../../fixtures/pic_fig_sigma.json");
const TAU: &str = include_str!("../../../fixtures/pic_fig_tau.json");
const PLUS_SIGN: &str = include_str!("../../../fixtures/plus_sign.json");
const SEGMENT: &str = include_str!("../../../fixtures/segment.json");

#[test]
fn acceptance_1_bad_bv_example() {
    let t = Instant::now();
    let loaded = fixture(BAD_BV_EX);
    let f = &loaded.functions["red_indicator"];

    let n = pic_norm(f, &loaded.picset).unwrap();
    assert!((n - 2.0).abs() <= 1e-9, "pic_norm {n}");

    let dashed = loaded.lists["dashed"].clone();
    let (vf, _) = vf_exact(&dashed);
    assert_eq!(vf, 1, "dashed list variation factor");

    let budget = SearchBudget { restarts: 4, iters: 60, ..SearchBudget::default() };
    let bracket = bv_bracket_with_hints(f, &loaded.picset, &budget, &[dashed]).unwrap();
    assert!(bracket.lower >= 6.0 - 1e-9, "bv lower {}", bracket.lower);
    assert!(bracket.lower <= bracket.upper + 1e-9);

    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 5.0, "took {secs:.2}s");
    println!(
        "acceptance 1: PASS — pic_norm {n:.12}, bv lower {:.12}, vf(dashed) {vf} ({secs:.2}s)",
        bracket.lower
    );
}

#[test]
fn acceptance_2_variation_vs_pvar() {
    let t = Instant::now();
    let square = ConvexPolygon::new(vec![pt(0., 0.), pt(1., 0.), pt(1., 1.), pt(0., 1.)]).unwrap();
    let parab = PicSet::new(
        vec![Curve::parabolic_arc(pt(0., 0.), pt(0.5, 0.0), pt(1., 1.), 64).unwrap()],
        Mosaic::new(vec![square]).unwrap(),
    )
    .unwrap();
    let semi_hull =
        ConvexPolygon::new(vec![pt(0., 0.), pt(1., 0.), pt(1.2, 1.), pt(-0.2, 1.)]).unwrap();
    let semi = PicSet::new(
        vec![Curve::circular_arc(pt(0.5, 0.), 0.5, std::f64::consts::PI, 0.0, 64).unwrap()],
        Mosaic::new(vec![semi_hull]).unwrap(),
    )
    .unwrap();

    let budget = SearchBudget { restarts: 2, iters: 50, max_len: 6, ..SearchBudget::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_ratio: f64 = 0.0;
    for ps in [&parab, &semi] {
        assert!(validate(ps).ok());
        let c = &ps.curves()[0];
        let full = PointList::new(c.samples().to_vec()).unwrap();
        let (vf_full, _) = vf_exact(&full);
        assert!(vf_full <= 2, "convex projectable curve crossed {vf_full} times");
        for _ in 0..25 {
            let f = random_poly(&mut rng, 3);
            let pv = pvar(&f, c).unwrap();
            let cv = cvar(&f, &full).unwrap();
            assert!(cv / vf_full as f64 <= pv + 1e-9, "cvar/vf {cv} vs pvar {pv}");
            let vl = var_lower(&f, c.samples(), &budget).unwrap();
            assert!(vl.value >= pv / 2.0 - 1e-9, "var_lower {} vs pvar/2 {}", vl.value, pv / 2.0);
            if pv > 0.0 {
                worst_ratio = worst_ratio.max(vl.value / pv);
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 60.0, "took {secs:.2}s");
    println!("acceptance 2: PASS — 50 random functions on 2 curves, var_lower/pvar up to {worst_ratio:.3} ({secs:.2}s)");
}

#[test]
fn acceptance_3_equivalence_constants() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let m = rng.gen_range(1..=6);
        let ps = chain_picset(&mut rng, m, 17);
        let c = equivalence_constants(&ps).unwrap();
        assert_eq!(c.m, m);
        assert_eq!(c.s, 4);
        assert_eq!(c.k_sigma, (m + 2 * (m - 1) * 4) as f64, "K_sigma for M={m}");
        assert_eq!(c.upper_factor, 2.0 * m as f64);
    }

    let budget = SearchBudget { restarts: 2, iters: 40, max_len: 5, ..SearchBudget::default() };
    for case in 0..200 {
        let m = rng.gen_range(1..=4);
        let ps = chain_picset(&mut rng, m, 17);
        let f = random_poly(&mut rng, 2);
        let bracket = bv_bracket(&f, &ps, &budget).unwrap();
        assert!(
            bracket.lower <= bracket.upper + 1e-9,
            "case {case}: sandwich violated, {} > {}",
            bracket.lower,
            bracket.upper
        );
    }
    let secs = t.elapsed().as_secs_f64();
    println!("acceptance 3: PASS — K_sigma exact on 20 mosaics, sandwich held on 200 fuzz cases ({secs:.2}s)");
}

#[test]
fn acceptance_4_homeomorphism_transport() {
    let t = Instant::now();
    let sigma = fixture(SIGMA);
    let tau = fixture(TAU);

    let g_sigma = extract_graph(&sigma.picset).unwrap();
    let g_tau = extract_graph(&tau.picset).unwrap();
    let (homeo, _) = is_homeomorphic(&g_sigma, &g_tau);
    assert!(homeo, "paper pair must be homeomorphic");

    let matched = match_subdivisions(&sigma.picset, &tau.picset).unwrap();
    let hm = build_homeo(&matched).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let f = random_poly(&mut rng, 3);
        let n = pic_norm(&f, &hm.matched.sigma).unwrap();
        let residual = transport_norm_check(&hm, &f).unwrap();
        assert!(residual <= 1e-9 * (1.0 + n), "residual {residual} at norm {n}");
        worst = worst.max(residual);
    }

    let plus = fixture(PLUS_SIGN);
    let seg = fixture(SEGMENT);
    let (negative, _) = is_homeomorphic(
        &extract_graph(&plus.picset).unwrap(),
        &extract_graph(&seg.picset).unwrap(),
    );
    assert!(!negative, "plus sign vs segment must not be homeomorphic");

    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 10.0, "took {secs:.2}s");
    println!("acceptance 4: PASS — paper pair homeomorphic, worst transport residual {worst:.3e}, negative control rejected ({secs:.2}s)");
}

#[test]
fn acceptance_5_partition_lemma() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..50 {
        let ps = arc_picset(&mut rng, 33);
        let c = &ps.curves()[0];
        let p = &ps.mosaic().polygons()[0];
        let iv = rng.gen_range(1..c.samples().len() - 1);
        let v = c.samples()[iv];
        let (p1, p2) = partition_at(p, c, v)
            .unwrap_or_else(|e| panic!("case {case}: partition failed: {e}"));

        // postconditions, re-checked from outside
        assert!(p1.is_vertex(v) && p2.is_vertex(v), "case {case}: v not a vertex of both");
        let gap = (p.area() - p1.area() - p2.area()).abs();
        assert!(gap <= 1e-9 * p.area(), "case {case}: area gap {gap}");
        let tol = point_tol(p.scale_hint());
        for (arm, piece) in [(&c.samples()[..=iv], &p1), (&c.samples()[iv..], &p2)] {
            for q in arm.iter() {
                assert!(
                    piece.inner_dist(*q) >= -tol,
                    "case {case}: arm point {q:?} escapes its piece"
                );
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    println!("acceptance 5: PASS — 50 random partition triples, zero failures ({secs:.2}s)");
}

#[test]
fn acceptance_6_cutoff_variation() {
    let t = Instant::now();
    let square = ConvexPolygon::new(vec![pt(0., 0.), pt(1., 0.), pt(1., 1.), pt(0., 1.)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for eps in [0.05, 0.1] {
        let h = cutoff_polygon(&square, eps).unwrap();
        for _ in 0..20 {
            let center = pt(rng.gen_range(-1.0..2.0), rng.gen_range(-1.0..2.0));
            let r = rng.gen_range(0.3..2.0);
            let theta0 = rng.gen_range(0.0..std::f64::consts::TAU);
            let sweep = rng.gen_range(0.5..3.0);
            let c = Curve::circular_arc(center, r, theta0, theta0 + sweep, 64).unwrap();
            let v = pvar(&h, &c).unwrap();
            assert!(v <= 8.0 + 1e-9, "pvar {v} for eps {eps}");
            worst = worst.max(v);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    println!("acceptance 6: PASS — cutoff pvar ≤ 8 on 40 curve/eps cases, max {worst:.3} ({secs:.2}s)");
}

#[test]
fn acceptance_7_invariant_fuzz() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // (a) vf is monotone under taking sublists (1000 cases)
    for case in 0..1000 {
        let n = rng.gen_range(3..=7);
        let pts: Vec<Point> =
            (0..n).map(|_| pt(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let Ok(full) = PointList::new(pts.clone()) else { continue };
        let sub: Vec<Point> = pts.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        let Ok(sub) = PointList::new(sub) else { continue };
        let (vf_full, _) = vf_exact(&full);
        let (vf_sub, _) = vf_exact(&sub);
        assert!(vf_sub <= vf_full, "case {case}: sublist vf {vf_sub} > {vf_full}");
    }

    // (b) vf is invariant under well-conditioned affine maps (500 cases)
    for case in 0..500 {
        let n = rng.gen_range(2..=6);
        let pts: Vec<Point> =
            (0..n).map(|_| pt(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let Ok(list) = PointList::new(pts.clone()) else { continue };
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let s = rng.gen_range(0.5..2.0);
        let map = Affine::new(
            [s * theta.cos(), -s * theta.sin(), s * theta.sin(), s * theta.cos()],
            pt(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
        )
        .unwrap();
        let mapped = PointList::new(pts.iter().map(|&p| map.apply(p)).collect()).unwrap();
        let (a, _) = vf_exact(&list);
        let (b, _) = vf_exact(&mapped);
        assert_eq!(a, b, "case {case}: vf changed under affine map");
    }

    // (c) pic_norm is invariant under grid-preserving refinement (100 cases)
    for case in 0..100 {
        let m = rng.gen_range(1..=3);
        let ps = if case % 2 == 0 {
            chain_picset(&mut rng, m, 33)
        } else {
            arc_picset(&mut rng, 33)
        };
        let f = random_poly(&mut rng, 2);
        let n1 = pic_norm(&f, &ps).unwrap();
        let idx = rng.gen_range(0..ps.curves().len());
        let fr = rng.gen_range(0.2..0.8);
        let (refined, _) = split_curves(&ps, &[(idx, vec![fr])])
            .unwrap_or_else(|e| panic!("case {case}: split failed: {e}"));
        let n2 = pic_norm(&f, &refined).unwrap();
        assert!(
            (n1 - n2).abs() <= 1e-9 * (1.0 + n1),
            "case {case}: pic_norm moved {n1} → {n2}"
        );
    }

    // (d) vf_exact dominates a randomized-line oracle (500 cases × 1e5 lines)
    for case in 0..500 {
        let n = rng.gen_range(2..=6);
        let pts: Vec<Point> =
            (0..n).map(|_| pt(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let Ok(list) = PointList::new(pts) else { continue };
        let (vf, _) = vf_exact(&list);
        let oracle = vf_random_oracle(&list, 100_000, case as u64);
        assert!(vf >= oracle, "case {case}: vf {vf} below oracle {oracle}");
    }

    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 300.0, "took {secs:.2}s");
    println!("acceptance 7: PASS — 1000 sublist + 500 affine + 100 refinement + 500 oracle cases ({secs:.2}s)");
}

#[test]
fn acceptance_8_direct_sums() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..50 {
        let (mp, mq) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let ps_p = chain_picset(&mut rng, mp, 17);
        // shift the second component far to the right so the parts are disjoint
        let shift = Affine::new([1.0, 0.0, 0.0, 1.0], pt(20.0, 0.0)).unwrap();
        let base = chain_picset(&mut rng, mq, 17);
        let curves: Vec<Curve> =
            base.curves().iter().map(|c| c.transform(&shift).unwrap()).collect();
        let polys: Vec<ConvexPolygon> = base
            .mosaic()
            .polygons()
            .iter()
            .map(|p| {
                ConvexPolygon::new(p.vertices().iter().map(|&v| shift.apply(v)).collect())
                    .unwrap()
            })
            .collect();
        let ps_q = PicSet::new(curves, Mosaic::new(polys).unwrap()).unwrap();

        let f = random_poly(&mut rng, 2);
        let (fp, fq) = direct_sum_split(&f, &ps_p, &ps_q).unwrap();
        let joined = direct_sum_join(&fp, &ps_p, &fq, &ps_q).unwrap();
        for p in ps_p.all_samples().into_iter().chain(ps_q.all_samples()) {
            let a = joined.eval(p).unwrap();
            let b = f.eval(p).unwrap();
            assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()), "case {case}: round trip at {p:?}");
        }

        // ‖·‖ of the direct sum: joint sup plus the total curve variation
        let np = pic_norm(&fp, &ps_p).unwrap();
        let nq = pic_norm(&fq, &ps_q).unwrap();
        let sup_p = fp.sup_norm(&ps_p.all_samples()).unwrap();
        let sup_q = fq.sup_norm(&ps_q.all_samples()).unwrap();
        let whole = sup_p.max(sup_q) + (np - sup_p) + (nq - sup_q);
        assert!(np.max(nq) <= whole + 1e-9, "case {case}: part norm exceeds whole");
    }
    let secs = t.elapsed().as_secs_f64();
    println!("acceptance 8: PASS — 50 direct-sum fuzz cases, round trip exact, parts bounded by whole ({secs:.2}s)");
}

#[test]
fn fixtures_on_disk_match_builtins() {
    use picbv::specfile::{builtin, spec_to_json};
    for (name, text) in [
        ("bad_bv_ex", BAD_BV_EX),
        ("pic_fig_sigma", SIGMA),
        ("pic_fig_tau", TAU),
        ("plus_sign", PLUS_SIGN),
        ("segment", SEGMENT),
    ] {
        let parsed = parse_spec(text).unwrap();
        let built = builtin(name).unwrap();
        assert_eq!(spec_to_json(&parsed), spec_to_json(&built), "{name} fixture drifted");
    }
}
