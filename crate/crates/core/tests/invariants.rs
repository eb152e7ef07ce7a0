use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trilap_core::expansion::{lattice_points, norm_sq_on};
use trilap_core::geometry::{Location, EDGE_TOL};
use trilap_core::quadrature::{default_order, triangle_rule};
use trilap_core::verify::{random_points, random_smooth};
use trilap_core::{
    analyze, classify_lattice_point, commuting_check, eigenvalue, enumerate_indices, eval_by_reflection, eval_closed,
    mirror_split, norm_relation_check, reflection_sum, AnalysisOptions, ClosedForm, CoefficientTable, EigenIndex, Family,
    IndexClass, LatticeSet, Point2, ProlongationKind, TriangleDomain, TriangleKind,
};

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::SquareAntisym), Just(Family::EquiAntisym), Just(Family::EquiSym)]
}

fn canonical(band: u32) -> impl Strategy<Value = EigenIndex> {
    family().prop_flat_map(move |f| {
        let idxs = enumerate_indices(f, band);
        (0..idxs.len()).prop_map(move |i| idxs[i])
    })
}

/// A point of the fundamental triangle from two unit coordinates.
fn in_triangle(kind: TriangleKind, s: f64, t: f64) -> Point2 {
    let [a, b, c] = TriangleDomain::new(kind).vertices;
    let (s, t) = if s + t > 1.0 { (1.0 - s, 1.0 - t) } else { (s, t) };
    a + (b - a) * s + (c - a) * t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cover_points_fold_into_the_fundamental_tile(f in family(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let tiling = f.tiling();
        let p = Point2::new(s * tiling.cover.width, t);
        let (tile, q) = tiling.fold(p).unwrap();
        prop_assert!(tiling.fundamental().locate(q, 1e-12) != Location::Exterior);
        prop_assert!(tile.from_fundamental.apply(q).distance(p) < 1e-12);
        let interiors = tiling.tiles.iter().filter(|tl| tl.locate(p, EDGE_TOL) == Location::Interior).count();
        let touching = tiling.tiles.iter().filter(|tl| tl.locate(p, EDGE_TOL) != Location::Exterior).count();
        prop_assert!(interiors == 1 || (interiors == 0 && touching >= 2));
    }

    #[test]
    fn tile_maps_preserve_distance(f in family(), a in (0.0f64..1.0, 0.0f64..1.0), b in (0.0f64..1.0, 0.0f64..1.0)) {
        let tiling = f.tiling();
        let p = Point2::new(a.0, a.1);
        let q = Point2::new(b.0, b.1);
        for tile in &tiling.tiles {
            let d = tile.from_fundamental.apply(p).distance(tile.from_fundamental.apply(q));
            prop_assert!((d - p.distance(q)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_is_the_reflection_sum(idx in canonical(8), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let p = in_triangle(idx.family().fundamental_domain(), s, t);
        let a = eval_closed(idx, p);
        let b = eval_by_reflection(idx, p).unwrap();
        prop_assert!((a - b).abs() < 1e-11, "{} at {:?}: {} vs {}", idx, p, a, b);
    }

    #[test]
    fn eigenfunctions_vanish_on_dirichlet_edges(idx in canonical(8), t in 0.0f64..1.0) {
        let v = TriangleDomain::new(idx.family().fundamental_domain()).vertices;
        for (i, j) in [(0usize, 1usize), (1, 2), (2, 0)] {
            // x = 0 is a Neumann edge of the even family
            if idx.family() == Family::EquiSym && (i, j) == (2, 0) {
                continue;
            }
            let p = v[i] + (v[j] - v[i]) * t;
            prop_assert!(eval_closed(idx, p).abs() < 1e-11);
        }
    }

    #[test]
    fn closed_forms_solve_the_eigenproblem(idx in canonical(8), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let p = in_triangle(idx.family().fundamental_domain(), s, t);
        let cf = ClosedForm::new(idx);
        let lambda = eigenvalue(idx);
        prop_assert!((cf.laplacian(p) + lambda * cf.eval(p)).abs() < 1e-9 * lambda);
    }

    #[test]
    fn lattice_points_fold_consistently(f in family(), m in 0u32..=24, n in 1u32..=24, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        prop_assume!(m >= f.min_lattice_m());
        let p = in_triangle(f.fundamental_domain(), s, t);
        match classify_lattice_point(f, m, n).unwrap() {
            IndexClass::Canonical(idx) => prop_assert!((reflection_sum(f, m, n, p) - eval_closed(idx, p)).abs() < 1e-11),
            IndexClass::FoldsTo { canonical, sign, .. } => {
                let a = reflection_sum(f, m, n, p);
                prop_assert!((a - sign.value() * eval_closed(canonical, p)).abs() < 1e-11);
                let (l1, l2) = (trilap_core::eigenbasis::lattice_eigenvalue(f, m, n), eigenvalue(canonical));
                prop_assert!((l1 - l2).abs() <= 1e-12 * l2);
            }
            IndexClass::Zero(_) => prop_assert!(reflection_sum(f, m, n, p).abs() < 1e-12),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quadrature_order_is_converged_for_band_modes(idx in canonical(16)) {
        let d = TriangleDomain::new(idx.family().fundamental_domain());
        let base = default_order(16);
        let g = |p: Point2| eval_closed(idx, p) * (p.x + 2.0 * p.y).cos();
        let a = triangle_rule(&d, base).unwrap().integrate(g).unwrap();
        let b = triangle_rule(&d, 2 * base).unwrap().integrate(g).unwrap();
        prop_assert!((a - b).abs() < 1e-11 * b.abs().max(1e-3));
    }

    #[test]
    fn analysis_then_synthesis_reproduces_modes(idx in canonical(8), seed in any::<u64>()) {
        let domain = idx.family().fundamental_domain();
        let t = analyze(|p| eval_closed(idx, p), domain, &[idx.family()], 8, &AnalysisOptions::default()).unwrap();
        let synth = t.synthesizer();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in random_points(&TriangleDomain::new(domain), 500, &mut rng) {
            prop_assert!((synth.eval(p) - eval_closed(idx, p)).abs() < 1e-9);
        }
    }

    #[test]
    fn ten_term_combinations_commute(f in family(), picks in proptest::collection::vec((any::<prop::sample::Index>(), -1.0f64..1.0), 10), seed in any::<u64>()) {
        let idxs = enumerate_indices(f, 8);
        let terms: Vec<(EigenIndex, f64)> = picks.iter().map(|(i, c)| (idxs[i.index(idxs.len())], *c)).collect();
        let g = |p: Point2| terms.iter().map(|(k, c)| c * eval_closed(*k, p)).sum::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = trilap_core::verify::random_cover_points(&f.tiling().cover, 100, &mut rng);
        let dev = commuting_check(g, f, 8, &pts, LatticeSet::FoldClosure(8), default_order(8)).unwrap();
        prop_assert!(dev < 1e-9, "{}", dev);
    }

    #[test]
    fn prolongation_scales_lp_norms(seed in any::<u64>(), kind in prop_oneof![Just(ProlongationKind::SquareOdd), Just(ProlongationKind::Antisym), Just(ProlongationKind::Sym)]) {
        let u = random_smooth(&mut ChaCha8Rng::seed_from_u64(seed));
        for p in [1.5, 2.0, 3.0] {
            let (lhs, rhs) = norm_relation_check(&u, kind, p, 24).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-8 * rhs);
        }
    }

    #[test]
    fn split_expansions_recombine_to_the_direct_sum(seed in any::<u64>(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let g = random_smooth(&mut ChaCha8Rng::seed_from_u64(seed));
        let f = |p: Point2| g(p) * p.y * (1.0 - SQRT3 * p.x - p.y);
        let fams = [Family::EquiAntisym, Family::EquiSym];
        let opts = AnalysisOptions::default();
        let direct = analyze(f, TriangleKind::Equilateral, &fams, 8, &opts).unwrap();
        let (odd, even) = mirror_split(&f);
        let a = analyze(&odd, TriangleKind::Hemiequilateral, &[Family::EquiAntisym], 8, &opts).unwrap();
        let b = analyze(&even, TriangleKind::Hemiequilateral, &[Family::EquiSym], 8, &opts).unwrap();
        let mut joined = CoefficientTable::new(TriangleKind::Equilateral, &fams, 8, opts.backend).unwrap();
        for (k, v) in a.entries().chain(b.entries()) {
            joined.insert(k, v).unwrap();
        }
        let p = in_triangle(TriangleKind::Equilateral, s, t);
        let (x, y) = (direct.synthesizer().eval(p), joined.synthesizer().eval(p));
        prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
    }
}

#[test]
fn closure_sets_cover_every_folded_copy() {
    for f in [Family::EquiAntisym, Family::EquiSym] {
        let closure = lattice_points(f, LatticeSet::FoldClosure(6));
        for (m, n) in closure {
            let c = classify_lattice_point(f, m, n).unwrap().canonical().unwrap();
            assert!(c.n() <= 6);
        }
    }
}

#[test]
fn equilateral_norms_double() {
    let rule = triangle_rule(&TriangleDomain::new(TriangleKind::Equilateral), 32).unwrap();
    for f in [Family::EquiAntisym, Family::EquiSym] {
        for idx in enumerate_indices(f, 6) {
            let q = rule.integrate(|p| eval_closed(idx, p).powi(2)).unwrap();
            assert!((q - norm_sq_on(TriangleKind::Equilateral, idx)).abs() < 1e-10, "{idx}");
        }
    }
}
