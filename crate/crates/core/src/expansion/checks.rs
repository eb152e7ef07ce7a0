use rayon::prelude::*;

use super::analysis::analyze_quadrature;
use super::rectangle::{lattice_points, rectangle_transform, LatticeSet};
use super::{norm_sq_on, CoefficientTable};
use crate::eigenbasis::Family;
use crate::error::{Error, Result};
use crate::geometry::{prolong_value, Point2, ProlongationKind, TriangleDomain, TriangleKind};
use crate::quadrature::{check_exponent, lp_norm, lp_norm_of_samples, tile_composite_rule, triangle_rule, QuadratureRule};

/// Largest gap between the prolonged triangle partial sum and the rectangle
/// partial sum of the prolongation over `points`.
///
/// `f` lives on the family's fundamental triangle. The triangle side uses a
/// Gauss-Duffy rule of order `order`; the rectangle side uses the per-tile
/// transform of the same order over `set`. With [`LatticeSet::FoldClosure`]
/// the two sides sum the same modes and agree to rounding; the equilateral
/// families also reach lattice points outside the plain `Box`.
pub fn commuting_check<F>(
    f: F,
    family: Family,
    band: u32,
    points: &[Point2],
    set: LatticeSet,
    order: usize,
) -> Result<f64>
where
    F: Fn(Point2) -> f64 + Sync,
{
    let domain = family.fundamental_domain();
    let rule = triangle_rule(&TriangleDomain::new(domain), order)?;
    let table = analyze_quadrature(&f, domain, &[family], band, &rule)?;
    let synth = table.synthesizer();
    let series = rectangle_transform(&f, family, order, &lattice_points(family, set))?;
    let kind = family.prolongation();
    let devs = points
        .par_iter()
        .map(|p| {
            let lhs = prolong_value(kind, |q| synth.eval(q), *p)?;
            Ok((lhs - series.eval(*p)).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// `(‖P u‖_{p,R}, k^{1/p} ‖u‖_{p,T})` where `k` is the number of tiles in the
/// cover `R` and `T` is the fundamental triangle.
pub fn norm_relation_check<F>(u: F, kind: ProlongationKind, p: f64, order: usize) -> Result<(f64, f64)>
where
    F: Fn(Point2) -> f64 + Sync,
{
    check_exponent(p)?;
    let tiling = kind.tiling();
    let cover = tile_composite_rule(tiling, order)?;
    let samples = cover
        .nodes
        .par_iter()
        .map(|q| prolong_value(kind, &u, *q))
        .collect::<Result<Vec<f64>>>()?;
    let lhs = lp_norm_of_samples(&samples, p, &cover)?;
    let tri = triangle_rule(&TriangleDomain::new(tiling.kind.fundamental()), order)?;
    let rhs = (tiling.tiles.len() as f64).powf(1.0 / p) * lp_norm(&u, p, &tri)?;
    Ok((lhs, rhs))
}

/// `(‖g‖_{p,T}, 2^{1/p} ‖g‖_{p,T_1})` for `g` on the equilateral triangle.
/// Equal whenever `g` is odd or even in `x`.
pub fn mirror_norm_relation<F>(g: F, p: f64, order: usize) -> Result<(f64, f64)>
where
    F: Fn(Point2) -> f64 + Sync,
{
    check_exponent(p)?;
    let full = triangle_rule(&TriangleDomain::new(TriangleKind::Equilateral), order)?;
    let half = triangle_rule(&TriangleDomain::new(TriangleKind::Hemiequilateral), order)?;
    Ok((lp_norm(&g, p, &full)?, 2f64.powf(1.0 / p) * lp_norm(&g, p, &half)?))
}

/// `‖f‖² − Σ c² ‖φ‖²` with `‖f‖²` taken on `rule`, which must cover the
/// table's domain.
pub fn parseval_residual<F>(f: F, table: &CoefficientTable, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(Point2) -> f64 + Sync,
{
    let area = TriangleDomain::new(table.domain()).area();
    if (rule.region_area - area).abs() > 1e-10 * area {
        return Err(Error::InvalidArgument("quadrature rule does not cover the table's domain".into()));
    }
    let energy = rule.integrate(|q| f(q).powi(2))?;
    let captured: f64 = table.entries().map(|(k, c)| c * c * norm_sq_on(table.domain(), k)).sum();
    Ok(energy - captured)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{eval_closed, EigenIndex};
    use crate::geometry::SQRT3;
    use crate::quadrature::default_order;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn idx(f: Family, m: u32, n: u32) -> EigenIndex {
        EigenIndex::new(f, m, n).unwrap()
    }

    fn cover_points(family: Family, count: usize, seed: u64) -> Vec<Point2> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = family.x_length();
        (0..count).map(|_| Point2::new(rng.random_range(0.0..w), rng.random_range(0.0..1.0))).collect()
    }

    #[test]
    fn commuting_single_mode() {
        let u13 = idx(Family::EquiAntisym, 1, 3);
        let pts = cover_points(Family::EquiAntisym, 200, 1);
        let dev = commuting_check(|p| eval_closed(u13, p), Family::EquiAntisym, 5, &pts, LatticeSet::FoldClosure(5), 24).unwrap();
        assert!(dev < 1e-10, "{dev}");
    }

    /// The literal box `0 < m, n ≤ N` drops folded copies of in-band modes:
    /// `u_{1,3}` needs `(4,2)` and `(5,1)`, which fall outside the box at `N = 3`.
    #[test]
    fn plain_box_misses_equilateral_copies() {
        let u13 = idx(Family::EquiAntisym, 1, 3);
        let pts = cover_points(Family::EquiAntisym, 50, 2);
        let dev = commuting_check(|p| eval_closed(u13, p), Family::EquiAntisym, 3, &pts, LatticeSet::Box(3), 24).unwrap();
        assert!(dev > 0.1, "{dev}");
        let dev = commuting_check(|p| eval_closed(u13, p), Family::EquiAntisym, 3, &pts, LatticeSet::FoldClosure(3), 24).unwrap();
        assert!(dev < 1e-10, "{dev}");
    }

    #[test]
    fn commuting_constant_on_square() {
        let pts = cover_points(Family::SquareAntisym, 200, 3);
        let dev = commuting_check(|_| 1.0, Family::SquareAntisym, 16, &pts, LatticeSet::Box(16), 64).unwrap();
        assert!(dev < 1e-8, "{dev}");
    }

    #[test]
    fn commuting_random_combinations() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for family in Family::ALL {
            let idxs = crate::eigenbasis::enumerate_indices(family, 8);
            let terms: Vec<(EigenIndex, f64)> = (0..5)
                .map(|_| (idxs[rng.random_range(0..idxs.len())], rng.random_range(-1.0..1.0)))
                .collect();
            let f = |p: Point2| terms.iter().map(|(k, c)| c * eval_closed(*k, p)).sum::<f64>();
            let pts = cover_points(family, 100, 5);
            let dev = commuting_check(f, family, 8, &pts, LatticeSet::FoldClosure(8), default_order(8)).unwrap();
            assert!(dev < 1e-9, "{family:?}: {dev}");
        }
    }

    #[test]
    fn norm_relation_examples() {
        let u13 = idx(Family::EquiAntisym, 1, 3);
        let (l, r) = norm_relation_check(|p| eval_closed(u13, p), ProlongationKind::Antisym, 2.0, 32).unwrap();
        let want = (3.0 * SQRT3).sqrt();
        assert!((l - want).abs() < 1e-9 && (r - want).abs() < 1e-9, "{l} {r} {want}");

        let (l, r) = norm_relation_check(|_| 1.0, ProlongationKind::Antisym, 3.0, 8).unwrap();
        assert!((l - (SQRT3).powf(1.0 / 3.0)).abs() < 1e-10);
        assert!((r - 6f64.powf(1.0 / 3.0) * (SQRT3 / 6.0).powf(1.0 / 3.0)).abs() < 1e-10);
        assert!((l - r).abs() < 1e-10);

        let (l, r) = norm_relation_check(|p| p.x * p.y, ProlongationKind::SquareOdd, 2.0, 16).unwrap();
        assert!((l * l - r * r).abs() < 1e-10);

        assert!(matches!(norm_relation_check(|_| 1.0, ProlongationKind::Sym, 1.0, 8), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn mirror_relation_for_even_functions() {
        let g = |p: Point2| p.y * (1.0 - SQRT3 * p.x - p.y) * (1.0 + SQRT3 * p.x - p.y);
        let (l, r) = mirror_norm_relation(g, 1.5, 32).unwrap();
        assert!((l - r).abs() < 1e-10 * l);
    }

    #[test]
    fn parseval_examples() {
        let u13 = idx(Family::EquiAntisym, 1, 3);
        let u35 = idx(Family::EquiAntisym, 3, 5);
        let rule = triangle_rule(&TriangleDomain::new(TriangleKind::Hemiequilateral), 32).unwrap();
        let f = |p: Point2| 2.0 * eval_closed(u13, p) - eval_closed(u35, p);
        let t = analyze_quadrature(f, TriangleKind::Hemiequilateral, &[Family::EquiAntisym], 5, &rule).unwrap();
        assert!(parseval_residual(f, &t, &rule).unwrap().abs() < 1e-9);
        let wrong = triangle_rule(&TriangleDomain::new(TriangleKind::Isosceles45), 8).unwrap();
        assert!(parseval_residual(f, &t, &wrong).is_err());
    }
}
