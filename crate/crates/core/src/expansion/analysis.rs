use rayon::prelude::*;

use super::rectangle::{lattice_points, rectangle_transform, LatticeSet, RectangleSeries};
use super::{norm_sq_on, validate_families, Backend, CoefficientTable, DEFAULT_FOLD_TOL};
use crate::eigenbasis::{classify_lattice_point, enumerate_indices, ClosedForm, EigenIndex, Family, IndexClass};
use crate::error::{Error, Result};
use crate::geometry::{mirror_split, Point2, TriangleDomain, TriangleKind};
use crate::quadrature::{default_order, triangle_rule, QuadratureRule};

/// Coefficients `⟨f, φ⟩ / ‖φ‖²` by quadrature against each closed form.
pub fn analyze_quadrature<F>(
    f: F,
    domain: TriangleKind,
    families: &[Family],
    band: u32,
    rule: &QuadratureRule,
) -> Result<CoefficientTable>
where
    F: Fn(Point2) -> f64 + Sync,
{
    let mut table = CoefficientTable::new(domain, families, band, Backend::Quadrature)?;
    let area = TriangleDomain::new(domain).area();
    if (rule.region_area - area).abs() > 1e-10 * area {
        return Err(Error::InvalidArgument(format!(
            "quadrature rule covers area {} but the {domain} triangle has area {area}",
            rule.region_area
        )));
    }
    let values = rule.sample(&f)?;
    let indices: Vec<EigenIndex> = table
        .families()
        .iter()
        .flat_map(|fam| enumerate_indices(*fam, band))
        .collect();
    let coefs: Vec<f64> = indices
        .par_iter()
        .map(|idx| {
            let cf = ClosedForm::new(*idx);
            let mut s = 0.0;
            for ((p, w), v) in rule.nodes.iter().zip(&rule.weights).zip(&values) {
                s += w * v * cf.eval(*p);
            }
            s / norm_sq_on(domain, *idx)
        })
        .collect();
    for (idx, c) in indices.into_iter().zip(coefs) {
        table.insert(idx, c)?;
    }
    Ok(table)
}

/// Reads canonical coefficients off the rectangle coefficients of a
/// prolongation. A lattice point that folds onto `φ` with weight `w` carries
/// `w · f^△(φ)`; the canonical point itself gives the value, every other
/// copy is compared against it. Differences below `1e-6 · floor` count as
/// rounding; `floor` is at least `series.magnitude`.
pub fn fold_lattice_coefficients(
    series: &RectangleSeries,
    band: u32,
    tol: f64,
    floor: f64,
) -> Result<Vec<(EigenIndex, f64)>> {
    let floor = floor.max(series.magnitude);
    let family = series.family;
    let mut canonical = Vec::new();
    for idx in enumerate_indices(family, band) {
        let c = series.get(idx.m(), idx.n()).ok_or_else(|| {
            Error::InvalidArgument(format!("rectangle series lacks the lattice point of {idx}"))
        })?;
        canonical.push((idx, c / family.lattice_unit()));
    }
    for (&(m, n), &c) in &series.coefficients {
        let class = classify_lattice_point(family, m, n)?;
        let IndexClass::FoldsTo { canonical: target, .. } = class else {
            continue;
        };
        if target.n() > band {
            continue;
        }
        let found = c / class.lattice_weight();
        let expected = canonical
            .iter()
            .find(|(k, _)| *k == target)
            .map(|(_, v)| *v)
            .expect("every in-band canonical index was read above");
        // copies of modes that vanish by symmetry differ only by rounding
        let denom = found.abs().max(expected.abs()).max(1e-6 * floor);
        if denom > 0.0 && (found - expected).abs() / denom > tol {
            return Err(Error::FoldChecksum { lattice: (m, n), canonical: target, expected, found });
        }
    }
    Ok(canonical)
}

/// Coefficients through the rectangle: the (part of) `f` belonging to each
/// family is prolonged to the covering rectangle, transformed on the box
/// `0 < m, n ≤ band` and folded back.
pub fn analyze_folded_transform<F>(
    f: F,
    domain: TriangleKind,
    families: &[Family],
    band: u32,
    order: usize,
    tol: f64,
) -> Result<CoefficientTable>
where
    F: Fn(Point2) -> f64 + Sync,
{
    if (order as u64) < 4 * u64::from(band) {
        return Err(Error::InvalidArgument(format!("transform grid {order} must be at least 4N = {}", 4 * band)));
    }
    let mut table = CoefficientTable::new(domain, families, band, Backend::FoldedTransform)?.with_order(order);
    let (odd, even) = mirror_split(&f);
    let transform = |family: Family, pts: &[(u32, u32)]| match (domain, family) {
        (TriangleKind::Equilateral, Family::EquiAntisym) => rectangle_transform(&odd, family, order, pts),
        (TriangleKind::Equilateral, _) => rectangle_transform(&even, family, order, pts),
        _ => rectangle_transform(&f, family, order, pts),
    };
    // a part that vanishes by symmetry is pure rounding; judge it against the whole of f
    let floor = match domain {
        TriangleKind::Equilateral => transform(Family::EquiAntisym, &[])?.magnitude + transform(Family::EquiSym, &[])?.magnitude,
        _ => 0.0,
    };
    for family in table.families().to_vec() {
        let series = transform(family, &lattice_points(family, LatticeSet::Box(band)))?;
        for (idx, c) in fold_lattice_coefficients(&series, band, tol, floor)? {
            table.insert(idx, c)?;
        }
    }
    Ok(table)
}

/// Knobs shared by the two analysis routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub backend: Backend,
    /// Per-direction quadrature order (quadrature backend) or per-tile grid
    /// order (transform backend). `None` picks `max(32, 4N)` for either.
    pub order: Option<usize>,
    pub fold_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { backend: Backend::Quadrature, order: None, fold_tol: DEFAULT_FOLD_TOL }
    }
}

impl AnalysisOptions {
    pub fn with_backend(backend: Backend) -> Self {
        AnalysisOptions { backend, ..Default::default() }
    }

    pub fn resolved_order(&self, band: u32) -> usize {
        self.order.unwrap_or_else(|| default_order(band))
    }
}

/// Dispatches to either backend with default orders.
pub fn analyze<F>(f: F, domain: TriangleKind, families: &[Family], band: u32, opts: &AnalysisOptions) -> Result<CoefficientTable>
where
    F: Fn(Point2) -> f64 + Sync,
{
    let families = validate_families(domain, families)?;
    let order = opts.resolved_order(band);
    match opts.backend {
        Backend::Quadrature => {
            let rule = triangle_rule(&TriangleDomain::new(domain), order)?;
            Ok(analyze_quadrature(f, domain, &families, band, &rule)?.with_order(order))
        }
        Backend::FoldedTransform => analyze_folded_transform(f, domain, &families, band, order, opts.fold_tol),
    }
}
