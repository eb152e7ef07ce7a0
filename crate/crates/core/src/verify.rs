//! Self-checks of the basis, the tilings and the expansion machinery.
//!
//! Each suite returns a [`SuiteReport`] with the worst value it measured,
//! the tolerance it was held to and, on failure, the first counterexample.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{corpus, Smoothness};
use crate::eigenbasis::{
    classify_lattice_point, enumerate_indices, eval_closed, eigenvalue, lattice_eigenvalue, reflection_sum, ClosedForm, Family,
    IndexClass,
};
use crate::error::{Error, Result};
use crate::expansion::{analyze, commuting_check, norm_relation_check, parseval_residual, AnalysisOptions, LatticeSet};
use crate::geometry::{Point2, ProlongationKind, Rect, Tiling, TilingKind, TriangleDomain};
use crate::quadrature::{default_order, triangle_rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Tiling,
    ClosedForm,
    Orthogonality,
    Eigen,
    Fold,
    Commute,
    Norms,
    Parseval,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Tiling,
        Suite::ClosedForm,
        Suite::Orthogonality,
        Suite::Eigen,
        Suite::Fold,
        Suite::Commute,
        Suite::Norms,
        Suite::Parseval,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Tiling => "tiling",
            Suite::ClosedForm => "closedform",
            Suite::Orthogonality => "orthogonality",
            Suite::Eigen => "eigen",
            Suite::Fold => "fold",
            Suite::Commute => "commute",
            Suite::Norms => "norms",
            Suite::Parseval => "parseval",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Point2>,
    pub values: Vec<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    /// Worst measured value; compare with `tolerance`.
    pub metric: f64,
    pub tolerance: f64,
    pub checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// Accumulates checks of `value ≤ tolerance`, remembering the first failure.
struct Tally {
    suite: Suite,
    metric: f64,
    tolerance: f64,
    checks: usize,
    failure: Option<Counterexample>,
}

impl Tally {
    fn new(suite: Suite, tolerance: f64) -> Self {
        Tally { suite, metric: 0.0, tolerance, checks: 0, failure: None }
    }

    /// Records `value` measured against a tolerance scaled by `scale`.
    fn check(&mut self, value: f64, scale: f64, cx: impl FnOnce() -> Counterexample) {
        self.checks += 1;
        let rel = value / scale;
        if (rel.is_nan() || rel > self.tolerance) && self.failure.is_none() {
            self.failure = Some(cx());
        }
        if rel.is_nan() || rel > self.metric {
            self.metric = rel;
        }
    }

    fn fail(&mut self, cx: Counterexample) {
        self.checks += 1;
        if self.failure.is_none() {
            self.failure = Some(cx);
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            suite: self.suite.as_str().to_string(),
            passed: self.failure.is_none(),
            metric: self.metric,
            tolerance: self.tolerance,
            checks: self.checks,
            counterexample: self.failure,
        }
    }
}

fn cx(index: Option<String>, point: Option<Point2>, values: Vec<f64>, note: impl Into<String>) -> Counterexample {
    Counterexample { index, point, values, note: note.into() }
}

/// Uniform points strictly inside a triangle.
pub fn random_points(domain: &TriangleDomain, count: usize, rng: &mut impl Rng) -> Vec<Point2> {
    let [a, b, c] = domain.vertices;
    (0..count)
        .map(|_| {
            let (mut s, mut t): (f64, f64) = (rng.random_range(1e-6..1.0), rng.random_range(1e-6..1.0));
            if s + t >= 1.0 {
                (s, t) = (1.0 - s, 1.0 - t);
            }
            a + (b - a) * s + (c - a) * t
        })
        .collect()
}

/// Uniform points in a covering rectangle anchored at the origin.
pub fn random_cover_points(rect: &Rect, count: usize, rng: &mut impl Rng) -> Vec<Point2> {
    (0..count)
        .map(|_| Point2::new(rng.random_range(0.0..rect.width), rng.random_range(0.0..rect.height)))
        .collect()
}

pub fn run_suite(suite: Suite, band: u32, seed: u64) -> Result<SuiteReport> {
    if band == 0 {
        return Err(Error::InvalidArgument("band must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Tiling => tiling(&mut rng),
        Suite::ClosedForm => closed_form(band, &mut rng),
        Suite::Orthogonality => orthogonality(band),
        Suite::Eigen => eigen(band, &mut rng),
        Suite::Fold => fold(band, &mut rng),
        Suite::Commute => commute(band, &mut rng),
        Suite::Norms => norms(&mut rng),
        Suite::Parseval => parseval(band),
    }
}

/// Every cover point folds into the fundamental triangle through an
/// isometry, and the tiles exactly fill the cover.
fn tiling(rng: &mut ChaCha8Rng) -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::Tiling, 1e-12);
    for kind in [TilingKind::Square, TilingKind::Prager] {
        let tiling = Tiling::get(kind);
        let area: f64 = tiling.tiles.iter().map(|tile| crate::geometry::triangle_area(&tile.vertices)).sum();
        t.check((area - tiling.cover.area()).abs(), 1.0, || cx(None, None, vec![area, tiling.cover.area()], format!("{kind:?} tiles do not fill the cover")));
        let fundamental = tiling.fundamental();
        let pts = random_cover_points(&tiling.cover, 10_000, rng);
        for pair in pts.windows(2) {
            let (tile, q) = tiling.fold(pair[0])?;
            if fundamental.locate(q, 1e-9) == crate::geometry::Location::Exterior {
                t.fail(cx(Some(format!("tile {}", tile.id)), Some(pair[0]), vec![q.x, q.y], "folded point left the fundamental triangle"));
            }
            let (tile2, q2) = tiling.fold(pair[1])?;
            let d_in = pair[0].distance(tile.from_fundamental.apply(q));
            t.check(d_in, 1.0, || cx(Some(format!("tile {}", tile.id)), Some(pair[0]), vec![d_in], "fold does not invert the tile map"));
            if tile.id == tile2.id {
                let diff = (pair[0].distance(pair[1]) - q.distance(q2)).abs();
                t.check(diff, 1.0, || cx(Some(format!("tile {}", tile.id)), Some(pair[1]), vec![diff], "fold is not distance preserving"));
            }
        }
    }
    Ok(t.finish())
}

/// Closed forms equal the reflection sums they are derived from; zero
/// lattice points give identically vanishing sums.
fn closed_form(band: u32, rng: &mut ChaCha8Rng) -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::ClosedForm, 1e-11);
    for family in Family::ALL {
        let pts = random_points(&TriangleDomain::new(family.fundamental_domain()), 1000, rng);
        for idx in enumerate_indices(family, band) {
            for p in &pts {
                let (a, b) = (eval_closed(idx, *p), reflection_sum(family, idx.m(), idx.n(), *p));
                t.check((a - b).abs(), 1.0, || cx(Some(idx.to_string()), Some(*p), vec![a, b], "closed form differs from reflection sum"));
            }
        }
        for m in family.min_lattice_m()..=band {
            for n in 1..=band {
                if let IndexClass::Zero(reason) = classify_lattice_point(family, m, n)? {
                    for p in pts.iter().take(200) {
                        let v = reflection_sum(family, m, n, *p);
                        // held to the stricter degenerate tolerance
                        t.check(v.abs(), 1e-1, || cx(Some(format!("{}({m}, {n})", family.as_str())), Some(*p), vec![v], reason.to_string()));
                    }
                }
            }
        }
    }
    Ok(t.finish())
}

/// Gram matrices on each fundamental triangle are diagonal with the stated norms.
fn orthogonality(band: u32) -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::Orthogonality, 1e-10);
    for family in Family::ALL {
        let domain = family.fundamental_domain();
        let rule = triangle_rule(&TriangleDomain::new(domain), (4 * band as usize + 16).clamp(32, crate::quadrature::MAX_ORDER))?;
        let idxs = enumerate_indices(family, band);
        let samples: Vec<Vec<f64>> = idxs.iter().map(|k| rule.sample(|p| eval_closed(*k, p))).collect::<Result<_>>()?;
        for i in 0..idxs.len() {
            for j in i..idxs.len() {
                let g: f64 = rule.weights.iter().zip(samples[i].iter().zip(&samples[j])).map(|(w, (a, b))| w * a * b).sum();
                let want = if i == j { crate::eigenbasis::basis_norm_sq(idxs[i]) } else { 0.0 };
                t.check((g - want).abs(), 1.0, || {
                    cx(Some(format!("{} x {}", idxs[i], idxs[j])), None, vec![g, want], "Gram entry off")
                });
            }
        }
    }
    Ok(t.finish())
}

/// Five-point finite-difference residual `|Δ_h u + λu| ≤ 1e-4 · λ · max|u|`.
fn eigen(band: u32, rng: &mut ChaCha8Rng) -> Result<SuiteReport> {
    const H: f64 = 1e-3;
    let mut t = Tally::new(Suite::Eigen, 1e-4);
    for family in Family::ALL {
        let domain = TriangleDomain::new(family.fundamental_domain());
        let probe = random_points(&domain, 2000, rng);
        for idx in enumerate_indices(family, band) {
            let cf = ClosedForm::new(idx);
            let lambda = eigenvalue(idx);
            let max_u = probe.iter().map(|p| cf.eval(*p).abs()).fold(0.0, f64::max);
            for p in random_points(&domain, 100, rng) {
                let lap = (cf.eval(p + Point2::new(H, 0.0)) + cf.eval(p - Point2::new(H, 0.0)) + cf.eval(p + Point2::new(0.0, H))
                    + cf.eval(p - Point2::new(0.0, H))
                    - 4.0 * cf.eval(p))
                    / (H * H);
                let r = (lap + lambda * cf.eval(p)).abs();
                t.check(r, lambda * max_u, || cx(Some(idx.to_string()), Some(p), vec![lap, -lambda * cf.eval(p)], "finite-difference residual"));
                let exact = (cf.laplacian(p) + lambda * cf.eval(p)).abs();
                t.check(exact, lambda * max_u * 1e-8, || cx(Some(idx.to_string()), Some(p), vec![exact], "closed-form Laplacian"));
            }
        }
    }
    Ok(t.finish())
}

/// Every non-canonical lattice point with `M, N ≤ band` is a signed copy of
/// its canonical index, or vanishes, with the same eigenvalue.
fn fold(band: u32, rng: &mut ChaCha8Rng) -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::Fold, 1e-11);
    for family in Family::ALL {
        let pts = random_points(&TriangleDomain::new(family.fundamental_domain()), 50, rng);
        for m in family.min_lattice_m()..=band {
            for n in 1..=band {
                let class = classify_lattice_point(family, m, n)?;
                let name = || Some(format!("{}({m}, {n})", family.as_str()));
                match class {
                    IndexClass::Canonical(_) => {}
                    IndexClass::Zero(reason) => {
                        for p in &pts {
                            let v = reflection_sum(family, m, n, *p);
                            t.check(v.abs(), 1.0, || cx(name(), Some(*p), vec![v], reason.to_string()));
                        }
                    }
                    IndexClass::FoldsTo { canonical, sign, .. } => {
                        for p in &pts {
                            let a = reflection_sum(family, m, n, *p);
                            let b = sign.value() * eval_closed(canonical, *p);
                            t.check((a - b).abs(), 1.0, || cx(name(), Some(*p), vec![a, b], format!("does not fold onto {canonical}")));
                        }
                        let int_key = |a: u32, b: u32| match family {
                            Family::SquareAntisym => u64::from(a * a + b * b),
                            _ => u64::from(a * a + 3 * b * b),
                        };
                        if int_key(m, n) != int_key(canonical.m(), canonical.n()) {
                            t.fail(cx(name(), None, vec![lattice_eigenvalue(family, m, n), eigenvalue(canonical)], "eigenvalue changes under folding"));
                        }
                        let (a, b) = (lattice_eigenvalue(family, m, n), eigenvalue(canonical));
                        t.check((a - b).abs(), b * 1e-4, || cx(name(), None, vec![a, b], "eigenvalue changes under folding"));
                    }
                }
            }
        }
    }
    Ok(t.finish())
}

/// Random band-limited combinations commute with prolongation.
fn commute(band: u32, rng: &mut ChaCha8Rng) -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::Commute, 1e-9);
    for family in Family::ALL {
        let idxs = enumerate_indices(family, band);
        for trial in 0..20 {
            let coefs: Vec<f64> = idxs.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = |p: Point2| idxs.iter().zip(&coefs).map(|(k, c)| c * eval_closed(*k, p)).sum::<f64>();
            let pts = random_cover_points(&family.tiling().cover, 200, rng);
            let dev = commuting_check(f, family, band, &pts, LatticeSet::FoldClosure(band), default_order(band))?;
            t.check(dev, 1.0, || cx(Some(format!("{} trial {trial}", family.as_str())), None, vec![dev], "prolongation does not commute with partial sums"));
        }
    }
    Ok(t.finish())
}

/// A random smooth function: a low-degree polynomial times an exponential
/// ridge, which changes sign inside the triangle.
pub fn random_smooth(rng: &mut impl Rng) -> impl Fn(Point2) -> f64 + Sync + Clone {
    let c: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    move |p: Point2| {
        (c[0] + c[1] * p.x + c[2] * p.y + c[3] * p.x * p.x + c[4] * p.x * p.y + c[5] * p.y * p.y) * (a * p.x + b * p.y).exp()
    }
}

/// `‖Pu‖_p^p = k‖u‖_p^p` for all three prolongations.
fn norms(rng: &mut ChaCha8Rng) -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::Norms, 1e-8);
    for kind in [ProlongationKind::SquareOdd, ProlongationKind::Antisym, ProlongationKind::Sym] {
        for trial in 0..20 {
            let u = random_smooth(rng);
            for p in [1.5, 2.0, 3.0] {
                let (lhs, rhs) = norm_relation_check(&u, kind, p, 24)?;
                t.check((lhs.powf(p) - rhs.powf(p)).abs(), rhs.powf(p), || {
                    cx(Some(format!("{kind:?} trial {trial} p={p}")), None, vec![lhs, rhs], "norm relation")
                });
            }
        }
    }
    Ok(t.finish())
}

/// Bands used by the Parseval suite: doubling from 4 up to `band`.
pub fn parseval_bands(band: u32) -> Vec<u32> {
    let mut v: Vec<u32> = std::iter::successors(Some(4u32), |n| Some(n * 2)).take_while(|n| *n <= band).collect();
    if v.last() != Some(&band) {
        v.push(band);
    }
    v
}

/// Residual energy of the smooth corpus strictly decreases over the bands and
/// ends below 1% of `‖f‖²`.
fn parseval(band: u32) -> Result<SuiteReport> {
    let mut t = Tally::new(Suite::Parseval, 1e-2);
    let bands = parseval_bands(band);
    for c in corpus().iter().filter(|c| c.smoothness == Smoothness::BoundaryCompatible && c.band.is_none()) {
        let rule = triangle_rule(&TriangleDomain::new(c.domain), default_order(*bands.last().expect("non-empty")))?;
        let energy = rule.integrate(|p| c.eval(p).powi(2))?;
        let mut prev = f64::INFINITY;
        for &n in &bands {
            let table = analyze(c.evaluator(), c.domain, c.families, n, &AnalysisOptions::default())?;
            let r = parseval_residual(c.evaluator(), &table, &rule)?;
            if r >= prev {
                t.fail(cx(Some(format!("{} N={n}", c.id)), None, vec![prev, r], "residual did not decrease"));
            }
            prev = r;
            if n == *bands.last().expect("non-empty") {
                t.check(r.abs(), energy, || cx(Some(format!("{} N={n}", c.id)), None, vec![r, energy], "residual above 1% of the energy"));
            }
        }
    }
    Ok(t.finish())
}
