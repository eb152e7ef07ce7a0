//! Gauss–Legendre rules on intervals, rectangles and triangles.
//!
//! Triangles use the collapsed-square (Duffy) map of a tensor Gauss rule,
//! with the collapsed edge at a chosen vertex. Sums are always reduced in
//! node order so results do not depend on thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{triangle_area, Point2, Tiling, TriangleDomain, TriangleKind};

pub const MAX_ORDER: usize = 256;

/// Default per-direction order for computations at band `n`. The Duffy map
/// mixes both frequencies into one direction, so `2N` is not enough for the
/// top corner of the band.
pub fn default_order(band: u32) -> usize {
    (4 * band as usize).clamp(32, MAX_ORDER)
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

pub fn gauss_legendre(order: usize) -> Result<GaussLegendre> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::OrderOutOfRange(order));
    }
    if order == 1 {
        return Ok(GaussLegendre { nodes: vec![0.0], weights: vec![2.0] });
    }
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(order, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(order, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // ascending order, mirrored pairs
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    Ok(GaussLegendre { nodes, weights })
}

impl GaussLegendre {
    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| half * w).collect();
        (x, w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<Point2>,
    pub weights: Vec<f64>,
    pub region_area: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Tensor Gauss rule on `[x0,x1] × [y0,y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        let (xs, wx) = gauss_legendre(nx)?.on_interval(x0, x1);
        let (ys, wy) = gauss_legendre(ny)?.on_interval(y0, y1);
        let mut nodes = Vec::with_capacity(nx * ny);
        let mut weights = Vec::with_capacity(nx * ny);
        for (x, a) in xs.iter().zip(&wx) {
            for (y, b) in ys.iter().zip(&wy) {
                nodes.push(Point2::new(*x, *y));
                weights.push(a * b);
            }
        }
        Ok(QuadratureRule { nodes, weights, region_area: (x1 - x0) * (y1 - y0) })
    }

    /// Duffy rule on the triangle `apex, b, c`, the edge collapsed onto `apex`.
    pub fn duffy(apex: Point2, b: Point2, c: Point2, order: usize) -> Result<Self> {
        let g = gauss_legendre(order)?;
        let (us, wu) = g.on_interval(0.0, 1.0);
        let twice_area = 2.0 * triangle_area(&[apex, b, c]);
        let mut nodes = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for (u, a) in us.iter().zip(&wu) {
            for (v, bw) in us.iter().zip(&wu) {
                nodes.push(apex + (b - apex) * *u + (c - b) * (u * v));
                weights.push(twice_area * u * a * bw);
            }
        }
        Ok(QuadratureRule { nodes, weights, region_area: 0.5 * twice_area })
    }

    pub fn concat(rules: impl IntoIterator<Item = QuadratureRule>) -> Self {
        let mut out = QuadratureRule { nodes: Vec::new(), weights: Vec::new(), region_area: 0.0 };
        for r in rules {
            out.nodes.extend(r.nodes);
            out.weights.extend(r.weights);
            out.region_area += r.region_area;
        }
        out
    }

    /// Samples `f` at every node, failing on the first non-finite value.
    pub fn sample<F>(&self, f: F) -> Result<Vec<f64>>
    where
        F: Fn(Point2) -> f64 + Sync,
    {
        let values: Vec<f64> = self.nodes.par_iter().map(|p| f(*p)).collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::non_finite_sample(i, self.nodes[i], values[i]));
        }
        Ok(values)
    }

    /// `Σ w_i v_i` over pre-sampled values.
    pub fn sum(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(Point2) -> f64 + Sync,
    {
        Ok(self.sum(&self.sample(f)?))
    }
}

/// Duffy rule on a reference triangle, collapsed at its right angle. The
/// equilateral triangle is split along `x = 0` into two such halves.
pub fn triangle_rule(domain: &TriangleDomain, order: usize) -> Result<QuadratureRule> {
    let v = domain.vertices;
    match domain.kind {
        TriangleKind::Isosceles45 | TriangleKind::Hemiequilateral => QuadratureRule::duffy(v[0], v[1], v[2], order),
        TriangleKind::Equilateral => {
            let foot = Point2::new(0.0, 0.0);
            let right = QuadratureRule::duffy(foot, v[1], v[2], order)?;
            let left = QuadratureRule::duffy(foot, v[0], v[2], order)?;
            Ok(QuadratureRule::concat([left, right]))
        }
    }
}

/// Composite rule over the tiling cover: one Duffy rule per tile built from
/// the tile's own vertices, collapsed at the image of the right angle.
pub fn tile_composite_rule(tiling: &Tiling, order: usize) -> Result<QuadratureRule> {
    let rules = tiling
        .tiles
        .iter()
        .map(|t| QuadratureRule::duffy(t.vertices[0], t.vertices[1], t.vertices[2], order))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadratureRule::concat(rules))
}

pub fn inner_product<F, G>(f: F, g: G, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(Point2) -> f64 + Sync,
    G: Fn(Point2) -> f64 + Sync,
{
    let fv = rule.sample(f)?;
    let gv = rule.sample(g)?;
    Ok(rule.weights.iter().zip(fv.iter().zip(&gv)).map(|(w, (a, b))| w * a * b).sum())
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `(Σ w_i |v_i|^p)^{1/p}` over pre-sampled values.
pub fn lp_norm_of_samples(values: &[f64], p: f64, rule: &QuadratureRule) -> Result<f64> {
    check_exponent(p)?;
    let s: f64 = rule.weights.iter().zip(values).map(|(w, v)| w * v.abs().powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

pub fn lp_norm<F>(f: F, p: f64, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(Point2) -> f64 + Sync,
{
    check_exponent(p)?;
    lp_norm_of_samples(&rule.sample(f)?, p, rule)
}
