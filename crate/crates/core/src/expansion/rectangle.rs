use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::eigenbasis::{classify_lattice_point, lattice_wave, BasisKind, Family};
use crate::error::Result;
use crate::geometry::{prolong_value, Point2};
use crate::quadrature::tile_composite_rule;

/// Which rectangle lattice points a rectangle partial sum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeSet {
    /// `0 < m, n ≤ N` (plus `m = 0` for the cosine basis).
    Box(u32),
    /// Every lattice point that folds onto a canonical index with `n ≤ N`.
    /// For the equilateral families this reaches `m` up to `2N`, beyond the box.
    FoldClosure(u32),
}

pub fn lattice_points(family: Family, set: LatticeSet) -> Vec<(u32, u32)> {
    let m0 = family.min_lattice_m();
    match set {
        LatticeSet::Box(band) => (m0..=band).flat_map(|m| (1..=band).map(move |n| (m, n))).collect(),
        LatticeSet::FoldClosure(band) => {
            let mut out = BTreeSet::new();
            for m in m0..=2 * band {
                for n in 1..=band {
                    let class = classify_lattice_point(family, m, n).expect("n ≥ 1 and m ≥ min");
                    if class.canonical().is_some_and(|c| c.n() <= band) {
                        out.insert((m, n));
                    }
                }
            }
            out.into_iter().collect()
        }
    }
}

/// Finite product sine/cosine series on the covering rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangleSeries {
    pub family: Family,
    pub coefficients: BTreeMap<(u32, u32), f64>,
    /// Bound on any coefficient: the largest normalisation times `∫|Pg|`.
    /// Rounding in the coefficients is relative to this.
    pub magnitude: f64,
}

impl RectangleSeries {
    pub fn eval(&self, p: Point2) -> f64 {
        let mut acc = 0.0;
        for (&(m, n), c) in &self.coefficients {
            acc += c * lattice_wave(self.family, m, n, p);
        }
        acc
    }

    pub fn get(&self, m: u32, n: u32) -> Option<f64> {
        self.coefficients.get(&(m, n)).copied()
    }
}

/// `1 / ∫_R wave²` for the rectangle of height 1 and the family's width.
fn lattice_normalisation(family: Family, m: u32) -> f64 {
    let l = family.x_length();
    match family.basis_kind() {
        BasisKind::CosineSine if m == 0 => 2.0 / l,
        _ => 4.0 / l,
    }
}

/// Product-basis coefficients of the prolongation of `g` (given on the
/// fundamental triangle) at the requested lattice points.
///
/// The prolongation is sampled through the fold on a per-tile Duffy rule of
/// the given order, so the integrand is smooth on every piece even where the
/// prolongation has kinks or jumps across tile edges.
pub fn rectangle_transform<G>(g: G, family: Family, order: usize, points: &[(u32, u32)]) -> Result<RectangleSeries>
where
    G: Fn(Point2) -> f64 + Sync,
{
    let kind = family.prolongation();
    let rule = tile_composite_rule(kind.tiling(), order)?;
    let samples: Vec<f64> = rule
        .nodes
        .par_iter()
        .map(|p| prolong_value(kind, &g, *p))
        .collect::<Result<_>>()?;
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(crate::error::Error::non_finite_sample(i, rule.nodes[i], samples[i]));
    }
    let weighted: Vec<f64> = rule.weights.iter().zip(&samples).map(|(w, s)| w * s).collect();
    let magnitude = weighted.iter().map(|v| v.abs()).sum::<f64>() * lattice_normalisation(family, 1);

    let ms: BTreeSet<u32> = points.iter().map(|p| p.0).collect();
    let ns: BTreeSet<u32> = points.iter().map(|p| p.1).collect();
    let l = family.x_length();
    let x_waves: BTreeMap<u32, Vec<f64>> = ms
        .par_iter()
        .map(|&m| {
            let w = rule
                .nodes
                .iter()
                .map(|p| {
                    let a = std::f64::consts::PI * f64::from(m) * p.x / l;
                    match family.basis_kind() {
                        BasisKind::SineSine => a.sin(),
                        BasisKind::CosineSine => a.cos(),
                    }
                })
                .collect();
            (m, w)
        })
        .collect();

    let rows: Vec<Vec<((u32, u32), f64)>> = ns
        .par_iter()
        .map(|&n| {
            let h: Vec<f64> = rule
                .nodes
                .iter()
                .zip(&weighted)
                .map(|(p, wg)| wg * (std::f64::consts::PI * f64::from(n) * p.y).sin())
                .collect();
            points
                .iter()
                .filter(|pt| pt.1 == n)
                .map(|&(m, n)| {
                    let xw = &x_waves[&m];
                    let s: f64 = h.iter().zip(xw).map(|(a, b)| a * b).sum();
                    ((m, n), s * lattice_normalisation(family, m))
                })
                .collect()
        })
        .collect();

    Ok(RectangleSeries { family, coefficients: rows.into_iter().flatten().collect(), magnitude })
}
