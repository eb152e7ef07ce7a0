//! Named test functions for expansions and convergence studies.

use crate::eigenbasis::{eval_closed, EigenIndex, Family};
use crate::error::{Error, Result};
use crate::geometry::{Point2, TriangleKind, SQRT3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    /// Smooth and vanishing on the Dirichlet boundary, so the prolongation
    /// is continuous across tile edges.
    BoundaryCompatible,
    /// Does not vanish on the boundary; partial sums converge slowly.
    Incompatible,
}

#[derive(Debug, Clone, Copy)]
pub struct CorpusFunction {
    pub id: &'static str,
    pub domain: TriangleKind,
    pub families: &'static [Family],
    pub smoothness: Smoothness,
    /// Smallest band whose span contains the function, if any.
    pub band: Option<u32>,
    eval: fn(Point2) -> f64,
}

impl CorpusFunction {
    pub fn eval(&self, p: Point2) -> f64 {
        (self.eval)(p)
    }

    pub fn evaluator(&self) -> fn(Point2) -> f64 {
        self.eval
    }
}

fn u13(p: Point2) -> f64 {
    eval_closed(EigenIndex::new(Family::EquiAntisym, 1, 3).expect("canonical"), p)
}

fn v02(p: Point2) -> f64 {
    eval_closed(EigenIndex::new(Family::EquiSym, 0, 2).expect("canonical"), p)
}

fn bump_square(p: Point2) -> f64 {
    p.x * p.y * (1.0 - p.x - p.y)
}

fn bump_hemi(p: Point2) -> f64 {
    p.x * p.y * (1.0 - SQRT3 * p.x - p.y)
}

fn bump_equilateral(p: Point2) -> f64 {
    p.y * (1.0 - SQRT3 * p.x - p.y) * (1.0 + SQRT3 * p.x - p.y)
}

fn bump_odd(p: Point2) -> f64 {
    p.x * bump_equilateral(p)
}

fn one(_: Point2) -> f64 {
    1.0
}

const ANTISYM: &[Family] = &[Family::EquiAntisym];
const SYM: &[Family] = &[Family::EquiSym];
const SQUARE: &[Family] = &[Family::SquareAntisym];
const BOTH: &[Family] = &[Family::EquiAntisym, Family::EquiSym];

static CORPUS: [CorpusFunction; 8] = [
    CorpusFunction { id: "u13", domain: TriangleKind::Hemiequilateral, families: ANTISYM, smoothness: Smoothness::BoundaryCompatible, band: Some(3), eval: u13 },
    CorpusFunction { id: "v02", domain: TriangleKind::Hemiequilateral, families: SYM, smoothness: Smoothness::BoundaryCompatible, band: Some(2), eval: v02 },
    CorpusFunction { id: "bump-square", domain: TriangleKind::Isosceles45, families: SQUARE, smoothness: Smoothness::BoundaryCompatible, band: None, eval: bump_square },
    CorpusFunction { id: "bump-hemi", domain: TriangleKind::Hemiequilateral, families: ANTISYM, smoothness: Smoothness::BoundaryCompatible, band: None, eval: bump_hemi },
    CorpusFunction { id: "bump-equilateral", domain: TriangleKind::Equilateral, families: BOTH, smoothness: Smoothness::BoundaryCompatible, band: None, eval: bump_equilateral },
    CorpusFunction { id: "bump-odd", domain: TriangleKind::Equilateral, families: BOTH, smoothness: Smoothness::BoundaryCompatible, band: None, eval: bump_odd },
    CorpusFunction { id: "one-square", domain: TriangleKind::Isosceles45, families: SQUARE, smoothness: Smoothness::Incompatible, band: None, eval: one },
    CorpusFunction { id: "one-equilateral", domain: TriangleKind::Equilateral, families: BOTH, smoothness: Smoothness::Incompatible, band: None, eval: one },
];

pub fn corpus() -> &'static [CorpusFunction] {
    &CORPUS
}

pub fn lookup(id: &str) -> Result<&'static CorpusFunction> {
    CORPUS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown corpus function {id:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TriangleDomain;

    #[test]
    fn ids_are_unique_and_found() {
        for c in corpus() {
            assert_eq!(lookup(c.id).unwrap().id, c.id);
        }
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn compatible_entries_vanish_on_the_boundary() {
        for c in corpus().iter().filter(|c| c.smoothness == Smoothness::BoundaryCompatible) {
            let v = TriangleDomain::new(c.domain).vertices;
            for i in 0..3 {
                let (a, b) = (v[i], v[(i + 1) % 3]);
                // the symmetric family is Neumann on x = 0; it is an interior line there
                if c.domain == TriangleKind::Hemiequilateral && c.families == SYM && a.x == 0.0 && b.x == 0.0 {
                    continue;
                }
                for k in 0..=10 {
                    let t = f64::from(k) / 10.0;
                    let p = a + (b - a) * t;
                    assert!(c.eval(p).abs() < 1e-12, "{} at {p:?}", c.id);
                }
            }
        }
    }

    #[test]
    fn evaluators_are_finite_inside() {
        for c in corpus() {
            let d = TriangleDomain::new(c.domain);
            let g = d.vertices[0] * (1.0 / 3.0) + d.vertices[1] * (1.0 / 3.0) + d.vertices[2] * (1.0 / 3.0);
            assert!(c.eval(g).is_finite());
        }
    }
}
