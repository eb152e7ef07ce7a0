use super::{Point2, Tile, Tiling, TilingKind};
use crate::error::Result;

/// Signed reflection extension of a function from the fundamental triangle
/// to the whole tiling cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProlongationKind {
    /// Odd across the hypotenuse of the 45-90-45 triangle.
    SquareOdd,
    /// Odd across every edge image of the hemiequilateral triangle.
    Antisym,
    /// Odd across Dirichlet edge images, even across images of `x = 0`.
    Sym,
}

impl ProlongationKind {
    pub fn tiling_kind(self) -> TilingKind {
        match self {
            ProlongationKind::SquareOdd => TilingKind::Square,
            ProlongationKind::Antisym | ProlongationKind::Sym => TilingKind::Prager,
        }
    }

    pub fn tiling(self) -> &'static Tiling {
        Tiling::get(self.tiling_kind())
    }

    pub fn sign(self, tile: &Tile) -> f64 {
        match self {
            ProlongationKind::SquareOdd | ProlongationKind::Antisym => tile.odd_sign(),
            ProlongationKind::Sym => tile.dirichlet_sign(),
        }
    }
}

/// `(Pf)(p) = s(tile) · f(preimage)` for `p` in the tiling cover.
pub fn prolong_value<F>(kind: ProlongationKind, f: F, p: Point2) -> Result<f64>
where
    F: Fn(Point2) -> f64,
{
    let (tile, pre) = kind.tiling().fold(p)?;
    Ok(kind.sign(tile) * f(pre))
}

/// Splits `f` on the equilateral triangle into its parts odd and even in `x`.
pub fn mirror_split<F>(f: &F) -> (impl Fn(Point2) -> f64 + Sync + '_, impl Fn(Point2) -> f64 + Sync + '_)
where
    F: Fn(Point2) -> f64 + Sync,
{
    let odd = move |p: Point2| 0.5 * (f(p) - f(p.mirror_x()));
    let even = move |p: Point2| 0.5 * (f(p) + f(p.mirror_x()));
    (odd, even)
}
