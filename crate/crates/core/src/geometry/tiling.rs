use std::sync::OnceLock;

use super::{locate_in_triangle, Isometry, Location, Point2, TriangleDomain, TriangleKind, EDGE_TOL, SQRT3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TilingKind {
    /// Two 45-90-45 triangles covering `[0,1]²`.
    Square,
    /// Six hemiequilateral triangles covering `[0,√3] × [0,1]`.
    Prager,
}

impl TilingKind {
    pub fn fundamental(self) -> TriangleKind {
        match self {
            TilingKind::Square => TriangleKind::Isosceles45,
            TilingKind::Prager => TriangleKind::Hemiequilateral,
        }
    }
}

/// Axis-aligned rectangle `[0,width] × [0,height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        p.x >= -tol && p.x <= self.width + tol && p.y >= -tol && p.y <= self.height + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    /// 1-based; tile 1 is the fundamental triangle.
    pub id: usize,
    /// Images of the fundamental triangle's vertices, in the same order.
    pub vertices: [Point2; 3],
    /// Maps the fundamental triangle onto this tile.
    pub from_fundamental: Isometry,
    /// Maps this tile back onto the fundamental triangle.
    pub to_fundamental: Isometry,
    pub reflection_count: u32,
    pub crossings_dirichlet: u32,
    pub crossings_neumann: u32,
}

impl Tile {
    pub fn locate(&self, p: Point2, tol: f64) -> Location {
        locate_in_triangle(&self.vertices, p, tol)
    }

    /// `(-1)^reflection_count`: odd extension across every edge.
    pub fn odd_sign(&self) -> f64 {
        if self.reflection_count.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `(-1)^crossings_dirichlet`: odd across Dirichlet edges, even across Neumann edges.
    pub fn dirichlet_sign(&self) -> f64 {
        if self.crossings_dirichlet.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tiling {
    pub kind: TilingKind,
    pub cover: Rect,
    pub tiles: Vec<Tile>,
}

#[derive(Clone, Copy)]
enum EdgeKind {
    Dirichlet,
    Neumann,
}

/// Edges of the fundamental triangle as vertex-index pairs, in the order
/// they are tried when unfolding: hypotenuse, base, then the vertical leg.
fn fundamental_edges(kind: TilingKind) -> [((usize, usize), EdgeKind); 3] {
    let leg = match kind {
        TilingKind::Square => EdgeKind::Dirichlet,
        // x = 0 is the mirror line of the equilateral triangle
        TilingKind::Prager => EdgeKind::Neumann,
    };
    [
        ((1, 2), EdgeKind::Dirichlet),
        ((0, 1), EdgeKind::Dirichlet),
        ((2, 0), leg),
    ]
}

fn same_vertex_set(a: &[Point2; 3], b: &[Point2; 3]) -> bool {
    a.iter().all(|p| b.iter().any(|q| p.distance(*q) < 1e-9))
}

/// Unfolds the fundamental triangle by repeated edge reflections, keeping
/// every image that stays inside the cover. Tiles are numbered in
/// depth-first discovery order.
pub fn build_tiling(kind: TilingKind) -> Tiling {
    let cover = match kind {
        TilingKind::Square => Rect { width: 1.0, height: 1.0 },
        TilingKind::Prager => Rect { width: SQRT3, height: 1.0 },
    };
    let fundamental = TriangleDomain::new(kind.fundamental());
    let mut tiles = vec![Tile {
        id: 1,
        vertices: fundamental.vertices,
        from_fundamental: Isometry::IDENTITY,
        to_fundamental: Isometry::IDENTITY,
        reflection_count: 0,
        crossings_dirichlet: 0,
        crossings_neumann: 0,
    }];
    let edges = fundamental_edges(kind);
    unfold(0, &edges, &cover, &mut tiles);
    Tiling { kind, cover, tiles }
}

fn unfold(parent: usize, edges: &[((usize, usize), EdgeKind); 3], cover: &Rect, tiles: &mut Vec<Tile>) {
    for &((i, j), edge_kind) in edges {
        let p = &tiles[parent];
        let mirror = Isometry::reflection(p.vertices[i], p.vertices[j]);
        let vertices = p.vertices.map(|v| mirror.apply(v));
        if !vertices.iter().all(|v| cover.contains(*v, 1e-9)) {
            continue;
        }
        if tiles.iter().any(|t| same_vertex_set(&t.vertices, &vertices)) {
            continue;
        }
        let from_fundamental = mirror.compose(&p.from_fundamental);
        let (dirichlet, neumann) = match edge_kind {
            EdgeKind::Dirichlet => (1, 0),
            EdgeKind::Neumann => (0, 1),
        };
        let tile = Tile {
            id: tiles.len() + 1,
            vertices,
            from_fundamental,
            to_fundamental: from_fundamental.inverse(),
            reflection_count: p.reflection_count + 1,
            crossings_dirichlet: p.crossings_dirichlet + dirichlet,
            crossings_neumann: p.crossings_neumann + neumann,
        };
        tiles.push(tile);
        unfold(tiles.len() - 1, edges, cover, tiles);
    }
}

pub fn square_tiling() -> &'static Tiling {
    static TILING: OnceLock<Tiling> = OnceLock::new();
    TILING.get_or_init(|| build_tiling(TilingKind::Square))
}

pub fn prager_tiling() -> &'static Tiling {
    static TILING: OnceLock<Tiling> = OnceLock::new();
    TILING.get_or_init(|| build_tiling(TilingKind::Prager))
}

impl Tiling {
    pub fn get(kind: TilingKind) -> &'static Tiling {
        match kind {
            TilingKind::Square => square_tiling(),
            TilingKind::Prager => prager_tiling(),
        }
    }

    pub fn tile(&self, id: usize) -> Option<&Tile> {
        id.checked_sub(1).and_then(|i| self.tiles.get(i))
    }

    pub fn fundamental(&self) -> &Tile {
        &self.tiles[0]
    }

    /// Locates the tile containing `p` (lowest id wins on shared edges) and
    /// returns it together with the preimage of `p` in the fundamental tile.
    pub fn fold(&self, p: Point2) -> Result<(&Tile, Point2)> {
        let p = p.check_finite()?;
        if !self.cover.contains(p, EDGE_TOL) {
            return Err(Error::OutsideCover { x: p.x, y: p.y });
        }
        self.tiles
            .iter()
            .find(|t| t.locate(p, EDGE_TOL) != Location::Exterior)
            .map(|t| (t, t.to_fundamental.apply(p)))
            .ok_or(Error::OutsideCover { x: p.x, y: p.y })
    }

    /// The `(tile_id, preimage)` form of [`Tiling::fold`].
    pub fn fold_to_fundamental(&self, p: Point2) -> Result<(usize, Point2)> {
        self.fold(p).map(|(t, q)| (t.id, q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn prager_tiles_match_reference_layout() {
        let t = build_tiling(TilingKind::Prager);
        let r = 1.0 / SQRT3;
        let expected = [
            [p(0.0, 0.0), p(r, 0.0), p(0.0, 1.0)],
            [p(0.0, 1.0), p(r, 0.0), p(SQRT3 / 2.0, 0.5)],
            [p(r, 0.0), p(SQRT3, 0.0), p(SQRT3 / 2.0, 0.5)],
            [p(SQRT3, 0.0), p(SQRT3 / 2.0, 0.5), p(2.0 * r, 1.0)],
            [p(SQRT3, 0.0), p(SQRT3, 1.0), p(2.0 * r, 1.0)],
            [p(0.0, 1.0), p(SQRT3 / 2.0, 0.5), p(2.0 * r, 1.0)],
        ];
        assert_eq!(t.tiles.len(), 6);
        for (tile, want) in t.tiles.iter().zip(expected.iter()) {
            assert!(same_vertex_set(&tile.vertices, want), "tile {}: {:?}", tile.id, tile.vertices);
        }
        let signs: Vec<f64> = t.tiles.iter().map(Tile::odd_sign).collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn sign_multisets() {
        let count = |signs: Vec<f64>| signs.iter().filter(|s| **s > 0.0).count();
        let prager = build_tiling(TilingKind::Prager);
        assert_eq!(count(prager.tiles.iter().map(Tile::odd_sign).collect()), 4);
        assert_eq!(count(prager.tiles.iter().map(Tile::dirichlet_sign).collect()), 3);
        let square = build_tiling(TilingKind::Square);
        let s: Vec<f64> = square.tiles.iter().map(Tile::odd_sign).collect();
        assert_eq!(s, vec![1.0, -1.0]);
        for t in prager.tiles.iter().chain(square.tiles.iter()) {
            assert_eq!(t.reflection_count, t.crossings_dirichlet + t.crossings_neumann);
        }
    }

    #[test]
    fn square_tile_two_is_the_diagonal_flip() {
        let t = build_tiling(TilingKind::Square);
        assert_eq!(t.tiles.len(), 2);
        let q = p(0.3, 0.9);
        let img = t.tiles[1].to_fundamental.apply(q);
        assert!(img.distance(p(1.0 - 0.9, 1.0 - 0.3)) < 1e-15);
        assert_eq!(t.tiles[1].crossings_dirichlet, 1);
    }

    #[test]
    fn fold_examples() {
        let prager = prager_tiling();
        let (id, q) = prager.fold_to_fundamental(p(0.2, 0.3)).unwrap();
        assert_eq!(id, 1);
        assert!(q.distance(p(0.2, 0.3)) < 1e-15);

        let (id, q) = prager.fold_to_fundamental(p(0.5, 0.6)).unwrap();
        assert_eq!(id, 2);
        // reflect across √3x + y = 1 with unit normal (√3,1)/2
        let d = (SQRT3 * 0.5 + 0.6 - 1.0) / 2.0;
        let want = p(0.5 - 2.0 * d * SQRT3 / 2.0, 0.6 - 2.0 * d * 0.5);
        assert!(q.distance(want) < 1e-14);
        assert!((q.x - 0.09641).abs() < 1e-5 && (q.y - 0.36699).abs() < 1e-5);

        let (id, q) = square_tiling().fold_to_fundamental(p(0.8, 0.9)).unwrap();
        assert_eq!(id, 2);
        assert!(q.distance(p(0.1, 0.2)) < 1e-15);
    }

    #[test]
    fn fold_outside_cover_is_an_error() {
        assert!(matches!(
            prager_tiling().fold(p(1.8, 0.5)),
            Err(Error::OutsideCover { .. })
        ));
        assert!(matches!(
            square_tiling().fold(p(0.5, -0.1)),
            Err(Error::OutsideCover { .. })
        ));
    }

    #[test]
    fn edge_ties_go_to_lowest_tile() {
        // midpoint of the hypotenuse shared by tiles 1 and 2
        let mid = p(0.5 / SQRT3, 0.5);
        assert_eq!(prager_tiling().fold_to_fundamental(mid).unwrap().0, 1);
        assert_eq!(square_tiling().fold_to_fundamental(p(0.5, 0.5)).unwrap().0, 1);
    }

    #[test]
    fn random_points_have_exactly_one_interior_tile() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for tiling in [prager_tiling(), square_tiling()] {
            let fundamental = tiling.fundamental();
            for _ in 0..10_000 {
                let q = p(
                    rng.random_range(0.0..tiling.cover.width),
                    rng.random_range(0.0..tiling.cover.height),
                );
                let interior = tiling
                    .tiles
                    .iter()
                    .filter(|t| t.locate(q, EDGE_TOL) == Location::Interior)
                    .count();
                let touching = tiling
                    .tiles
                    .iter()
                    .filter(|t| t.locate(q, EDGE_TOL) != Location::Exterior)
                    .count();
                assert!(interior == 1 || (interior == 0 && touching >= 2));
                let (_, pre) = tiling.fold(q).unwrap();
                assert_ne!(fundamental.locate(pre, 1e-12), Location::Exterior);
            }
        }
    }

    #[test]
    fn tile_maps_preserve_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for tiling in [prager_tiling(), square_tiling()] {
            for tile in &tiling.tiles {
                for _ in 0..200 {
                    let a = p(rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0));
                    let b = p(rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0));
                    let d0 = a.distance(b);
                    let d1 = tile.to_fundamental.apply(a).distance(tile.to_fundamental.apply(b));
                    assert!((d0 - d1).abs() < 1e-12);
                }
                for (i, v) in tile.vertices.iter().enumerate() {
                    let back = tile.to_fundamental.apply(*v);
                    assert!(back.distance(tiling.fundamental().vertices[i]) < 1e-12);
                }
            }
        }
    }
}
