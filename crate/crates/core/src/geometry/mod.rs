//! Reference triangles, reflection tilings and prolongation operators.
//!
//! All three domains live in fixed coordinates:
//!
//! * the 45-90-45 triangle `(0,0), (1,0), (0,1)`, which together with its
//!   mirror image across the hypotenuse covers the unit square;
//! * the hemiequilateral (30-60-90) triangle `(0,0), (1/√3,0), (0,1)`, six
//!   copies of which tile the rectangle `[0,√3] × [0,1]`;
//! * the equilateral triangle `(±1/√3,0), (0,1)`, whose right half is the
//!   hemiequilateral triangle.

mod prolong;
mod tiling;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use prolong::{mirror_split, prolong_value, ProlongationKind};
pub use tiling::{build_tiling, prager_tiling, square_tiling, Rect, Tile, Tiling, TilingKind};

/// Absolute tolerance used for membership tests on tile and domain edges.
pub const EDGE_TOL: f64 = 1e-12;

pub(crate) const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Reflection across the vertical axis `x = 0`.
    pub fn mirror_x(self) -> Point2 {
        Point2::new(-self.x, self.y)
    }

    pub(crate) fn check_finite(self) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinitePoint { x: self.x, y: self.y })
        }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

/// Rigid motion `p ↦ A p + t` of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    a: [[f64; 2]; 2],
    t: Point2,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: [[1.0, 0.0], [0.0, 1.0]],
        t: Point2::new(0.0, 0.0),
    };

    /// Reflection across the line through `p` and `q`.
    pub fn reflection(p: Point2, q: Point2) -> Isometry {
        let d = q - p;
        let d = d * (1.0 / d.norm());
        // A = 2 d dᵀ - I
        let a = [
            [2.0 * d.x * d.x - 1.0, 2.0 * d.x * d.y],
            [2.0 * d.x * d.y, 2.0 * d.y * d.y - 1.0],
        ];
        let ap = Point2::new(a[0][0] * p.x + a[0][1] * p.y, a[1][0] * p.x + a[1][1] * p.y);
        Isometry { a, t: p - ap }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(
            self.a[0][0] * p.x + self.a[0][1] * p.y + self.t.x,
            self.a[1][0] * p.x + self.a[1][1] * p.y + self.t.y,
        )
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Isometry) -> Isometry {
        let a = &self.a;
        let b = &inner.a;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        Isometry { a: m, t: self.apply(inner.t) }
    }

    pub fn inverse(&self) -> Isometry {
        // orthogonal linear part: inverse is the transpose
        let at = [[self.a[0][0], self.a[1][0]], [self.a[0][1], self.a[1][1]]];
        let t = Point2::new(
            -(at[0][0] * self.t.x + at[0][1] * self.t.y),
            -(at[1][0] * self.t.x + at[1][1] * self.t.y),
        );
        Isometry { a: at, t }
    }

    /// Determinant of the linear part: `+1` for rotations, `-1` for reflections.
    pub fn orientation(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// Classifies `p` against the triangle `v` by signed edge distances.
/// Works for either vertex orientation.
pub(crate) fn locate_in_triangle(v: &[Point2; 3], p: Point2, tol: f64) -> Location {
    let orient = (v[1] - v[0]).cross(v[2] - v[0]).signum();
    let mut on_edge = false;
    for i in 0..3 {
        let a = v[i];
        let b = v[(i + 1) % 3];
        let e = b - a;
        let d = orient * e.cross(p - a) / e.norm();
        if d < -tol {
            return Location::Exterior;
        }
        if d.abs() <= tol {
            on_edge = true;
        }
    }
    if on_edge {
        Location::Boundary
    } else {
        Location::Interior
    }
}

pub(crate) fn triangle_area(v: &[Point2; 3]) -> f64 {
    0.5 * (v[1] - v[0]).cross(v[2] - v[0]).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleKind {
    Isosceles45,
    Hemiequilateral,
    Equilateral,
}

impl TriangleKind {
    pub const ALL: [TriangleKind; 3] = [
        TriangleKind::Isosceles45,
        TriangleKind::Hemiequilateral,
        TriangleKind::Equilateral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TriangleKind::Isosceles45 => "isosceles45",
            TriangleKind::Hemiequilateral => "hemiequilateral",
            TriangleKind::Equilateral => "equilateral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "isosceles45" | "square" | "45-90-45" => Some(TriangleKind::Isosceles45),
            "hemiequilateral" | "hemi" | "30-60-90" => Some(TriangleKind::Hemiequilateral),
            "equilateral" | "equi" => Some(TriangleKind::Equilateral),
            _ => None,
        }
    }
}

impl fmt::Display for TriangleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the three reference triangles, vertices counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleDomain {
    pub kind: TriangleKind,
    pub vertices: [Point2; 3],
}

impl TriangleDomain {
    pub fn new(kind: TriangleKind) -> Self {
        let vertices = match kind {
            TriangleKind::Isosceles45 => [
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(0.0, 1.0),
            ],
            TriangleKind::Hemiequilateral => [
                Point2::new(0.0, 0.0),
                Point2::new(1.0 / SQRT3, 0.0),
                Point2::new(0.0, 1.0),
            ],
            TriangleKind::Equilateral => [
                Point2::new(-1.0 / SQRT3, 0.0),
                Point2::new(1.0 / SQRT3, 0.0),
                Point2::new(0.0, 1.0),
            ],
        };
        TriangleDomain { kind, vertices }
    }

    pub fn area(&self) -> f64 {
        triangle_area(&self.vertices)
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let xs = self.vertices.map(|v| v.x);
        let ys = self.vertices.map(|v| v.y);
        let min = Point2::new(xs.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::INFINITY, f64::min));
        let max = Point2::new(xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        (min, max)
    }

    pub fn contains(&self, p: Point2, tol: f64) -> Result<Location> {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidTolerance(tol));
        }
        let p = p.check_finite()?;
        Ok(locate_in_triangle(&self.vertices, p, tol))
    }

    pub(crate) fn require_inside(&self, p: Point2) -> Result<()> {
        match self.contains(p, EDGE_TOL)? {
            Location::Exterior => Err(Error::OutsideDomain {
                x: p.x,
                y: p.y,
                domain: self.kind.as_str(),
            }),
            _ => Ok(()),
        }
    }
}

/// Convenience wrapper around [`TriangleDomain::contains`].
pub fn contains(domain: &TriangleDomain, p: Point2, tol: f64) -> Result<Location> {
    domain.contains(p, tol)
}
