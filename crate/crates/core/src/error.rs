use crate::eigenbasis::{EigenIndex, Family};
use crate::geometry::Point2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite coordinate in point ({x}, {y})")]
    NonFinitePoint { x: f64, y: f64 },

    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),

    #[error("point ({x}, {y}) lies outside the tiling cover")]
    OutsideCover { x: f64, y: f64 },

    #[error("point ({x}, {y}) lies outside the {domain}")]
    OutsideDomain { x: f64, y: f64, domain: &'static str },

    #[error("({m}, {n}) is not a canonical index of the {family} family")]
    NonCanonical { family: Family, m: u32, n: u32 },

    #[error("invalid lattice point ({m}, {n}) for the {family} family")]
    InvalidLatticePoint { family: Family, m: u32, n: u32 },

    #[error("Gauss-Legendre order must lie in 1..=256, got {0}")]
    OrderOutOfRange(usize),

    #[error("p must lie in (1,∞), got {0}")]
    InvalidExponent(f64),

    #[error("non-finite sample {value} at node {node} ({x}, {y})")]
    NonFiniteSample { node: usize, x: f64, y: f64, value: f64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error(
        "folded copy at lattice ({}, {}) disagrees with {}: expected {expected}, found {found}",
        lattice.0, lattice.1, canonical
    )]
    FoldChecksum {
        lattice: (u32, u32),
        canonical: EigenIndex,
        expected: f64,
        found: f64,
    },

    #[error("malformed coefficient file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn non_finite_sample(node: usize, p: Point2, value: f64) -> Self {
        Error::NonFiniteSample { node, x: p.x, y: p.y, value }
    }
}
