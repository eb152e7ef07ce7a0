//! Dirichlet-Laplacian eigenfunctions of three triangles and truncated
//! expansions in them.
//!
//! The 45-90-45 triangle, the 30-60-90 (hemiequilateral) triangle and the
//! equilateral triangle all tile a rectangle by reflection. Their Dirichlet
//! eigenfunctions are finite sums of rectangle product waves, which gives
//! closed forms, exact norms and two independent ways to compute expansion
//! coefficients:
//!
//! ```
//! use trilap_core::{analyze, eval_closed, AnalysisOptions, EigenIndex, Family, Point2, TriangleKind};
//!
//! let u = EigenIndex::new(Family::EquiAntisym, 1, 3).unwrap();
//! let table = analyze(
//!     |p| eval_closed(u, p),
//!     TriangleKind::Hemiequilateral,
//!     &[Family::EquiAntisym],
//!     5,
//!     &AnalysisOptions::default(),
//! )
//! .unwrap();
//! assert!((table.get(u).unwrap() - 1.0).abs() < 1e-10);
//! let p = Point2::new(0.1, 0.4);
//! assert!((table.synthesizer().eval(p) - eval_closed(u, p)).abs() < 1e-10);
//! ```

pub mod corpus;
pub mod eigenbasis;
pub mod error;
pub mod expansion;
pub mod geometry;
pub mod quadrature;
pub mod verify;

pub use corpus::{corpus, lookup, CorpusFunction, Smoothness};
pub use eigenbasis::{
    basis_norm_sq, classify_lattice_point, eigenvalue, enumerate_indices, eval_by_reflection, eval_closed, lattice_expansion,
    reflection_sum, BasisKind, ClosedForm, EigenIndex, Family, IndexClass, Sign, ZeroReason,
};
pub use error::{Error, Result};
pub use expansion::{
    analyze, analyze_folded_transform, analyze_quadrature, commuting_check, convergence_study, mirror_norm_relation,
    norm_relation_check, parseval_residual, synthesize, AnalysisOptions, Backend, CoefficientTable, Component,
    ConvergenceReport, ConvergenceRow, LatticeSet, StudyOptions, DEFAULT_FOLD_TOL,
};
pub use geometry::{mirror_split, prolong_value, Point2, ProlongationKind, Tiling, TilingKind, TriangleDomain, TriangleKind};
pub use quadrature::{gauss_legendre, lp_norm, triangle_rule, QuadratureRule};
pub use verify::{run_suite, Suite, SuiteReport};
