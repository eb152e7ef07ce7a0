//! Coefficient analysis, partial-sum synthesis and the checks built on them.
//!
//! Two analysis backends produce the same [`CoefficientTable`]:
//!
//! * [`analyze_quadrature`] integrates `f` against each closed-form
//!   eigenfunction on the triangle;
//! * [`analyze_folded_transform`] prolongs `f` to the covering rectangle,
//!   takes its product sine/cosine coefficients there and folds the
//!   rectangle lattice back onto canonical indices.

mod analysis;
mod checks;
mod convergence;
mod rectangle;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigenbasis::{basis_norm_sq, ClosedForm, EigenIndex, Family};
use crate::error::{Error, Result};
use crate::geometry::{Point2, TriangleDomain, TriangleKind};

pub use analysis::{analyze, analyze_folded_transform, analyze_quadrature, fold_lattice_coefficients, AnalysisOptions};
pub use checks::{commuting_check, mirror_norm_relation, norm_relation_check, parseval_residual};
pub use convergence::{convergence_study, Component, ConvergenceReport, ConvergenceRow, StudyOptions};
pub use rectangle::{lattice_points, rectangle_transform, LatticeSet, RectangleSeries};

/// Default relative tolerance for mismatched folded copies.
pub const DEFAULT_FOLD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Quadrature,
    FoldedTransform,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Quadrature => "quadrature",
            Backend::FoldedTransform => "transform",
        }
    }

    pub fn parse(s: &str) -> Option<Backend> {
        match s {
            "quadrature" => Some(Backend::Quadrature),
            "transform" | "folded-transform" => Some(Backend::FoldedTransform),
            _ => None,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Checks that `families` is a valid basis selection for `domain` and
/// returns it sorted and deduplicated.
pub fn validate_families(domain: TriangleKind, families: &[Family]) -> Result<Vec<Family>> {
    let mut fams = families.to_vec();
    fams.sort();
    fams.dedup();
    let ok = match domain {
        TriangleKind::Isosceles45 => fams == [Family::SquareAntisym],
        // the two equilateral families are not mutually orthogonal on one half
        TriangleKind::Hemiequilateral => fams == [Family::EquiAntisym] || fams == [Family::EquiSym],
        TriangleKind::Equilateral => !fams.is_empty() && !fams.contains(&Family::SquareAntisym),
    };
    if ok {
        Ok(fams)
    } else {
        Err(Error::InvalidArgument(format!(
            "family selection {:?} is not a basis on the {domain} triangle",
            fams.iter().map(|f| f.as_str()).collect::<Vec<_>>()
        )))
    }
}

/// Families used when none are requested.
pub fn default_families(domain: TriangleKind) -> Vec<Family> {
    match domain {
        TriangleKind::Isosceles45 => vec![Family::SquareAntisym],
        TriangleKind::Hemiequilateral => vec![Family::EquiAntisym],
        TriangleKind::Equilateral => vec![Family::EquiAntisym, Family::EquiSym],
    }
}

/// Squared L² norm of a basis function over `domain`; the equilateral
/// triangle is two copies of the hemiequilateral one.
pub fn norm_sq_on(domain: TriangleKind, idx: EigenIndex) -> f64 {
    match domain {
        TriangleKind::Equilateral => 2.0 * basis_norm_sq(idx),
        _ => basis_norm_sq(idx),
    }
}

/// Canonical coefficients of a truncated expansion, ordered by (family, m, n).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    domain: TriangleKind,
    families: Vec<Family>,
    band: u32,
    backend: Backend,
    order: Option<usize>,
    entries: BTreeMap<EigenIndex, f64>,
}

impl CoefficientTable {
    pub fn new(domain: TriangleKind, families: &[Family], band: u32, backend: Backend) -> Result<Self> {
        if band == 0 {
            return Err(Error::InvalidArgument("band N must be at least 1".into()));
        }
        Ok(CoefficientTable {
            domain,
            families: validate_families(domain, families)?,
            band,
            backend,
            order: None,
            entries: BTreeMap::new(),
        })
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = Some(order);
        self
    }

    pub fn insert(&mut self, idx: EigenIndex, value: f64) -> Result<()> {
        if !self.families.contains(&idx.family()) {
            return Err(Error::InvalidArgument(format!("{idx} is outside the table's families")));
        }
        if idx.n() > self.band {
            return Err(Error::InvalidArgument(format!("{idx} is outside band {}", self.band)));
        }
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite coefficient for {idx}")));
        }
        self.entries.insert(idx, value);
        Ok(())
    }

    /// Adds another table's entries; both must share domain, band and backend.
    pub fn merge(&mut self, other: &CoefficientTable) -> Result<()> {
        if other.band != self.band || other.backend != self.backend {
            return Err(Error::InvalidArgument("cannot merge tables of different band or backend".into()));
        }
        let mut fams = self.families.clone();
        fams.extend(&other.families);
        self.families = validate_families(self.domain, &fams)?;
        for (k, v) in &other.entries {
            self.insert(*k, *v)?;
        }
        Ok(())
    }

    pub fn domain(&self) -> TriangleKind {
        self.domain
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn band(&self) -> u32 {
        self.band
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn get(&self, idx: EigenIndex) -> Option<f64> {
        self.entries.get(&idx).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (EigenIndex, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Restricts the table to one family, keeping domain and provenance.
    pub fn restrict(&self, family: Family) -> Result<CoefficientTable> {
        let mut t = CoefficientTable::new(self.domain, &[family], self.band, self.backend)?;
        t.order = self.order;
        for (k, v) in self.entries() {
            if k.family() == family {
                t.insert(k, v)?;
            }
        }
        Ok(t)
    }

    pub fn synthesizer(&self) -> Synthesizer {
        Synthesizer {
            terms: self.entries.iter().map(|(k, v)| (ClosedForm::new(*k), *v)).collect(),
        }
    }

    /// Partial sum at each point, which must lie in the table's domain.
    pub fn synthesize(&self, points: &[Point2]) -> Result<Vec<f64>> {
        let domain = TriangleDomain::new(self.domain);
        for p in points {
            domain.require_inside(*p)?;
        }
        let s = self.synthesizer();
        Ok(points.par_iter().map(|p| s.eval(*p)).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = TableFile {
            domain: self.domain.as_str().to_string(),
            family: family_label(&self.families),
            n: self.band,
            backend: self.backend.as_str().to_string(),
            entries: self
                .entries()
                .map(|(k, v)| EntryFile { family: k.family().as_str().to_string(), m: k.m(), n: k.n(), value: v })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(s)?;
        let domain = TriangleKind::parse(&file.domain)
            .ok_or_else(|| Error::Format(format!("unknown domain {:?}", file.domain)))?;
        let families = parse_family_label(&file.family)?;
        let backend = Backend::parse(&file.backend)
            .ok_or_else(|| Error::Format(format!("unknown backend {:?}", file.backend)))?;
        let mut table = CoefficientTable::new(domain, &families, file.n, backend)?;
        for e in file.entries {
            let family = Family::parse(&e.family)
                .ok_or_else(|| Error::Format(format!("unknown family {:?}", e.family)))?;
            table.insert(EigenIndex::new(family, e.m, e.n)?, e.value)?;
        }
        Ok(table)
    }
}

fn family_label(families: &[Family]) -> String {
    match families {
        [f] => f.as_str().to_string(),
        _ => "all".to_string(),
    }
}

fn parse_family_label(s: &str) -> Result<Vec<Family>> {
    if s == "all" {
        return Ok(vec![Family::EquiAntisym, Family::EquiSym]);
    }
    Family::parse(s)
        .map(|f| vec![f])
        .ok_or_else(|| Error::Format(format!("unknown family {s:?}")))
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    domain: String,
    family: String,
    #[serde(rename = "N")]
    n: u32,
    backend: String,
    entries: Vec<EntryFile>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    family: String,
    m: u32,
    n: u32,
    value: f64,
}

/// Pre-built closed forms of a table, summed in index order.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    terms: Vec<(ClosedForm, f64)>,
}

impl Synthesizer {
    pub fn eval(&self, p: Point2) -> f64 {
        let mut acc = 0.0;
        for (cf, c) in &self.terms {
            acc += c * cf.eval(p);
        }
        acc
    }
}

/// Partial sum of `table` at `points`.
pub fn synthesize(table: &CoefficientTable, points: &[Point2]) -> Result<Vec<f64>> {
    table.synthesize(points)
}
