use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{analyze, AnalysisOptions};
use super::{validate_families, Backend, CoefficientTable};
use crate::eigenbasis::Family;
use crate::error::{Error, Result};
use crate::geometry::{mirror_split, Point2, TriangleDomain, TriangleKind};
use crate::quadrature::{check_exponent, lp_norm_of_samples, triangle_rule, QuadratureRule, MAX_ORDER};

/// Which part of `f` a convergence row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    /// `f` itself on its domain.
    Total,
    /// The `x`-odd part on the right half of the equilateral triangle.
    Antisym,
    /// The `x`-even part on the right half of the equilateral triangle.
    Sym,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Component::Total => "total",
            Component::Antisym => "antisym",
            Component::Sym => "sym",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub function: String,
    pub component: Component,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub error: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub function: String,
    pub domain: TriangleKind,
    pub backend: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Errors for one `(component, p)` series in increasing `N`.
    pub fn series(&self, component: Component, p: f64) -> Vec<(u32, f64)> {
        self.rows
            .iter()
            .filter(|r| r.component == component && r.p == p)
            .map(|r| (r.n, r.error))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOptions {
    pub ps: Vec<f64>,
    pub bands: Vec<u32>,
    pub analysis: AnalysisOptions,
    /// Per-direction order of the error rule; `None` picks `max(64, 4·max N)`.
    pub error_order: Option<usize>,
    /// Record wall-clock seconds per row; otherwise the column is 0.
    pub timing: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            ps: vec![2.0],
            bands: vec![4, 8, 16, 32],
            analysis: AnalysisOptions::default(),
            error_order: None,
            timing: true,
        }
    }
}

impl StudyOptions {
    fn validate(&self) -> Result<()> {
        if self.ps.is_empty() || self.bands.is_empty() {
            return Err(Error::InvalidArgument("p and N lists must be non-empty".into()));
        }
        for &p in &self.ps {
            check_exponent(p)?;
        }
        if self.bands[0] == 0 || self.bands.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!("N list {:?} must be positive and strictly increasing", self.bands)));
        }
        Ok(())
    }

    fn resolved_error_order(&self) -> usize {
        let max_n = *self.bands.last().expect("validated non-empty") as usize;
        self.error_order.unwrap_or((4 * max_n).clamp(64, MAX_ORDER))
    }
}

/// One band of a study: the table of `f` and how long it took.
struct Stage {
    table: CoefficientTable,
    seconds: f64,
}

fn errors_on<F>(f: &F, table: &CoefficientTable, rule: &QuadratureRule, ps: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(Point2) -> f64 + Sync,
{
    let synth = table.synthesizer();
    let exact = rule.sample(f)?;
    let diff: Vec<f64> = rule.nodes.par_iter().zip(&exact).map(|(q, v)| synth.eval(*q) - v).collect();
    ps.iter().map(|&p| lp_norm_of_samples(&diff, p, rule)).collect()
}

/// `‖S_N f − f‖_p` over the requested bands and exponents.
///
/// On the equilateral triangle `f` is split into its `x`-odd and `x`-even
/// parts; each is expanded on the right half in its own family and reported
/// as a component row, and the recombined partial sum gives the total row on
/// the whole triangle. Errors use a Gauss-Duffy rule of at least twice the
/// largest band in each direction.
pub fn convergence_study<F>(
    function: &str,
    f: F,
    domain: TriangleKind,
    families: &[Family],
    opts: &StudyOptions,
) -> Result<ConvergenceReport>
where
    F: Fn(Point2) -> f64 + Sync,
{
    opts.validate()?;
    let families = validate_families(domain, families)?;
    let error_order = opts.resolved_error_order();
    if error_order < 2 * *opts.bands.last().expect("validated") as usize {
        return Err(Error::InvalidArgument(format!("error rule order {error_order} is below twice the largest band")));
    }
    let full_rule = triangle_rule(&TriangleDomain::new(domain), error_order)?;
    let half_rule = match domain {
        TriangleKind::Equilateral => Some(triangle_rule(&TriangleDomain::new(TriangleKind::Hemiequilateral), error_order)?),
        _ => None,
    };
    let (odd, even) = mirror_split(&f);
    let mut rows = Vec::new();
    let mut push = |component: Component, band: u32, errors: Vec<f64>, seconds: f64| {
        for (&p, error) in opts.ps.iter().zip(errors) {
            rows.push(ConvergenceRow { function: function.to_string(), component, p, n: band, error, seconds });
        }
    };
    let clock = |start: Instant| if opts.timing { start.elapsed().as_secs_f64() } else { 0.0 };

    for &band in &opts.bands {
        let Some(half) = &half_rule else {
            let start = Instant::now();
            let table = analyze(&f, domain, &families, band, &opts.analysis)?;
            let errors = errors_on(&f, &table, &full_rule, &opts.ps)?;
            push(Component::Total, band, errors, clock(start));
            continue;
        };
        let start = Instant::now();
        let mut parts = Vec::new();
        for &family in &families {
            let part_start = Instant::now();
            let (component, table) = match family {
                Family::EquiAntisym => (Component::Antisym, analyze(&odd, TriangleKind::Hemiequilateral, &[family], band, &opts.analysis)?),
                _ => (Component::Sym, analyze(&even, TriangleKind::Hemiequilateral, &[family], band, &opts.analysis)?),
            };
            let errors = match component {
                Component::Antisym => errors_on(&odd, &table, half, &opts.ps)?,
                _ => errors_on(&even, &table, half, &opts.ps)?,
            };
            parts.push((component, errors, clock(part_start), table));
        }
        let stage = recombine(domain, &families, band, opts.analysis.backend, &parts, start, opts.timing)?;
        let errors = errors_on(&f, &stage.table, &full_rule, &opts.ps)?;
        push(Component::Total, band, errors, stage.seconds);
        for (component, errors, seconds, _) in parts {
            push(component, band, errors, seconds);
        }
    }
    Ok(ConvergenceReport {
        function: function.to_string(),
        domain,
        backend: opts.analysis.backend.as_str().to_string(),
        rows,
    })
}

/// Coefficients of the half-triangle parts are the coefficients on the whole
/// triangle: both the inner product and the norm double.
fn recombine(
    domain: TriangleKind,
    families: &[Family],
    band: u32,
    backend: Backend,
    parts: &[(Component, Vec<f64>, f64, CoefficientTable)],
    start: Instant,
    timing: bool,
) -> Result<Stage> {
    let mut table = CoefficientTable::new(domain, families, band, backend)?;
    for (_, _, _, part) in parts {
        for (k, v) in part.entries() {
            table.insert(k, v)?;
        }
    }
    let seconds = if timing { start.elapsed().as_secs_f64() } else { 0.0 };
    Ok(Stage { table, seconds })
}
