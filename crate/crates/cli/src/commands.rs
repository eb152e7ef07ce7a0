use serde_json::json;
use trilap_core::corpus::{self, CorpusFunction};
use trilap_core::expansion::norm_sq_on;
use trilap_core::geometry::Location;
use trilap_core::{
    analyze, classify_lattice_point, convergence_study, eigenvalue, eval_closed, run_suite, AnalysisOptions, Backend,
    CoefficientTable, Component, ConvergenceReport, Error, Family, IndexClass, Point2, StudyOptions, TriangleDomain,
    TriangleKind, DEFAULT_FOLD_TOL,
};

use crate::config::{parse_backend, parse_domain, parse_families, parse_suites, Command, Flags, Format};
use crate::output::{csv, num};
use crate::CliError;

/// What a command produced: the data for `--out`, an optional stderr note
/// and the exit status.
pub struct Output {
    pub text: String,
    pub note: Option<String>,
    pub status: u8,
}

impl Output {
    fn data(text: String) -> Self {
        Output { text, note: None, status: 0 }
    }
}

pub fn dispatch(command: Command, flags: &Flags) -> Result<Output, CliError> {
    match command {
        Command::Basis => basis(flags),
        Command::Expand => expand(flags),
        Command::Synth => synth(flags),
        Command::Converge => converge(flags),
        Command::Verify => verify(flags),
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

/// Nodes of a `(grid+1)²` uniform grid over the bounding box that are not
/// outside the triangle, ordered by row then column.
fn grid_points(domain: TriangleKind, grid: usize) -> Result<Vec<(Point2, Location)>, CliError> {
    if grid == 0 {
        return Err(CliError::usage("--grid must be at least 1"));
    }
    let d = TriangleDomain::new(domain);
    let (lo, hi) = d.bounding_box();
    let mut pts = Vec::new();
    for j in 0..=grid {
        for i in 0..=grid {
            let t = |k: usize, a: f64, b: f64| if k == grid { b } else { a + (b - a) * k as f64 / grid as f64 };
            let p = Point2::new(t(i, lo.x, hi.x), t(j, lo.y, hi.y));
            let loc = d.contains(p, 1e-12)?;
            if loc != Location::Exterior {
                pts.push((p, loc));
            }
        }
    }
    Ok(pts)
}

fn single_family(flags: &Flags, domain: TriangleKind) -> Result<Family, CliError> {
    match parse_families(flags.family.as_deref().unwrap_or("antisym"), domain)?.as_slice() {
        [f] => Ok(*f),
        _ => Err(CliError::usage("basis takes a single family")),
    }
}

fn basis(flags: &Flags) -> Result<Output, CliError> {
    let domain = parse_domain(flags.domain.as_deref().unwrap_or("hemiequilateral"))?;
    let family = single_family(flags, domain)?;
    let (m, n) = match (flags.m, flags.n) {
        (Some(m), Some(n)) => (m, n),
        _ => return Err(CliError::usage("basis needs -m and -n")),
    };
    let idx = match classify_lattice_point(family, m, n)? {
        IndexClass::Canonical(idx) => idx,
        IndexClass::FoldsTo { canonical, sign, multiplicity } => {
            return Err(CliError::usage(format!(
                "FoldsTo: ({m}, {n}) is {sign} times {canonical} (multiplicity {multiplicity}); not canonical"
            )))
        }
        IndexClass::Zero(reason) => return Err(CliError::usage(format!("Zero: {reason}"))),
    };
    let lambda = eigenvalue(idx);
    let norm_sq = norm_sq_on(domain, idx);
    let pts = grid_points(domain, flags.grid.unwrap_or(32))?;
    let text = match flags.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = format!(
                "# domain={domain},family={},m={m},n={n},eigenvalue={},norm_sq={}\n",
                family.as_str(),
                num(lambda),
                num(norm_sq)
            );
            s += &csv(&["x", "y", "value"], pts.iter().map(|(p, _)| vec![num(p.x), num(p.y), num(eval_closed(idx, *p))]));
            s
        }
        Format::Json => json_text(&json!({
            "domain": domain.as_str(),
            "family": family.as_str(),
            "m": m,
            "n": n,
            "eigenvalue": lambda,
            "norm_sq": norm_sq,
            "points": pts.iter().map(|(p, _)| json!({"x": p.x, "y": p.y, "value": eval_closed(idx, *p)})).collect::<Vec<_>>(),
        })),
    };
    Ok(Output::data(text))
}

fn corpus_function(flags: &Flags) -> Result<&'static CorpusFunction, CliError> {
    let id = flags.function.as_deref().ok_or_else(|| CliError::usage("--function is required"))?;
    let c = corpus::lookup(id)?;
    if let Some(d) = flags.domain.as_deref() {
        if parse_domain(d)? != c.domain {
            return Err(CliError::usage(format!("{id} lives on the {} triangle, not {d}", c.domain)));
        }
    }
    Ok(c)
}

fn analysis_options(flags: &Flags, backend: Backend) -> Result<AnalysisOptions, CliError> {
    let fold_tol = flags.tol.unwrap_or(DEFAULT_FOLD_TOL);
    if !fold_tol.is_finite() || fold_tol <= 0.0 {
        return Err(Error::InvalidTolerance(fold_tol).into());
    }
    let order = match backend {
        Backend::FoldedTransform => flags.order.or(flags.grid),
        Backend::Quadrature => flags.order,
    };
    Ok(AnalysisOptions { backend, order, fold_tol })
}

fn expand(flags: &Flags) -> Result<Output, CliError> {
    let c = corpus_function(flags)?;
    let families = match flags.family.as_deref() {
        Some(s) => parse_families(s, c.domain)?,
        None => c.families.to_vec(),
    };
    let band = match flags.bands.as_deref() {
        None => 8,
        Some([n]) => *n,
        Some(_) => return Err(CliError::usage("expand takes a single --N")),
    };
    let backend = parse_backend(flags.backend.as_deref().unwrap_or("quadrature"))?;
    let table = analyze(c.evaluator(), c.domain, &families, band, &analysis_options(flags, backend)?)?;
    let text = match flags.format.unwrap_or(Format::Json) {
        Format::Json => table.to_json()? + "\n",
        Format::Csv => csv(
            &["family", "m", "n", "value"],
            table.entries().map(|(k, v)| vec![k.family().as_str().to_string(), k.m().to_string(), k.n().to_string(), num(v)]),
        ),
    };
    Ok(Output::data(text))
}

fn synth(flags: &Flags) -> Result<Output, CliError> {
    let path = flags.coeffs.as_ref().ok_or_else(|| CliError::usage("--coeffs is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let table = CoefficientTable::from_json(&text)?;
    if let Some(d) = flags.domain.as_deref() {
        if parse_domain(d)? != table.domain() {
            return Err(CliError::usage(format!("coefficient file is for the {} triangle", table.domain())));
        }
    }
    let exact = match flags.function.as_deref() {
        Some(_) => {
            let c = corpus_function(flags)?;
            if c.domain != table.domain() {
                return Err(CliError::usage(format!("{} lives on the {} triangle", c.id, c.domain)));
            }
            Some(c)
        }
        None => None,
    };
    let pts = grid_points(table.domain(), flags.grid.unwrap_or(32))?;
    let points: Vec<Point2> = pts.iter().map(|(p, _)| *p).collect();
    let values = table.synthesize(&points)?;
    let mut note = None;
    if let Some(c) = exact {
        let (count, worst) = pts
            .iter()
            .zip(&values)
            .filter(|((_, loc), _)| *loc == Location::Interior)
            .fold((0usize, 0.0f64), |(k, w), ((p, _), v)| (k + 1, w.max((v - c.eval(*p)).abs())));
        note = Some(format!("max |S_N f - f| over {count} interior grid points: {worst:.6e}"));
    }
    let text = match flags.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let header: &[&str] = if exact.is_some() { &["x", "y", "value", "exact"] } else { &["x", "y", "value"] };
            csv(
                header,
                points.iter().zip(&values).map(|(p, v)| {
                    let mut row = vec![num(p.x), num(p.y), num(*v)];
                    if let Some(c) = exact {
                        row.push(num(c.eval(*p)));
                    }
                    row
                }),
            )
        }
        Format::Json => json_text(&json!({
            "domain": table.domain().as_str(),
            "N": table.band(),
            "points": points.iter().zip(&values).map(|(p, v)| {
                let mut o = json!({"x": p.x, "y": p.y, "value": v});
                if let Some(c) = exact {
                    o["exact"] = json!(c.eval(*p));
                }
                o
            }).collect::<Vec<_>>(),
        })),
    };
    Ok(Output { text, note, status: 0 })
}

fn converge(flags: &Flags) -> Result<Output, CliError> {
    let id = flags.function.as_deref().ok_or_else(|| CliError::usage("--function is required"))?;
    let functions: Vec<&CorpusFunction> = if id == "all" { corpus::corpus().iter().collect() } else { vec![corpus_function(flags)?] };
    let backend = parse_backend(flags.backend.as_deref().unwrap_or("quadrature"))?;
    let opts = StudyOptions {
        ps: flags.ps.clone().unwrap_or_else(|| vec![2.0]),
        bands: flags.bands.clone().unwrap_or_else(|| vec![4, 8, 16, 32]),
        analysis: AnalysisOptions { order: flags.order, ..analysis_options(flags, backend)? },
        error_order: None,
        timing: !flags.no_timing,
    };
    let reports = functions
        .iter()
        .map(|c| {
            let families = match flags.family.as_deref() {
                Some(s) => parse_families(s, c.domain)?,
                None => c.families.to_vec(),
            };
            Ok(convergence_study(c.id, c.evaluator(), c.domain, &families, &opts)?)
        })
        .collect::<Result<Vec<ConvergenceReport>, CliError>>()?;
    let rows = reports
        .iter()
        .flat_map(|r| &r.rows)
        .filter(|row| flags.components || row.component == Component::Total);
    let text = match flags.format.unwrap_or(Format::Csv) {
        Format::Csv => csv(
            &["function", "p", "N", "error", "seconds"],
            rows.map(|row| {
                let label = match row.component {
                    Component::Total => row.function.clone(),
                    c => format!("{}:{c}", row.function),
                };
                vec![label, num(row.p), row.n.to_string(), num(row.error), num(row.seconds)]
            }),
        ),
        Format::Json => json_text(&serde_json::to_value(&reports).map_err(Error::from)?),
    };
    Ok(Output::data(text))
}

fn verify(flags: &Flags) -> Result<Output, CliError> {
    let suites = parse_suites(flags.suite.as_deref().unwrap_or(&["all".to_string()]))?;
    let band = flags.band.unwrap_or(8);
    let seed = flags.seed.unwrap_or(0);
    let reports = suites.iter().map(|s| run_suite(*s, band, seed)).collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let note = reports.iter().find(|r| !r.passed).map(|r| {
        format!(
            "suite {} failed: worst {:.3e} against tolerance {:.0e}; first counterexample: {}",
            r.suite,
            r.metric,
            r.tolerance,
            serde_json::to_string(&r.counterexample).expect("counterexamples serialise")
        )
    });
    let text = match flags.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&json!({ "passed": passed, "band": band, "seed": seed, "suites": reports })),
        Format::Csv => csv(
            &["suite", "passed", "metric", "tolerance", "checks"],
            reports.iter().map(|r| vec![r.suite.clone(), r.passed.to_string(), num(r.metric), num(r.tolerance), r.checks.to_string()]),
        ),
    };
    Ok(Output { text, note, status: if passed { 0 } else { 1 } })
}
