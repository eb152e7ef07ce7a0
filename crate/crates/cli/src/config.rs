//! Command-line flags, the optional `key=value` config file, and the
//! validated settings built from both.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trilap_core::{Backend, Family, Suite, TriangleKind};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "trilap", version, about = "Eigenfunction expansions on the 45-90-45, 30-60-90 and equilateral triangles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sample one eigenfunction on a grid
    Basis,
    /// Expansion coefficients of a corpus function
    Expand,
    /// Evaluate a coefficient file on a grid
    Synth,
    /// Lp errors of partial sums over a list of bands
    Converge,
    /// Run verification suites
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Every flag is optional so that a config file can fill the gaps.
#[derive(Debug, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub domain: Option<String>,
    /// antisym, sym or all
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(short = 'm', global = true)]
    pub m: Option<u32>,
    #[arg(short = 'n', global = true)]
    pub n: Option<u32>,
    /// Comma-separated bands
    #[arg(long = "N", global = true, value_delimiter = ',')]
    pub bands: Option<Vec<u32>>,
    /// Comma-separated exponents
    #[arg(long = "p", global = true, value_delimiter = ',')]
    pub ps: Option<Vec<f64>>,
    /// quadrature or transform
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// Sampling grid for basis/synth; transform order for expand
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Gauss-Legendre order per direction
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Relative tolerance for folded-copy checksums
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output path, `-` for stdout
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Band for verification suites
    #[arg(long, global = true)]
    pub band: Option<u32>,
    /// Comma-separated suite names
    #[arg(long, global = true, value_delimiter = ',')]
    pub suite: Option<Vec<String>>,
    /// Corpus function id
    #[arg(long, global = true)]
    pub function: Option<String>,
    /// Coefficient file
    #[arg(long, global = true)]
    pub coeffs: Option<PathBuf>,
    /// Write 0 in the seconds column
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Include per-family component rows on the equilateral triangle
    #[arg(long, global = true)]
    pub components: bool,
    /// key=value file; flags given on the command line win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',')
        .map(|s| s.trim().parse().map_err(|_| CliError::usage(format!("bad value {s:?} for {key}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| CliError::usage(format!("bad value {v:?} for {key}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::usage(format!("bad value {v:?} for {key}"))),
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl Flags {
    /// Fills unset flags from config entries.
    pub fn merge(&mut self, entries: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (k, v) in entries {
            match k.as_str() {
                "domain" => fill(&mut self.domain, v.clone()),
                "family" => fill(&mut self.family, v.clone()),
                "m" => fill(&mut self.m, parse_one(k, v)?),
                "n" => fill(&mut self.n, parse_one(k, v)?),
                "N" => fill(&mut self.bands, parse_list(k, v)?),
                "p" => fill(&mut self.ps, parse_list(k, v)?),
                "backend" => fill(&mut self.backend, v.clone()),
                "grid" => fill(&mut self.grid, parse_one(k, v)?),
                "order" => fill(&mut self.order, parse_one(k, v)?),
                "tol" => fill(&mut self.tol, parse_one(k, v)?),
                "seed" => fill(&mut self.seed, parse_one(k, v)?),
                "out" => fill(&mut self.out, v.clone()),
                "format" => {
                    let f = Format::from_str(v, true).map_err(|_| CliError::usage(format!("bad value {v:?} for format")))?;
                    fill(&mut self.format, f)
                }
                "band" => fill(&mut self.band, parse_one(k, v)?),
                "suite" => fill(&mut self.suite, v.split(',').map(|s| s.trim().to_string()).collect()),
                "function" => fill(&mut self.function, v.clone()),
                "coeffs" => fill(&mut self.coeffs, PathBuf::from(v)),
                "no-timing" | "no_timing" => self.no_timing |= parse_bool(k, v)?,
                "components" => self.components |= parse_bool(k, v)?,
                _ => return Err(CliError::usage(format!("unknown config key {k:?}"))),
            }
        }
        Ok(())
    }
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

pub fn parse_domain(s: &str) -> Result<TriangleKind, CliError> {
    TriangleKind::parse(s).ok_or_else(|| CliError::usage(format!("unknown domain {s:?}")))
}

pub fn parse_backend(s: &str) -> Result<Backend, CliError> {
    Backend::parse(s).ok_or_else(|| CliError::usage(format!("unknown backend {s:?}; expected quadrature or transform")))
}

/// Resolves `antisym | sym | all` (or a full family name) against a domain.
pub fn parse_families(s: &str, domain: TriangleKind) -> Result<Vec<Family>, CliError> {
    let fams = match (s, domain) {
        ("antisym", TriangleKind::Isosceles45) | ("all", TriangleKind::Isosceles45) => vec![Family::SquareAntisym],
        ("antisym", _) => vec![Family::EquiAntisym],
        ("sym", TriangleKind::Isosceles45) => {
            return Err(CliError::usage("the 45-90-45 triangle has no symmetric family"));
        }
        ("sym", _) => vec![Family::EquiSym],
        ("all", _) => vec![Family::EquiAntisym, Family::EquiSym],
        _ => vec![Family::parse(s).ok_or_else(|| CliError::usage(format!("unknown family {s:?}")))?],
    };
    Ok(fams)
}

pub fn parse_suites(names: &[String]) -> Result<Vec<Suite>, CliError> {
    if names.iter().any(|s| s == "all") {
        return Ok(Suite::ALL.to_vec());
    }
    names
        .iter()
        .map(|s| Suite::parse(s).ok_or_else(|| CliError::usage(format!("unknown suite {s:?}"))))
        .collect()
}
