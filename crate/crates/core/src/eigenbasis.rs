//! Dirichlet eigenfunctions of the three reference triangles.
//!
//! Every eigenfunction is a short signed sum of rectangle product waves
//! (`sin·sin` on `[0,1]²` or `[0,√3]×[0,1]`, `cos·sin` for the family that is
//! even in `x`). A basis function is named by a canonical [`EigenIndex`]; any
//! other rectangle lattice point either folds onto a canonical index with a
//! sign or carries the zero function.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Location, Point2, ProlongationKind, Tiling, TriangleKind, EDGE_TOL, SQRT3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `u_{m,n}` on the 45-90-45 triangle, `0 < m < n`.
    #[serde(rename = "square-antisym")]
    SquareAntisym,
    /// Modes of the equilateral triangle odd in `x`, `0 < m < n`, `m ≡ n (mod 2)`.
    #[serde(rename = "equi-antisym")]
    EquiAntisym,
    /// Modes of the equilateral triangle even in `x`, `0 ≤ m < n`, `m ≡ n (mod 2)`.
    #[serde(rename = "equi-sym")]
    EquiSym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    SineSine,
    CosineSine,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::SquareAntisym, Family::EquiAntisym, Family::EquiSym];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::SquareAntisym => "square-antisym",
            Family::EquiAntisym => "equi-antisym",
            Family::EquiSym => "equi-sym",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.as_str() == s)
    }

    pub fn prolongation(self) -> ProlongationKind {
        match self {
            Family::SquareAntisym => ProlongationKind::SquareOdd,
            Family::EquiAntisym => ProlongationKind::Antisym,
            Family::EquiSym => ProlongationKind::Sym,
        }
    }

    pub fn tiling(self) -> &'static Tiling {
        self.prolongation().tiling()
    }

    /// The triangle the family is orthogonal on (one tile of its tiling).
    pub fn fundamental_domain(self) -> TriangleKind {
        match self {
            Family::SquareAntisym => TriangleKind::Isosceles45,
            Family::EquiAntisym | Family::EquiSym => TriangleKind::Hemiequilateral,
        }
    }

    pub fn basis_kind(self) -> BasisKind {
        match self {
            Family::EquiSym => BasisKind::CosineSine,
            _ => BasisKind::SineSine,
        }
    }

    /// Width of the covering rectangle; its height is always 1.
    pub fn x_length(self) -> f64 {
        match self {
            Family::SquareAntisym => 1.0,
            _ => SQRT3,
        }
    }

    /// Coefficient of a basis function's own lattice point in its rectangle expansion.
    pub fn lattice_unit(self) -> f64 {
        match self {
            Family::SquareAntisym => 1.0,
            _ => 2.0,
        }
    }

    /// Smallest lattice `m` carried by the rectangle basis.
    pub fn min_lattice_m(self) -> u32 {
        match self.basis_kind() {
            BasisKind::SineSine => 1,
            BasisKind::CosineSine => 0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A canonical basis label. Construction validates the family's constraints,
/// so every value of this type names a non-zero eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EigenIndex {
    family: Family,
    m: u32,
    n: u32,
}

impl PartialOrd for EigenIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EigenIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.family, self.m, self.n).cmp(&(other.family, other.m, other.n))
    }
}

fn is_canonical(family: Family, m: u32, n: u32) -> bool {
    match family {
        Family::SquareAntisym => 0 < m && m < n,
        Family::EquiAntisym => 0 < m && m < n && (n - m).is_multiple_of(2),
        Family::EquiSym => m < n && (n - m).is_multiple_of(2),
    }
}

impl EigenIndex {
    pub fn new(family: Family, m: u32, n: u32) -> Result<Self> {
        if is_canonical(family, m, n) {
            Ok(EigenIndex { family, m, n })
        } else {
            Err(Error::NonCanonical { family, m, n })
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

impl fmt::Display for EigenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.family, self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^k`.
    pub fn pow(k: i64) -> Sign {
        if k.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroReason {
    ParityMismatch,
    /// `m = n`
    Diagonal,
    /// `m = 3n` in the odd equilateral family
    TripleLine,
    /// `m = 0` with a sine basis in `x`
    ZeroFrequency,
}

impl fmt::Display for ZeroReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroReason::ParityMismatch => "u_{m,n} ≡ 0 when m and n have different parity",
            ZeroReason::Diagonal => "u_{m,m} ≡ 0",
            ZeroReason::TripleLine => "u_{3n,n} ≡ 0",
            ZeroReason::ZeroFrequency => "u_{0,n} ≡ 0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexClass {
    Canonical(EigenIndex),
    /// The lattice wave's reflection sum equals `sign ·` the canonical
    /// eigenfunction. `multiplicity` is 2 on the even family's `m = 3n` line,
    /// where two folded images coincide.
    FoldsTo {
        canonical: EigenIndex,
        sign: Sign,
        multiplicity: u8,
    },
    Zero(ZeroReason),
}

impl IndexClass {
    pub fn canonical(&self) -> Option<EigenIndex> {
        match *self {
            IndexClass::Canonical(c) | IndexClass::FoldsTo { canonical: c, .. } => Some(c),
            IndexClass::Zero(_) => None,
        }
    }

    /// Coefficient of this lattice wave in the canonical function's rectangle
    /// expansion, or 0 for zero classes.
    pub fn lattice_weight(&self) -> f64 {
        match *self {
            IndexClass::Canonical(c) => c.family.lattice_unit(),
            IndexClass::FoldsTo { canonical, sign, multiplicity } => {
                sign.value() * f64::from(multiplicity) * canonical.family.lattice_unit()
            }
            IndexClass::Zero(_) => 0.0,
        }
    }
}

/// All canonical indices with `n ≤ band`, ordered by `m` then `n`.
pub fn enumerate_indices(family: Family, band: u32) -> Vec<EigenIndex> {
    let mut out = Vec::new();
    for m in 0..band {
        for n in (m + 1)..=band {
            if is_canonical(family, m, n) {
                out.push(EigenIndex { family, m, n });
            }
        }
    }
    out
}

fn equi_canonical(family: Family, m: i64, n: i64) -> EigenIndex {
    debug_assert!(is_canonical(family, m as u32, n as u32));
    EigenIndex { family, m: m as u32, n: n as u32 }
}

/// Classifies a rectangle lattice point `(m, n)` of the family's product basis.
pub fn classify_lattice_point(family: Family, m: u32, n: u32) -> Result<IndexClass> {
    if n == 0 || (family == Family::SquareAntisym && m == 0) {
        return Err(Error::InvalidLatticePoint { family, m, n });
    }
    if is_canonical(family, m, n) {
        return Ok(IndexClass::Canonical(EigenIndex { family, m, n }));
    }
    if m == n {
        return Ok(IndexClass::Zero(ZeroReason::Diagonal));
    }
    let (big_m, big_n) = (i64::from(m), i64::from(n));
    match family {
        Family::SquareAntisym => Ok(IndexClass::FoldsTo {
            canonical: EigenIndex { family, m: n, n: m },
            sign: -Sign::pow(big_m + big_n),
            multiplicity: 1,
        }),
        Family::EquiAntisym | Family::EquiSym => {
            if (big_m - big_n) % 2 != 0 {
                return Ok(IndexClass::Zero(ZeroReason::ParityMismatch));
            }
            let odd = family == Family::EquiAntisym;
            if m == 0 {
                // only reachable for the odd family: sin(0) = 0
                return Ok(IndexClass::Zero(ZeroReason::ZeroFrequency));
            }
            if big_m == 3 * big_n {
                if odd {
                    return Ok(IndexClass::Zero(ZeroReason::TripleLine));
                }
                let nc = 2 * big_n;
                return Ok(IndexClass::FoldsTo {
                    canonical: equi_canonical(family, 0, nc),
                    sign: -Sign::pow(nc / 2),
                    multiplicity: 2,
                });
            }
            let nc = (big_m + big_n) / 2;
            if big_m < 3 * big_n {
                // middle wedge n < m < 3n
                let mc = (3 * big_n - big_m) / 2;
                Ok(IndexClass::FoldsTo {
                    canonical: equi_canonical(family, mc, nc),
                    sign: -Sign::pow((mc - nc) / 2),
                    multiplicity: 1,
                })
            } else {
                // outer wedge m > 3n
                let mc = (big_m - 3 * big_n) / 2;
                let s = Sign::pow((mc + nc) / 2);
                Ok(IndexClass::FoldsTo {
                    canonical: equi_canonical(family, mc, nc),
                    sign: if odd { s } else { -s },
                    multiplicity: 1,
                })
            }
        }
    }
}

/// One product wave `coef · X(π m x / L) · sin(π n y)` of a closed form,
/// with possibly negative frequencies exactly as the formula prints them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveTerm {
    pub coef: f64,
    pub m: i64,
    pub n: i64,
}

/// Closed-form trigonometric expression of one eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    family: Family,
    terms: [WaveTerm; 3],
    len: usize,
}

impl ClosedForm {
    pub fn new(idx: EigenIndex) -> Self {
        let (m, n) = (i64::from(idx.m), i64::from(idx.n));
        let t = |coef: f64, m: i64, n: i64| WaveTerm { coef, m, n };
        let zero = t(0.0, 0, 0);
        let (terms, len) = match idx.family {
            Family::SquareAntisym => ([t(1.0, m, n), t(-Sign::pow(m + n).value(), n, m), zero], 2),
            Family::EquiAntisym => (
                [
                    t(2.0, m, n),
                    t(-2.0 * Sign::pow((m + n) / 2).value(), (m + 3 * n) / 2, (m - n) / 2),
                    t(2.0 * Sign::pow((m - n) / 2).value(), (m - 3 * n) / 2, (m + n) / 2),
                ],
                3,
            ),
            Family::EquiSym => (
                [
                    t(2.0, m, n),
                    t(2.0 * Sign::pow((m + n) / 2).value(), (m + 3 * n) / 2, (m - n) / 2),
                    t(-2.0 * Sign::pow((m - n) / 2).value(), (3 * n - m) / 2, (m + n) / 2),
                ],
                3,
            ),
        };
        ClosedForm { family: idx.family, terms, len }
    }

    pub fn terms(&self) -> &[WaveTerm] {
        &self.terms[..self.len]
    }

    pub fn eval(&self, p: Point2) -> f64 {
        let mut acc = 0.0;
        for t in self.terms() {
            acc += t.coef * lattice_wave_signed(self.family, t.m, t.n, p);
        }
        acc
    }

    /// Exact Laplacian of the closed form, differentiated term by term.
    pub fn laplacian(&self, p: Point2) -> f64 {
        let l = self.family.x_length();
        let mut acc = 0.0;
        for t in self.terms() {
            let (a, b) = (PI * t.m as f64 / l, PI * t.n as f64);
            acc -= (a * a + b * b) * t.coef * lattice_wave_signed(self.family, t.m, t.n, p);
        }
        acc
    }
}

fn lattice_wave_signed(family: Family, m: i64, n: i64, p: Point2) -> f64 {
    let ax = PI * m as f64 * p.x / family.x_length();
    let by = (PI * n as f64 * p.y).sin();
    match family.basis_kind() {
        BasisKind::SineSine => ax.sin() * by,
        BasisKind::CosineSine => ax.cos() * by,
    }
}

/// The rectangle product wave at lattice point `(m, n)`.
pub fn lattice_wave(family: Family, m: u32, n: u32, p: Point2) -> f64 {
    lattice_wave_signed(family, i64::from(m), i64::from(n), p)
}

/// Closed-form value of the eigenfunction, defined on the whole covering rectangle.
pub fn eval_closed(idx: EigenIndex, p: Point2) -> f64 {
    ClosedForm::new(idx).eval(p)
}

/// Signed reflection sum `Σ_i s_i · wave(m, n, φ_i(p))` over the tiles of the
/// family's tiling. Defined for every lattice point; for a canonical index
/// it is the eigenfunction itself.
pub fn reflection_sum(family: Family, m: u32, n: u32, p: Point2) -> f64 {
    let kind = family.prolongation();
    let mut acc = 0.0;
    for tile in &kind.tiling().tiles {
        acc += kind.sign(tile) * lattice_wave(family, m, n, tile.from_fundamental.apply(p));
    }
    acc
}

/// The defining reflection sum, restricted to the fundamental triangle.
pub fn eval_by_reflection(idx: EigenIndex, p: Point2) -> Result<f64> {
    let p = p.check_finite()?;
    let fundamental = idx.family.tiling().fundamental();
    if fundamental.locate(p, EDGE_TOL) == Location::Exterior {
        return Err(Error::OutsideDomain {
            x: p.x,
            y: p.y,
            domain: idx.family.fundamental_domain().as_str(),
        });
    }
    Ok(reflection_sum(idx.family, idx.m, idx.n, p))
}

/// Eigenvalue of `-Δ` for the lattice wave `(m, n)` of the family's rectangle.
pub fn lattice_eigenvalue(family: Family, m: u32, n: u32) -> f64 {
    let (m, n) = (f64::from(m), f64::from(n));
    match family {
        Family::SquareAntisym => PI * PI * (m * m + n * n),
        _ => PI * PI * (m * m / 3.0 + n * n),
    }
}

pub fn eigenvalue(idx: EigenIndex) -> f64 {
    lattice_eigenvalue(idx.family, idx.m, idx.n)
}

/// Squared L² norm over the family's fundamental triangle.
pub fn basis_norm_sq(idx: EigenIndex) -> f64 {
    match idx.family {
        Family::SquareAntisym => 0.25,
        Family::EquiAntisym => SQRT3 / 2.0,
        Family::EquiSym if idx.m == 0 => SQRT3,
        Family::EquiSym => SQRT3 / 2.0,
    }
}

/// Sparse coefficients of an eigenfunction in its rectangle product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeExpansion {
    pub basis_kind: BasisKind,
    pub entries: BTreeMap<(u32, u32), f64>,
}

/// Rewrites the closed form over non-negative lattice frequencies, using
/// `sin(-t) = -sin t` and `cos(-t) = cos t`, and merges coincident waves.
pub fn lattice_expansion(idx: EigenIndex) -> LatticeExpansion {
    let basis_kind = idx.family.basis_kind();
    let mut entries = BTreeMap::new();
    for t in ClosedForm::new(idx).terms() {
        let mut coef = t.coef;
        if t.n < 0 {
            coef = -coef;
        }
        if t.m < 0 && basis_kind == BasisKind::SineSine {
            coef = -coef;
        }
        let key = (t.m.unsigned_abs() as u32, t.n.unsigned_abs() as u32);
        *entries.entry(key).or_insert(0.0) += coef;
    }
    entries.retain(|_, c| *c != 0.0);
    LatticeExpansion { basis_kind, entries }
}
