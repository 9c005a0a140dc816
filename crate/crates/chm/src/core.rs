//! Phase arithmetic, the matrix container and the diagonal/permutation
//! transforms that every other module builds on.
//!
//! Indices are 0-based throughout the crate. Matrices are stored unscaled:
//! every entry is unimodular and a Hadamard matrix satisfies `H H† = N·I`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;

use num::complex::Complex64;
use num::rational::Rational64;
use num::{Integer, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ChmError;

/// Default tolerance on `||z| − 1|` for stored entries.
pub const EPS_UNIMOD: f64 = 1e-12;
/// Default per-entry tolerance when checking an equivalence witness.
pub const EPS_EQUIV: f64 = 1e-9;

/// An angle, either an exact rational number of turns or a floating radian value.
///
/// Exact values are kept in lowest terms in `[0, 1)`; approximate values are
/// normalized to `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseValue {
    Exact(Rational64),
    Approx(f64),
}

fn normalize_turns(r: Rational64) -> Rational64 {
    let q = *r.denom();
    let p = r.numer().mod_floor(&q);
    Rational64::new(p, q)
}

fn normalize_radians(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

impl PhaseValue {
    pub const ZERO: PhaseValue = PhaseValue::Exact(Rational64::new_raw(0, 1));

    /// Exact phase `p/q` turns, reduced into `[0, 1)`.
    pub fn turns(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        PhaseValue::Exact(normalize_turns(Rational64::new(p, q)))
    }

    pub fn from_ratio(r: Rational64) -> Self {
        PhaseValue::Exact(normalize_turns(r))
    }

    /// A radian value. An exact `0.0` becomes the exact zero phase so that
    /// evaluating a family at the origin keeps the base matrix exact.
    pub fn from_radians(x: f64) -> Self {
        if x == 0.0 {
            PhaseValue::ZERO
        } else {
            PhaseValue::Approx(normalize_radians(x))
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PhaseValue::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PhaseValue::Exact(r) => r.is_zero(),
            PhaseValue::Approx(x) => *x == 0.0,
        }
    }

    pub fn exact(&self) -> Option<Rational64> {
        match self {
            PhaseValue::Exact(r) => Some(*r),
            PhaseValue::Approx(_) => None,
        }
    }

    pub fn radians(&self) -> f64 {
        match self {
            PhaseValue::Exact(r) => TAU * (*r.numer() as f64) / (*r.denom() as f64),
            PhaseValue::Approx(x) => *x,
        }
    }

    pub fn turns_f64(&self) -> f64 {
        match self {
            PhaseValue::Exact(r) => (*r.numer() as f64) / (*r.denom() as f64),
            PhaseValue::Approx(x) => x / TAU,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            PhaseValue::Exact(r) => PhaseValue::from_ratio(-r),
            PhaseValue::Approx(x) => PhaseValue::from_radians(-x),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (PhaseValue::Exact(a), PhaseValue::Exact(b)) => PhaseValue::from_ratio(a + b),
            _ => PhaseValue::from_radians(self.radians() + other.radians()),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Integer multiple of the phase.
    pub fn scale(&self, k: i64) -> Self {
        match self {
            PhaseValue::Exact(r) => PhaseValue::from_ratio(r * Rational64::from_integer(k)),
            PhaseValue::Approx(x) => PhaseValue::from_radians(x * k as f64),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        phase_to_complex(self)
    }
}

impl fmt::Display for PhaseValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseValue::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            PhaseValue::Approx(x) => write!(f, "{x}rad"),
        }
    }
}

const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

fn twelfth_root_power(k: i64) -> Complex64 {
    const TABLE: [(f64, f64); 12] = [
        (1.0, 0.0),
        (HALF_SQRT3, 0.5),
        (0.5, HALF_SQRT3),
        (0.0, 1.0),
        (-0.5, HALF_SQRT3),
        (-HALF_SQRT3, 0.5),
        (-1.0, 0.0),
        (-HALF_SQRT3, -0.5),
        (-0.5, -HALF_SQRT3),
        (0.0, -1.0),
        (0.5, -HALF_SQRT3),
        (HALF_SQRT3, -0.5),
    ];
    let (re, im) = TABLE[k.rem_euclid(12) as usize];
    Complex64::new(re, im)
}

fn eighth_root_power(k: i64) -> Complex64 {
    const TABLE: [(f64, f64); 8] = [
        (1.0, 0.0),
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        (0.0, 1.0),
        (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        (-1.0, 0.0),
        (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        (0.0, -1.0),
        (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    ];
    let (re, im) = TABLE[k.rem_euclid(8) as usize];
    Complex64::new(re, im)
}

/// `exp(i·angle)`. Exact phases whose denominator divides 8 or 12 use
/// closed-form constants; everything else goes through `sin`/`cos`.
pub fn phase_to_complex(p: &PhaseValue) -> Complex64 {
    match p {
        PhaseValue::Exact(r) => {
            let (num, den) = (*r.numer(), *r.denom());
            if 12 % den == 0 {
                twelfth_root_power(num * (12 / den))
            } else if den == 8 {
                eighth_root_power(num)
            } else {
                // reduce to (-1/2, 1/2] turns before scaling for accuracy
                let mut t = num as f64 / den as f64;
                if t > 0.5 {
                    t -= 1.0;
                }
                Complex64::from_polar(1.0, TAU * t)
            }
        }
        PhaseValue::Approx(x) => Complex64::from_polar(1.0, *x),
    }
}

/// A unimodular complex number, optionally carrying its exact phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnimodularEntry {
    value: Complex64,
    exact: Option<Rational64>,
}

impl UnimodularEntry {
    pub const ONE: UnimodularEntry = UnimodularEntry {
        value: Complex64::new(1.0, 0.0),
        exact: Some(Rational64::new_raw(0, 1)),
    };

    pub fn from_phase(p: PhaseValue) -> Self {
        UnimodularEntry {
            value: phase_to_complex(&p),
            exact: p.exact(),
        }
    }

    pub fn from_turns(p: i64, q: i64) -> Self {
        Self::from_phase(PhaseValue::turns(p, q))
    }

    /// Wraps a complex value. The four values `1, i, −1, −i` are recognised
    /// bit-exactly and tagged with their exact phase.
    pub fn from_complex(z: Complex64) -> Self {
        let exact = match (z.re, z.im) {
            (re, im) if re == 1.0 && im == 0.0 => Some(Rational64::new(0, 1)),
            (re, im) if re == 0.0 && im == 1.0 => Some(Rational64::new(1, 4)),
            (re, im) if re == -1.0 && im == 0.0 => Some(Rational64::new(1, 2)),
            (re, im) if re == 0.0 && im == -1.0 => Some(Rational64::new(3, 4)),
            _ => None,
        };
        UnimodularEntry { value: z, exact }
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn exact_phase(&self) -> Option<Rational64> {
        self.exact
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The phase; approximate entries report `arg` in `[0, 2π)`.
    pub fn phase(&self) -> PhaseValue {
        match self.exact {
            Some(r) => PhaseValue::Exact(r),
            None => PhaseValue::Approx(normalize_radians(self.value.arg())),
        }
    }

    pub fn conj(&self) -> Self {
        UnimodularEntry {
            value: self.value.conj(),
            exact: self.exact.map(normalize_turns_neg),
        }
    }

    pub fn neg(&self) -> Self {
        match self.exact {
            Some(r) => Self::from_phase(PhaseValue::from_ratio(r + Rational64::new(1, 2))),
            None => UnimodularEntry {
                value: -self.value,
                exact: None,
            },
        }
    }

    /// Product; exact when both factors are exact.
    pub fn mul(&self, other: &Self) -> Self {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => Self::from_phase(PhaseValue::from_ratio(a + b)),
            _ => {
                if self.exact.is_some_and(|r| r.is_zero()) {
                    *other
                } else if other.exact.is_some_and(|r| r.is_zero()) {
                    *self
                } else {
                    UnimodularEntry {
                        value: self.value * other.value,
                        exact: None,
                    }
                }
            }
        }
    }

    /// Multiplies by `exp(i·phase)`.
    pub fn shift(&self, phase: &PhaseValue) -> Self {
        self.mul(&UnimodularEntry::from_phase(*phase))
    }

    pub fn unimodular_deviation(&self) -> f64 {
        (self.value.norm() - 1.0).abs()
    }

    /// Equality that is exact on phases when both sides carry one, and within
    /// `tol` on values otherwise.
    pub fn phase_eq(&self, other: &Self, tol: f64) -> bool {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => (self.value - other.value).norm() <= tol,
        }
    }
}

fn normalize_turns_neg(r: Rational64) -> Rational64 {
    normalize_turns(-r)
}

/// Name, parameter bindings and construction history of a matrix.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub trace: Vec<String>,
}

/// Square matrix of unimodular entries, row-major.
///
/// The container only guarantees squareness and unimodularity; whether the
/// rows are orthogonal is the job of [`crate::analysis::is_hadamard`].
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardMatrix {
    n: usize,
    entries: Vec<UnimodularEntry>,
    meta: MatrixMeta,
}

impl HadamardMatrix {
    pub fn new(n: usize, entries: Vec<UnimodularEntry>) -> Result<Self, ChmError> {
        Self::with_tolerance(n, entries, EPS_UNIMOD)
    }

    pub fn with_tolerance(
        n: usize,
        entries: Vec<UnimodularEntry>,
        eps_unimod: f64,
    ) -> Result<Self, ChmError> {
        if n == 0 {
            return Err(ChmError::Empty);
        }
        if entries.len() != n * n {
            return Err(ChmError::NotSquare {
                n,
                len: entries.len(),
            });
        }
        for (idx, e) in entries.iter().enumerate() {
            let dev = e.unimodular_deviation();
            if dev.is_nan() || dev > eps_unimod {
                return Err(ChmError::NotUnimodular {
                    row: idx / n,
                    col: idx % n,
                    modulus: e.value.norm(),
                });
            }
        }
        Ok(HadamardMatrix {
            n,
            entries,
            meta: MatrixMeta::default(),
        })
    }

    pub fn from_phases(n: usize, phases: &[PhaseValue]) -> Result<Self, ChmError> {
        Self::new(
            n,
            phases.iter().map(|p| UnimodularEntry::from_phase(*p)).collect(),
        )
    }

    pub fn from_complex(n: usize, values: &[Complex64]) -> Result<Self, ChmError> {
        Self::new(
            n,
            values.iter().map(|z| UnimodularEntry::from_complex(*z)).collect(),
        )
    }

    /// Butson-style constructor: entry `(i, j)` is `exp(2πi·rows[i][j]/q)`.
    pub fn from_root_exponents(q: i64, rows: &[Vec<i64>]) -> Result<Self, ChmError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(ChmError::NotSquare {
                    n,
                    len: row.len() * n,
                });
            }
            entries.extend(row.iter().map(|&k| UnimodularEntry::from_turns(k, q)));
        }
        Self::new(n, entries)
    }

    pub(crate) fn from_parts(n: usize, entries: Vec<UnimodularEntry>, meta: MatrixMeta) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        HadamardMatrix { n, entries, meta }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[UnimodularEntry] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &UnimodularEntry {
        &self.entries[i * self.n + j]
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j].value
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn meta(&self) -> &MatrixMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut MatrixMeta {
        &mut self.meta
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.meta.name = name.into();
        self
    }

    pub fn with_params(mut self, params: Vec<(String, f64)>) -> Self {
        self.meta.params = params;
        self
    }

    pub fn traced(mut self, step: impl Into<String>) -> Self {
        self.meta.trace.push(step.into());
        self
    }

    /// True when every entry carries an exact rational phase.
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.exact.is_some())
    }

    /// Least common multiple of the phase denominators, when exact.
    pub fn root_order(&self) -> Option<i64> {
        let mut m = 1i64;
        for e in &self.entries {
            m = m.lcm(e.exact?.denom());
        }
        Some(m)
    }

    pub fn is_dephased(&self) -> bool {
        (0..self.n).all(|k| {
            self.entry(0, k).phase_eq(&UnimodularEntry::ONE, 0.0)
                && self.entry(k, 0).phase_eq(&UnimodularEntry::ONE, 0.0)
        })
    }

    pub fn map_entries(&self, f: impl Fn(usize, usize, &UnimodularEntry) -> UnimodularEntry) -> Self {
        let n = self.n;
        let entries = (0..n * n)
            .map(|idx| f(idx / n, idx % n, &self.entries[idx]))
            .collect();
        HadamardMatrix {
            n,
            entries,
            meta: self.meta.clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        self.map_entries(|i, j, _| self.entries[j * n + i])
            .traced("transpose")
    }

    pub fn conjugate(&self) -> Self {
        self.map_entries(|_, _, e| e.conj()).traced("conjugate")
    }

    pub fn hermitian(&self) -> Self {
        let n = self.n;
        self.map_entries(|i, j, _| self.entries[j * n + i].conj())
            .traced("hermitian")
    }

    /// Entrywise equality, exact on phases where both sides are exact and
    /// within `tol` otherwise.
    pub fn phase_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.phase_eq(b, tol))
    }

    /// Entrywise equality requiring exact phases on both sides.
    pub fn exactly_equal(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.exact.is_some() && a.exact == b.exact)
    }

    /// Largest entrywise distance `|A_ij − B_ij|`.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.value - b.value).norm())
            .fold(0.0, f64::max)
    }

    /// Rows permuted so that row `i` of the result is row `p.map()[i]` of `self`.
    pub fn permute_rows(&self, p: &PermutationVector) -> Self {
        let n = self.n;
        self.map_entries(|i, j, _| self.entries[p.map[i] * n + j])
    }

    /// Columns permuted so that column `j` of the result is column `p.map()[j]`.
    pub fn permute_cols(&self, p: &PermutationVector) -> Self {
        let n = self.n;
        self.map_entries(|i, j, _| self.entries[i * n + p.map[j]])
    }
}

/// Log-Hadamard matrix: `H_kl = exp(i·Φ_kl)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPhaseMatrix {
    pub n: usize,
    pub phases: Vec<PhaseValue>,
}

impl LogPhaseMatrix {
    pub fn get(&self, i: usize, j: usize) -> PhaseValue {
        self.phases[i * self.n + j]
    }

    /// `q·Φ/2π` as integers in `0..q`, if every entry is within `tol` of one.
    pub fn root_exponents(&self, q: i64, tol: f64) -> Option<Vec<Vec<i64>>> {
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                let k = match self.get(i, j) {
                    PhaseValue::Exact(r) => {
                        let scaled = r * Rational64::from_integer(q);
                        if !scaled.is_integer() {
                            return None;
                        }
                        scaled.to_integer()
                    }
                    PhaseValue::Approx(x) => {
                        let s = x * q as f64 / TAU;
                        let k = s.round();
                        if (s - k).abs() > tol {
                            return None;
                        }
                        k as i64
                    }
                };
                row.push(k.rem_euclid(q));
            }
            rows.push(row);
        }
        Some(rows)
    }
}

/// Diagonal unitary `diag(exp(i·φ_1), …, exp(i·φ_n))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalPhase {
    pub phases: Vec<PhaseValue>,
}

impl DiagonalPhase {
    pub fn new(phases: Vec<PhaseValue>) -> Self {
        DiagonalPhase { phases }
    }

    pub fn identity(n: usize) -> Self {
        DiagonalPhase {
            phases: vec![PhaseValue::ZERO; n],
        }
    }

    /// `diag(1, exp(i·x_1), …)`, the shape used for the free phases of the
    /// doubling and block constructions.
    pub fn leading_one(rest: &[f64]) -> Self {
        let mut phases = vec![PhaseValue::ZERO];
        phases.extend(rest.iter().map(|&x| PhaseValue::from_radians(x)));
        DiagonalPhase { phases }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// A column-side dephaser must have a zero leading phase.
    pub fn is_column_dephaser(&self) -> bool {
        self.phases.first().is_some_and(|p| p.is_zero())
    }

    pub fn inverse(&self) -> Self {
        DiagonalPhase {
            phases: self.phases.iter().map(|p| p.neg()).collect(),
        }
    }

    pub fn entry(&self, k: usize) -> UnimodularEntry {
        UnimodularEntry::from_phase(self.phases[k])
    }
}

/// A bijection on `0..n`.
///
/// As a left factor `P·M`, row `i` of the product is row `map[i]` of `M`; as a
/// right factor `M·P`, column `j` of the product is column `map[j]` of `M`.
/// With that reading the matrix `[e_{σ(1)}, …, e_{σ(n)}]` (columns listed)
/// corresponds to `map = σ` on the right and its transpose to `map = σ` on
/// the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PermutationVector {
    map: Vec<usize>,
}

impl PermutationVector {
    pub fn new(map: Vec<usize>) -> Result<Self, ChmError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || seen[m] {
                return Err(ChmError::InvalidPermutation(map.clone()));
            }
            seen[m] = true;
        }
        Ok(PermutationVector { map })
    }

    pub fn identity(n: usize) -> Self {
        PermutationVector {
            map: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        PermutationVector { map }
    }

    /// Build from 1-based column lists such as `[e1, e3, e2, e4]`.
    pub fn from_one_based(cols: &[usize]) -> Result<Self, ChmError> {
        Self::new(cols.iter().map(|c| c.wrapping_sub(1)).collect())
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        PermutationVector { map: inv }
    }
}

/// The tuple `(D1, P1, P2, D2)` with `A = D1·P1·B·P2·D2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceWitness {
    pub d1: DiagonalPhase,
    pub p1: PermutationVector,
    pub p2: PermutationVector,
    pub d2: DiagonalPhase,
}

impl EquivalenceWitness {
    pub fn identity(n: usize) -> Self {
        EquivalenceWitness {
            d1: DiagonalPhase::identity(n),
            p1: PermutationVector::identity(n),
            p2: PermutationVector::identity(n),
            d2: DiagonalPhase::identity(n),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.p1.is_identity()
            && self.p2.is_identity()
            && self.d1.phases.iter().all(|p| p.is_zero())
            && self.d2.phases.iter().all(|p| p.is_zero())
    }

    pub fn n(&self) -> usize {
        self.p1.len()
    }

    /// The witness mapping the image back onto the original.
    pub fn inverse(&self) -> Self {
        let q1 = self.p1.inverse();
        let q2 = self.p2.inverse();
        EquivalenceWitness {
            d1: DiagonalPhase::new(q1.map.iter().map(|&r| self.d1.phases[r].neg()).collect()),
            p1: q1.clone(),
            p2: q2.clone(),
            d2: DiagonalPhase::new(q2.map.iter().map(|&s| self.d2.phases[s].neg()).collect()),
        }
    }

    /// The witness equal to applying `self` first and `next` second.
    pub fn then(&self, next: &Self) -> Self {
        let n = self.n();
        let p1: Vec<usize> = (0..n).map(|i| self.p1.map[next.p1.map[i]]).collect();
        let p2: Vec<usize> = (0..n).map(|j| self.p2.map[next.p2.map[j]]).collect();
        let d1 = (0..n)
            .map(|i| next.d1.phases[i].add(&self.d1.phases[next.p1.map[i]]))
            .collect();
        let d2 = (0..n)
            .map(|j| self.d2.phases[next.p2.map[j]].add(&next.d2.phases[j]))
            .collect();
        EquivalenceWitness {
            d1: DiagonalPhase::new(d1),
            p1: PermutationVector { map: p1 },
            p2: PermutationVector { map: p2 },
            d2: DiagonalPhase::new(d2),
        }
    }
}

/// `D1·P1·M·P2·D2`; phases add, so exact inputs give exact outputs.
pub fn apply_equivalence(
    m: &HadamardMatrix,
    w: &EquivalenceWitness,
) -> Result<HadamardMatrix, ChmError> {
    let n = m.n();
    for len in [w.d1.len(), w.p1.len(), w.p2.len(), w.d2.len()] {
        if len != n {
            return Err(ChmError::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    let out = m.map_entries(|i, j, _| {
        let base = m.entry(w.p1.map[i], w.p2.map[j]);
        w.d1.entry(i).mul(base).mul(&w.d2.entry(j))
    });
    Ok(out.traced("equivalence"))
}

/// The three variants that are again Hadamard whenever `M` is.
#[derive(Clone, Debug)]
pub struct MatrixVariants {
    pub transpose: HadamardMatrix,
    pub conjugate: HadamardMatrix,
    pub hermitian: HadamardMatrix,
}

pub fn matrix_variants(m: &HadamardMatrix) -> MatrixVariants {
    MatrixVariants {
        transpose: m.transpose(),
        conjugate: m.conjugate(),
        hermitian: m.hermitian(),
    }
}

/// Real phase-pattern family `{H ∘ EXP(i·Σ α_k R_k)}` over a dephased base.
#[derive(Clone, Debug)]
pub struct AffineFamily {
    base: HadamardMatrix,
    patterns: Vec<Vec<f64>>,
    param_names: Vec<String>,
}

impl AffineFamily {
    /// Validates that every pattern vanishes on the first row and column and
    /// that the patterns are linearly independent.
    pub fn new(
        base: HadamardMatrix,
        patterns: Vec<Vec<f64>>,
        param_names: Vec<String>,
    ) -> Result<Self, ChmError> {
        let n = base.n();
        if param_names.len() != patterns.len() {
            return Err(ChmError::Arity {
                id: base.meta().name.clone(),
                expected: patterns.len(),
                found: param_names.len(),
            });
        }
        for (k, r) in patterns.iter().enumerate() {
            if r.len() != n * n {
                return Err(ChmError::DimensionMismatch {
                    expected: n * n,
                    found: r.len(),
                });
            }
            if (0..n).any(|t| r[t] != 0.0 || r[t * n] != 0.0) {
                return Err(ChmError::InvalidPattern(format!(
                    "pattern {k} is non-zero on the first row or column"
                )));
            }
        }
        if float_rank(&patterns, n * n) != patterns.len() {
            return Err(ChmError::InvalidPattern(
                "patterns are linearly dependent".into(),
            ));
        }
        Ok(AffineFamily {
            base,
            patterns,
            param_names,
        })
    }

    pub fn base(&self) -> &HadamardMatrix {
        &self.base
    }

    pub fn patterns(&self) -> &[Vec<f64>] {
        &self.patterns
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn dim(&self) -> usize {
        self.patterns.len()
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }
}

/// Rank by Gaussian elimination with partial pivoting; used only for small
/// sanity checks on pattern lists.
pub(crate) fn float_rank(rows: &[Vec<f64>], ncols: usize) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1.0);
    let tol = 1e-9 * scale;
    let mut rank = 0;
    for col in 0..ncols {
        if rank == a.len() {
            break;
        }
        let (best, val) = (rank..a.len())
            .map(|r| (r, a[r][col].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            continue;
        }
        a.swap(rank, best);
        for r in rank + 1..a.len() {
            let f = a[r][col] / a[rank][col];
            if f != 0.0 {
                for c in col..ncols {
                    a[r][c] -= f * a[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}
