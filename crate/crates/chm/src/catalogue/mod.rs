//! Named generators for the catalogued complex Hadamard matrices and their
//! affine and non-affine families, `N = 1 … 16`.
//!
//! Every generator returns a dephased matrix. Fourier and Butson data keep
//! exact rational phases; matrices built from algebraic constants carry
//! double-precision phases. Parameters are radians unless a function takes
//! [`PhaseValue`]s.

mod data;
mod dsl;

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::sync::OnceLock;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use data::{AlgebraicConstants, C7C_PHASES};

use crate::analysis::{dephase, is_hadamard};
use crate::construct::{affine_eval_phases, double, leading_one_phases};
use crate::core::{AffineFamily, HadamardMatrix, PhaseValue, UnimodularEntry};
use crate::error::ChmError;
use crate::par::Execution;

/// Tolerance for entries built from the six-digit constants of C7C/C7D.
pub const APPROX_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    /// No free parameters; isolation is not claimed.
    IsolatedCandidate,
    AffineFamily,
    NonlinearFamily,
}

impl EntryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryKind::IsolatedCandidate => "isolated-candidate",
            EntryKind::AffineFamily => "affine-family",
            EntryKind::NonlinearFamily => "nonlinear-family",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogueEntry {
    pub id: String,
    pub n: usize,
    pub param_count: usize,
    pub kind: EntryKind,
    pub param_names: Vec<String>,
    /// True when the entry depends on the printed six-digit constants of
    /// C7C/C7D, so it is Hadamard only to [`APPROX_TOL`].
    pub approximate: bool,
    pub description: String,
}

impl CatalogueEntry {
    /// The `is_hadamard` tolerance this entry is expected to meet.
    pub fn hadamard_tol(&self) -> f64 {
        if self.approximate {
            APPROX_TOL
        } else {
            1e-10 * self.n as f64
        }
    }
}

#[derive(Clone, Debug)]
enum Recipe {
    Fourier,
    /// `F_N ∘ EXP(i·R)` with `R` from templates, optionally transposed.
    FourierPattern {
        rows: &'static [&'static str],
        transpose: bool,
    },
    /// Butson base `exp(2πi·k/q)` with an optional pattern.
    Butson {
        q: i64,
        exps: &'static [&'static [i64]],
        rows: &'static [&'static str],
    },
    Circulant,
    N11,
    P13,
    /// `[[B1, E·B2], [B1, −E·B2]]`; parameters are those of `B1`, then of
    /// `B2`, then the `M − 1` phases of `E`.
    Dita { b1: &'static str, b2: &'static str },
}

#[derive(Clone, Debug)]
struct Spec {
    entry: CatalogueEntry,
    recipe: Recipe,
}

fn letters(k: usize) -> Vec<String> {
    "abcdefghijklmnop"
        .chars()
        .take(k)
        .map(String::from)
        .collect()
}

fn alphas(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("a{i}")).collect()
}

fn specs() -> &'static [Spec] {
    static SPECS: OnceLock<Vec<Spec>> = OnceLock::new();
    SPECS.get_or_init(build_specs)
}

fn build_specs() -> Vec<Spec> {
    let mut out: Vec<Spec> = Vec::new();
    let mut push = |id: &str, n: usize, kind: EntryKind, names: Vec<String>, recipe: Recipe, description: &str| {
        out.push(Spec {
            entry: CatalogueEntry {
                id: id.to_string(),
                n,
                param_count: names.len(),
                kind,
                param_names: names,
                approximate: false,
                description: description.to_string(),
            },
            recipe,
        })
    };
    use EntryKind::*;
    let iso = IsolatedCandidate;
    let fp = |rows: &'static [&'static str], transpose: bool| Recipe::FourierPattern { rows, transpose };

    push("F1", 1, iso, vec![], Recipe::Fourier, "Fourier matrix F_1 = [1]");
    push("F2", 2, iso, vec![], Recipe::Fourier, "Fourier matrix F_2");
    push("F3", 3, iso, vec![], Recipe::Fourier, "Fourier matrix F_3");
    push("F4", 4, AffineFamily, letters(1), fp(data::F4_PATTERN, false), "affine family through F_4");
    push("F5", 5, iso, vec![], Recipe::Fourier, "Fourier matrix F_5");
    push("F6", 6, AffineFamily, letters(2), fp(data::F6_PATTERN, false), "affine family through F_6");
    push("F6T", 6, AffineFamily, letters(2), fp(data::F6_PATTERN, true), "transposed F_6 family");
    push(
        "D6",
        6,
        AffineFamily,
        vec!["c".into()],
        Recipe::Butson { q: 4, exps: data::D6_EXPS, rows: data::D6_PATTERN },
        "affine family through the symmetric matrix D_6",
    );
    push("C6", 6, iso, vec![], Recipe::Circulant, "dephased cyclic 6-roots matrix (defect 4, isolation open)");
    push(
        "S6",
        6,
        iso,
        vec![],
        Recipe::Butson { q: 3, exps: data::S6_EXPS, rows: &["."] },
        "Butson H(3,6) matrix S_6",
    );
    push("F7", 7, iso, vec![], Recipe::Fourier, "Fourier matrix F_7");
    push(
        "P7",
        7,
        AffineFamily,
        letters(1),
        Recipe::Butson { q: 6, exps: data::P7_EXPS, rows: data::P7_PATTERN },
        "Petrescu's affine family P_7",
    );
    for k in ["A", "B", "C", "D"] {
        push(&format!("C7{k}"), 7, iso, vec![], Recipe::Circulant, "dephased cyclic 7-roots matrix");
    }
    push("F8", 8, AffineFamily, letters(5), fp(data::F8_PATTERN, false), "affine family through F_8");
    push("F9", 9, AffineFamily, letters(4), fp(data::F9_PATTERN, false), "affine family through F_9");
    push("F10", 10, AffineFamily, letters(4), fp(data::F10_PATTERN, false), "affine family through F_10");
    push("F10T", 10, AffineFamily, letters(4), fp(data::F10_PATTERN, true), "transposed F_10 family");
    push("F11", 11, iso, vec![], Recipe::Fourier, "Fourier matrix F_11");
    push("C11A", 11, iso, vec![], Recipe::Circulant, "dephased cyclic 11-roots matrix");
    push("C11B", 11, iso, vec![], Recipe::Circulant, "dephased cyclic 11-roots matrix, conjugate");
    push("N11", 11, iso, vec![], Recipe::N11, "isolated matrix N_11");
    let f12 = [
        ("F12A", data::F12A_PATTERN, false),
        ("F12B", data::F12B_PATTERN, false),
        ("F12C", data::F12C_PATTERN, false),
        ("F12D", data::F12D_PATTERN, false),
        ("F12BT", data::F12B_PATTERN, true),
        ("F12CT", data::F12C_PATTERN, true),
        ("F12DT", data::F12D_PATTERN, true),
    ];
    for (id, rows, t) in f12 {
        let desc = if t {
            "transposed affine family through F_12"
        } else {
            "affine family through F_12"
        };
        push(id, 12, AffineFamily, letters(9), fp(rows, t), desc);
    }
    let six = ["F6", "D6", "C6", "S6"];
    let tag = |id: &str| id[..1].to_string();
    for (i, b1) in six.iter().enumerate() {
        for b2 in &six[i..] {
            if *b1 == "F6" && *b2 == "F6" {
                continue;
            }
            let id = format!("{}{}12", tag(b1), tag(b2));
            push(&id, 12, AffineFamily, vec![], Recipe::Dita { b1, b2 }, "Diță composition of two 6×6 matrices");
        }
    }
    push("F13", 13, iso, vec![], Recipe::Fourier, "Fourier matrix F_13");
    push("C13A", 13, iso, vec![], Recipe::Circulant, "dephased cyclic 13-roots matrix");
    push("C13B", 13, iso, vec![], Recipe::Circulant, "dephased cyclic 13-roots matrix");
    push(
        "P13",
        13,
        NonlinearFamily,
        vec!["e".into(), "f".into()],
        Recipe::P13,
        "Petrescu's non-affine family P_13 with G(f)",
    );
    push("F14", 14, AffineFamily, letters(6), fp(data::F14_PATTERN, false), "affine family through F_14");
    push("F14T", 14, AffineFamily, letters(6), fp(data::F14_PATTERN, true), "transposed F_14 family");
    let c7 = ["C7A", "C7B", "C7C", "C7D"];
    push("FP14", 14, AffineFamily, vec![], Recipe::Dita { b1: "F7", b2: "P7" }, "Diță composition of F_7 and P_7");
    for b2 in c7 {
        let id = format!("FC14{}", &b2[2..]);
        push(&id, 14, AffineFamily, vec![], Recipe::Dita { b1: "F7", b2 }, "Diță composition of F_7 and a cyclic 7-roots matrix");
    }
    push("PP14", 14, AffineFamily, vec![], Recipe::Dita { b1: "P7", b2: "P7" }, "Diță composition of two P_7 families");
    for b2 in c7 {
        let id = format!("PC14{}", &b2[2..]);
        push(&id, 14, AffineFamily, vec![], Recipe::Dita { b1: "P7", b2 }, "Diță composition of P_7 and a cyclic 7-roots matrix");
    }
    for (i, l) in c7.iter().enumerate() {
        for m in &c7[i..] {
            let id = format!("CC14{}{}", &l[2..], &m[2..]);
            push(&id, 14, AffineFamily, vec![], Recipe::Dita { b1: l, b2: m }, "Diță composition of two cyclic 7-roots matrices");
        }
    }
    push("F15", 15, AffineFamily, letters(8), fp(data::F15_PATTERN, false), "affine family through F_15");
    push("F15T", 15, AffineFamily, letters(8), fp(data::F15_PATTERN, true), "transposed F_15 family");
    let mut f16 = letters(16);
    f16.push("r".into());
    push("F16", 16, AffineFamily, f16, fp(data::F16_PATTERN, false), "affine family through F_16");

    // Diță entries take their arity and approximation flag from ingredients.
    let lookup = |list: &[Spec], id: &str| -> CatalogueEntry {
        list.iter()
            .find(|s| s.entry.id == id)
            .map(|s| s.entry.clone())
            .expect("ingredient precedes composite")
    };
    for idx in 0..out.len() {
        match out[idx].recipe {
            Recipe::Dita { b1, b2 } => {
                let (e1, e2) = (lookup(&out, b1), lookup(&out, b2));
                let k = e1.param_count + e2.param_count + e2.n - 1;
                let entry = &mut out[idx].entry;
                entry.param_names = alphas(k);
                entry.param_count = k;
                entry.approximate = e1.approximate || e2.approximate;
            }
            Recipe::Circulant if ["C7C", "C7D"].contains(&out[idx].entry.id.as_str()) => {
                out[idx].entry.approximate = true;
            }
            _ => {}
        }
    }
    out
}

fn spec(id: &str) -> Result<&'static Spec, ChmError> {
    specs()
        .iter()
        .find(|s| s.entry.id == id)
        .ok_or_else(|| ChmError::UnknownId(id.to_string()))
}

/// The full index, in order of matrix size.
pub fn list() -> Vec<CatalogueEntry> {
    specs().iter().map(|s| s.entry.clone()).collect()
}

pub fn entry(id: &str) -> Result<CatalogueEntry, ChmError> {
    spec(id).map(|s| s.entry.clone())
}

/// The unscaled Fourier matrix, entry `(j, k)` equal to `exp(2πi·jk/N)`.
pub fn fourier(n: usize) -> Result<HadamardMatrix, ChmError> {
    if n == 0 {
        return Err(ChmError::Empty);
    }
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..n).map(|k| ((j * k) % n) as i64).collect())
        .collect();
    Ok(HadamardMatrix::from_root_exponents(n as i64, &rows)?.named(format!("F{n}")))
}

/// `G(f) = arg(−cos(f)/2 + i·(√2/4)·√(7 − cos 2f)) − 2π/3`.
pub fn petrescu_g(f: f64) -> f64 {
    let z = Complex64::new(
        -f.cos() / 2.0,
        std::f64::consts::SQRT_2 / 4.0 * (7.0 - (2.0 * f).cos()).sqrt(),
    );
    z.arg() - TAU / 3.0
}

/// The undephased circulant form of a cyclic-roots matrix.
pub fn circulant(id: &str) -> Option<HadamardMatrix> {
    let x = data::circulant_vector(id)?;
    let n = x.len();
    let values: Vec<Complex64> = (0..n * n).map(|idx| x[(idx / n + n - idx % n) % n]).collect();
    let m = HadamardMatrix::from_complex(n, &values).expect("constants are unimodular");
    Some(m.named(format!("{id} (circulant)")))
}

/// Generating vector of [`circulant`].
pub fn circulant_vector(id: &str) -> Option<Vec<Complex64>> {
    data::circulant_vector(id)
}

/// The matrix `id` at parameters given in radians.
pub fn get(id: &str, params: &[f64]) -> Result<HadamardMatrix, ChmError> {
    let phases: Vec<PhaseValue> = params.iter().map(|&x| PhaseValue::from_radians(x)).collect();
    get_phases(id, &phases)
}

/// As [`get`], with phase-valued parameters; exact parameters keep exact
/// entries exact.
pub fn get_phases(id: &str, params: &[PhaseValue]) -> Result<HadamardMatrix, ChmError> {
    let s = spec(id)?;
    if params.len() != s.entry.param_count {
        return Err(ChmError::Arity {
            id: id.to_string(),
            expected: s.entry.param_count,
            found: params.len(),
        });
    }
    let m = build(s, params)?;
    let bound = s
        .entry
        .param_names
        .iter()
        .cloned()
        .zip(params.iter().map(|p| p.radians()))
        .collect();
    Ok(m.named(id).with_params(bound).traced(format!("catalogue::get({id})")))
}

fn build(s: &Spec, params: &[PhaseValue]) -> Result<HadamardMatrix, ChmError> {
    let n = s.entry.n;
    match &s.recipe {
        Recipe::Fourier => fourier(n),
        Recipe::FourierPattern { .. } | Recipe::Butson { .. } => {
            affine_eval_phases(&pattern_family(s)?, params)
        }
        Recipe::Circulant => {
            let c = circulant(&s.entry.id).expect("circulant recipe has a vector");
            Ok(dephase(&c).h)
        }
        Recipe::N11 => Ok(n11()),
        Recipe::P13 => Ok(p13(params[0].radians(), params[1].radians())),
        Recipe::Dita { b1, b2 } => {
            let (s1, s2) = (spec(b1)?, spec(b2)?);
            let (k1, k2) = (s1.entry.param_count, s2.entry.param_count);
            let m1 = build(s1, &params[..k1])?;
            let m2 = build(s2, &params[k1..k1 + k2])?;
            let e = leading_one_phases(&params[k1 + k2..]);
            double(&m1, &m2, &e)
        }
    }
}

fn pattern_family(s: &Spec) -> Result<AffineFamily, ChmError> {
    let n = s.entry.n;
    let (base, rows, transpose) = match &s.recipe {
        Recipe::FourierPattern { rows, transpose } => (fourier(n)?, *rows, *transpose),
        Recipe::Butson { q, exps, rows } => {
            let e: Vec<Vec<i64>> = exps.iter().map(|r| r.to_vec()).collect();
            (HadamardMatrix::from_root_exponents(*q, &e)?, *rows, false)
        }
        _ => return Err(ChmError::NotAffine(s.entry.id.clone())),
    };
    let cells = dsl::expand(n, rows)?;
    let mut used = dsl::names(&cells);
    let mut declared = s.entry.param_names.clone();
    used.sort();
    declared.sort();
    if used != declared {
        return Err(ChmError::InvalidPattern(format!(
            "{}: template names {used:?} differ from parameters {declared:?}",
            s.entry.id
        )));
    }
    let patterns = s
        .entry
        .param_names
        .iter()
        .map(|name| {
            let r = dsl::coefficients(&cells, name);
            if transpose {
                dsl::transpose(n, &r)
            } else {
                r
            }
        })
        .collect();
    AffineFamily::new(base.named(s.entry.id.clone()), patterns, s.entry.param_names.clone())
}

/// Pattern basis of a Diță entry, read off by moving one parameter at a
/// time by `1/8` turn. Every coefficient is a small integer.
fn probed_family(s: &Spec) -> Result<AffineFamily, ChmError> {
    let k = s.entry.param_count;
    let n = s.entry.n;
    let zeros = vec![PhaseValue::ZERO; k];
    let base = build(s, &zeros)?;
    let mut patterns = Vec::with_capacity(k);
    for p in 0..k {
        let mut params = zeros.clone();
        params[p] = PhaseValue::turns(1, 8);
        let moved = build(s, &params)?;
        let mut r = Vec::with_capacity(n * n);
        for idx in 0..n * n {
            let (i, j) = (idx / n, idx % n);
            let d = moved.entry(i, j).phase().sub(&base.entry(i, j).phase());
            let mut x = d.radians();
            if x > PI {
                x -= TAU;
            }
            let c = (x / FRAC_PI_4).round();
            debug_assert!((x - c * FRAC_PI_4).abs() < 1e-9, "non-integer Diță coefficient");
            r.push(c);
        }
        patterns.push(r);
    }
    AffineFamily::new(base.named(s.entry.id.clone()), patterns, s.entry.param_names.clone())
}

/// The affine family `id`: base matrix and pattern basis.
pub fn get_family(id: &str) -> Result<AffineFamily, ChmError> {
    let s = spec(id)?;
    match s.recipe {
        Recipe::FourierPattern { .. } | Recipe::Butson { .. } if s.entry.param_count > 0 => {
            pattern_family(s)
        }
        Recipe::Dita { .. } => probed_family(s),
        _ => Err(ChmError::NotAffine(id.to_string())),
    }
}

fn n11() -> HadamardMatrix {
    let a = AlgebraicConstants::get().a_n11;
    let inv = a.conj();
    let entries: Vec<UnimodularEntry> = data::N11_ROWS
        .iter()
        .flat_map(|row| row.split_whitespace())
        .map(|tok| {
            let (neg, sym) = match tok.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, tok),
            };
            let base = match sym {
                "1" => UnimodularEntry::ONE,
                "a" => UnimodularEntry::from_complex(a),
                "A" => UnimodularEntry::from_complex(inv),
                "B" => UnimodularEntry::from_complex(inv * inv),
                other => unreachable!("unknown N11 symbol {other}"),
            };
            if neg {
                base.neg()
            } else {
                base
            }
        })
        .collect();
    HadamardMatrix::new(11, entries).expect("N11 table is unimodular")
}

/// An entry of the `P_13` table as an exact phase in turns.
fn p13_phase(tok: &str) -> PhaseValue {
    let (neg, rest) = match tok.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, tok),
    };
    let (imag, rest) = match rest.strip_prefix('i') {
        Some(r) => (true, r),
        None => (false, rest),
    };
    let k: i64 = match rest {
        "1" => 0,
        t => t[1..].parse().expect("P13 table uses t<k>"),
    };
    let mut p = PhaseValue::turns(k, 30);
    if imag {
        p = p.add(&PhaseValue::turns(1, 4));
    }
    if neg {
        p = p.add(&PhaseValue::turns(1, 2));
    }
    p
}

fn p13(e: f64, f: f64) -> HadamardMatrix {
    static TABLE: OnceLock<(Vec<PhaseValue>, Vec<dsl::Cell>)> = OnceLock::new();
    let (base, cells) = TABLE.get_or_init(|| {
        let base = data::P13_ROWS
            .iter()
            .flat_map(|r| r.split_whitespace())
            .map(p13_phase)
            .collect();
        let cells = dsl::expand(13, data::P13_PATTERN).expect("P13 pattern is well formed");
        (base, cells)
    });
    let g = petrescu_g(f);
    let phases: Vec<PhaseValue> = base
        .iter()
        .zip(cells)
        .map(|(p, cell)| {
            let x: f64 = cell
                .iter()
                .map(|(name, k)| {
                    let v = match name.as_str() {
                        "e" => e,
                        "f" => f,
                        _ => g,
                    };
                    *k as f64 * v
                })
                .sum();
            p.add(&PhaseValue::from_radians(x))
        })
        .collect();
    HadamardMatrix::from_phases(13, &phases).expect("phases give unimodular entries")
}

/// Result of checking one entry at random parameters.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub id: String,
    pub samples: usize,
    pub max_gram_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Evaluates every entry at `samples` uniform parameter vectors in
/// `[0, 2π)` (once for entries without parameters) and checks the Hadamard
/// property at [`CatalogueEntry::hadamard_tol`]. Each entry draws from its
/// own stream seeded by `seed` and its index, so the result does not depend
/// on `exec`.
pub fn sweep(samples: usize, seed: u64, exec: Execution) -> Vec<SweepRecord> {
    let entries = list();
    let indexed: Vec<(usize, CatalogueEntry)> = entries.into_iter().enumerate().collect();
    exec.map(&indexed, |(idx, e)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((*idx as u64) << 32));
        let count = if e.param_count == 0 { 1 } else { samples };
        let tol = e.hadamard_tol();
        let mut worst = 0.0f64;
        let mut pass = true;
        for _ in 0..count {
            let params: Vec<f64> = (0..e.param_count).map(|_| rng.random_range(0.0..TAU)).collect();
            match get(&e.id, &params) {
                Ok(m) => {
                    let r = is_hadamard(&m, Some(tol));
                    worst = worst.max(r.max_gram_deviation);
                    pass &= r.pass;
                }
                Err(_) => pass = false,
            }
        }
        SweepRecord {
            id: e.id.clone(),
            samples: count,
            max_gram_deviation: worst,
            tol,
            pass,
        }
    })
}
