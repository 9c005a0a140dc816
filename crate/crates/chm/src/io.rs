//! The `.chm.json` interchange format (format version `"1"`).
//!
//! A matrix document carries exactly one of two representations:
//! `phases_turns`, an `n×n` grid of phases in turns written as `"p/q"`
//! strings in lowest terms with `0 ≤ p/q < 1` (floats are accepted on input),
//! or `entries`, an `n×n` grid of `{re, im}` objects. Matrices whose phases
//! are all exact are written as `phases_turns`, all others as `entries`.
//! Indices in files are 0-based. Floats are written in shortest round-trip
//! form, so values survive a write/read cycle bit for bit.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::rational::Rational64;
use num::Integer;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{
    AffineFamily, DiagonalPhase, EquivalenceWitness, HadamardMatrix, MatrixMeta,
    PermutationVector, PhaseValue, UnimodularEntry, EPS_UNIMOD,
};

pub const FORMAT_VERSION: &str = "1";
pub const FILE_EXTENSION: &str = ".chm.json";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("malformed document at `{path}`: {message}")]
    Malformed { path: String, message: String },
    #[error("invalid document at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> DocumentError {
    DocumentError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    PhasesTurns,
    Entries,
}

/// A phase in turns: an exact `"p/q"` string or a float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TurnValue {
    Rational(String),
    Float(f64),
}

impl TurnValue {
    pub fn from_phase(p: &PhaseValue) -> Self {
        match p {
            PhaseValue::Exact(r) => TurnValue::Rational(format!("{}/{}", r.numer(), r.denom())),
            PhaseValue::Approx(_) => TurnValue::Float(p.turns_f64()),
        }
    }

    /// Validates and converts; `path` is used in error messages.
    pub fn to_phase(&self, path: &str) -> Result<PhaseValue, DocumentError> {
        match self {
            TurnValue::Float(x) if x.is_finite() => Ok(PhaseValue::from_radians(x * std::f64::consts::TAU)),
            TurnValue::Float(_) => Err(invalid(path, "phase must be finite")),
            TurnValue::Rational(s) => {
                let r = parse_rational(s).ok_or_else(|| {
                    invalid(path, format!("`{s}` is not a rational `p/q` in lowest terms with 0 ≤ p/q < 1"))
                })?;
                Ok(PhaseValue::Exact(r))
            }
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational64> {
    let (p, q) = s.split_once('/')?;
    let p: i64 = p.trim().parse().ok()?;
    let q: i64 = q.trim().parse().ok()?;
    if q <= 0 || p < 0 || p >= q || p.gcd(&q) != 1 {
        return None;
    }
    Some(Rational64::new_raw(p, q))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentMeta {
    #[serde(default)]
    pub name: String,
    /// Parameter bindings in radians, keyed by name.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Construction history.
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub format_version: String,
    pub n: usize,
    pub representation: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases_turns: Option<Vec<Vec<TurnValue>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<ComplexValue>>>,
    #[serde(default)]
    pub meta: DocumentMeta,
}

fn check_grid<T>(grid: &[Vec<T>], n: usize, field: &str) -> Result<(), DocumentError> {
    if grid.len() != n {
        return Err(invalid(field, format!("expected {n} rows, found {}", grid.len())));
    }
    for (i, row) in grid.iter().enumerate() {
        if row.len() != n {
            return Err(invalid(
                format!("{field}[{i}]"),
                format!("expected {n} columns, found {}", row.len()),
            ));
        }
    }
    Ok(())
}

impl MatrixDocument {
    pub fn from_matrix(m: &HadamardMatrix) -> Self {
        let n = m.n();
        let meta = DocumentMeta {
            name: m.meta().name.clone(),
            params: m.meta().params.iter().cloned().collect(),
            notes: m.meta().trace.clone(),
        };
        if m.is_exact() {
            let turns = (0..n)
                .map(|i| (0..n).map(|j| TurnValue::from_phase(&m.entry(i, j).phase())).collect())
                .collect();
            MatrixDocument {
                format_version: FORMAT_VERSION.into(),
                n,
                representation: Representation::PhasesTurns,
                phases_turns: Some(turns),
                entries: None,
                meta,
            }
        } else {
            let entries = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let z = m.value(i, j);
                            ComplexValue { re: z.re, im: z.im }
                        })
                        .collect()
                })
                .collect();
            MatrixDocument {
                format_version: FORMAT_VERSION.into(),
                n,
                representation: Representation::Entries,
                phases_turns: None,
                entries: Some(entries),
                meta,
            }
        }
    }

    /// Checks every document invariant and re-checks unimodularity.
    pub fn validate(&self) -> Result<(), DocumentError> {
        self.to_matrix().map(|_| ())
    }

    pub fn to_matrix(&self) -> Result<HadamardMatrix, DocumentError> {
        if self.format_version != FORMAT_VERSION {
            return Err(invalid(
                "format_version",
                format!("unsupported version `{}`", self.format_version),
            ));
        }
        let n = self.n;
        if n == 0 {
            return Err(invalid("n", "dimension must be at least 1"));
        }
        let entries: Vec<UnimodularEntry> = match (&self.phases_turns, &self.entries) {
            (Some(_), Some(_)) => {
                return Err(invalid("", "both `phases_turns` and `entries` are set"))
            }
            (None, None) => return Err(invalid("", "neither `phases_turns` nor `entries` is set")),
            (Some(grid), None) => {
                if self.representation != Representation::PhasesTurns {
                    return Err(invalid("representation", "does not match the populated field `phases_turns`"));
                }
                check_grid(grid, n, "phases_turns")?;
                let mut out = Vec::with_capacity(n * n);
                for (i, row) in grid.iter().enumerate() {
                    for (j, t) in row.iter().enumerate() {
                        out.push(UnimodularEntry::from_phase(
                            t.to_phase(&format!("phases_turns[{i}][{j}]"))?,
                        ));
                    }
                }
                out
            }
            (None, Some(grid)) => {
                if self.representation != Representation::Entries {
                    return Err(invalid("representation", "does not match the populated field `entries`"));
                }
                check_grid(grid, n, "entries")?;
                let mut out = Vec::with_capacity(n * n);
                for (i, row) in grid.iter().enumerate() {
                    for (j, c) in row.iter().enumerate() {
                        let z = Complex64::new(c.re, c.im);
                        let dev = (z.norm() - 1.0).abs();
                        if dev.is_nan() || dev > EPS_UNIMOD {
                            return Err(invalid(
                                format!("entries[{i}][{j}]"),
                                format!("modulus {} is not 1 (tolerance {EPS_UNIMOD:e})", z.norm()),
                            ));
                        }
                        out.push(UnimodularEntry::from_complex(z));
                    }
                }
                out
            }
        };
        let mut m = HadamardMatrix::new(n, entries).map_err(|e| invalid("", e.to_string()))?;
        *m.meta_mut() = MatrixMeta {
            name: self.meta.name.clone(),
            params: self.meta.params.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            trace: self.meta.notes.clone(),
        };
        Ok(m)
    }
}

fn to_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("document types serialize");
    s.push('\n');
    s
}

fn from_text<T: DeserializeOwned>(text: &str) -> Result<T, DocumentError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| DocumentError::Malformed {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn serialize_document(doc: &MatrixDocument) -> String {
    to_text(doc)
}

/// Parses and validates a matrix document.
pub fn parse_document(text: &str) -> Result<MatrixDocument, DocumentError> {
    let doc: MatrixDocument = from_text(text)?;
    doc.validate()?;
    Ok(doc)
}

pub fn serialize_matrix(m: &HadamardMatrix) -> String {
    to_text(&MatrixDocument::from_matrix(m))
}

pub fn parse_matrix(text: &str) -> Result<HadamardMatrix, DocumentError> {
    from_text::<MatrixDocument>(text)?.to_matrix()
}

/// An affine family: base matrix plus one `n×n` pattern per parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub format_version: String,
    pub kind: String,
    pub n: usize,
    pub base: MatrixDocument,
    pub param_names: Vec<String>,
    pub patterns: Vec<Vec<Vec<f64>>>,
}

pub fn serialize_family(f: &AffineFamily) -> String {
    let n = f.n();
    let doc = FamilyDocument {
        format_version: FORMAT_VERSION.into(),
        kind: "affine_family".into(),
        n,
        base: MatrixDocument::from_matrix(f.base()),
        param_names: f.param_names().to_vec(),
        patterns: f
            .patterns()
            .iter()
            .map(|r| r.chunks(n).map(|row| row.to_vec()).collect())
            .collect(),
    };
    to_text(&doc)
}

pub fn parse_family(text: &str) -> Result<AffineFamily, DocumentError> {
    let doc: FamilyDocument = from_text(text)?;
    if doc.kind != "affine_family" {
        return Err(invalid("kind", format!("expected `affine_family`, found `{}`", doc.kind)));
    }
    let base = doc.base.to_matrix()?;
    if base.n() != doc.n {
        return Err(invalid("n", "does not match the base matrix"));
    }
    let mut patterns = Vec::with_capacity(doc.patterns.len());
    for (k, grid) in doc.patterns.iter().enumerate() {
        check_grid(grid, doc.n, &format!("patterns[{k}]"))?;
        patterns.push(grid.iter().flatten().copied().collect());
    }
    AffineFamily::new(base, patterns, doc.param_names).map_err(|e| invalid("patterns", e.to_string()))
}

/// `A = D1·P1·B·P2·D2` with 0-based permutation maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDocument {
    pub format_version: String,
    pub kind: String,
    pub n: usize,
    pub d1: Vec<TurnValue>,
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub d2: Vec<TurnValue>,
}

pub fn serialize_witness(w: &EquivalenceWitness) -> String {
    let turns = |d: &DiagonalPhase| d.phases.iter().map(TurnValue::from_phase).collect();
    to_text(&WitnessDocument {
        format_version: FORMAT_VERSION.into(),
        kind: "equivalence_witness".into(),
        n: w.n(),
        d1: turns(&w.d1),
        p1: w.p1.map().to_vec(),
        p2: w.p2.map().to_vec(),
        d2: turns(&w.d2),
    })
}

pub fn parse_witness(text: &str) -> Result<EquivalenceWitness, DocumentError> {
    let doc: WitnessDocument = from_text(text)?;
    if doc.kind != "equivalence_witness" {
        return Err(invalid("kind", format!("expected `equivalence_witness`, found `{}`", doc.kind)));
    }
    let diag = |v: &[TurnValue], field: &str| -> Result<DiagonalPhase, DocumentError> {
        if v.len() != doc.n {
            return Err(invalid(field, format!("expected {} phases, found {}", doc.n, v.len())));
        }
        let phases = v
            .iter()
            .enumerate()
            .map(|(k, t)| t.to_phase(&format!("{field}[{k}]")))
            .collect::<Result<_, _>>()?;
        Ok(DiagonalPhase::new(phases))
    };
    let perm = |v: &[usize], field: &str| -> Result<PermutationVector, DocumentError> {
        if v.len() != doc.n {
            return Err(invalid(field, format!("expected {} indices, found {}", doc.n, v.len())));
        }
        PermutationVector::new(v.to_vec()).map_err(|e| invalid(field, e.to_string()))
    };
    Ok(EquivalenceWitness {
        d1: diag(&doc.d1, "d1")?,
        p1: perm(&doc.p1, "p1")?,
        p2: perm(&doc.p2, "p2")?,
        d2: diag(&doc.d2, "d2")?,
    })
}

#[derive(Serialize)]
struct ReportDocument<'a, T> {
    format_version: &'a str,
    kind: &'a str,
    report: &'a T,
}

/// Wraps any serializable report as `{format_version, kind, report}`.
pub fn serialize_report<T: Serialize>(kind: &str, report: &T) -> String {
    to_text(&ReportDocument {
        format_version: FORMAT_VERSION,
        kind,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_must_be_reduced_and_in_range() {
        assert_eq!(parse_rational("1/2"), Some(Rational64::new(1, 2)));
        assert_eq!(parse_rational("0/1"), Some(Rational64::new(0, 1)));
        assert_eq!(parse_rational("2/4"), None);
        assert_eq!(parse_rational("0/2"), None);
        assert_eq!(parse_rational("3/2"), None);
        assert_eq!(parse_rational("-1/2"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("1"), None);
    }
}
