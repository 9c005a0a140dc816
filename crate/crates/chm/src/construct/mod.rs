//! Constructions: Kronecker products, the Diță block composition with its
//! doubling and quadrupling special cases, evaluation of affine families, and
//! the closed-subchain-pattern solver.

mod patterns;

pub use crate::analysis::basic::chains;
pub use patterns::{
    enumerate_patterns, same_span, solve_pattern, trivial_pattern, PatternLimits, PatternSpace,
    SubchainPattern,
};

use crate::core::{AffineFamily, DiagonalPhase, HadamardMatrix, PhaseValue};
use crate::error::ChmError;

/// Kronecker product `A ⊗ B`; entry `(i·m + k, j·m + l)` is `A_ij·B_kl`.
pub fn tensor(a: &HadamardMatrix, b: &HadamardMatrix) -> HadamardMatrix {
    let (n, m) = (a.n(), b.n());
    let mut entries = Vec::with_capacity(n * n * m * m);
    for i in 0..n {
        for k in 0..m {
            for j in 0..n {
                for l in 0..m {
                    entries.push(a.entry(i, j).mul(b.entry(k, l)));
                }
            }
        }
    }
    HadamardMatrix::from_parts(n * m, entries, Default::default())
        .named(format!("{}⊗{}", a.meta().name, b.meta().name))
        .traced("tensor")
}

/// Block matrix with block `(j, k)` equal to `A_jk·E_k·B_k`, where `E_0` is
/// the identity and `es` supplies `E_1 … E_{K−1}`.
///
/// Each `E_k` must have leading phase zero so that a dephased input stays
/// dephased.
pub fn dita_compose(
    a: &HadamardMatrix,
    bs: &[HadamardMatrix],
    es: &[DiagonalPhase],
) -> Result<HadamardMatrix, ChmError> {
    let k = a.n();
    if bs.len() != k {
        return Err(ChmError::DimensionMismatch {
            expected: k,
            found: bs.len(),
        });
    }
    if es.len() + 1 != k {
        return Err(ChmError::DimensionMismatch {
            expected: k - 1,
            found: es.len(),
        });
    }
    let m = bs[0].n();
    for b in bs {
        if b.n() != m {
            return Err(ChmError::DimensionMismatch {
                expected: m,
                found: b.n(),
            });
        }
    }
    for (idx, e) in es.iter().enumerate() {
        if e.len() != m {
            return Err(ChmError::DimensionMismatch {
                expected: m,
                found: e.len(),
            });
        }
        if !e.is_column_dephaser() {
            return Err(ChmError::LeadingPhase { index: idx + 1 });
        }
    }
    let n = k * m;
    let mut entries = Vec::with_capacity(n * n);
    for row in 0..n {
        let (bj, r) = (row / m, row % m);
        for col in 0..n {
            let (bk, c) = (col / m, col % m);
            let scaled = match bk {
                0 => *bs[0].entry(r, c),
                _ => es[bk - 1].entry(r).mul(bs[bk].entry(r, c)),
            };
            entries.push(a.entry(bj, bk).mul(&scaled));
        }
    }
    let names: Vec<&str> = bs.iter().map(|b| b.meta().name.as_str()).collect();
    Ok(HadamardMatrix::from_parts(n, entries, Default::default())
        .named(format!("dita({}; {})", a.meta().name, names.join(", ")))
        .traced("dita_compose"))
}

/// Dimension `a + Σ b_j + (K−1)(M−1)` of a Diță family whose core has `a`
/// parameters and whose blocks have `b_j` parameters each.
pub fn dita_parameter_count(a: usize, bs: &[usize], k: usize, m: usize) -> usize {
    a + bs.iter().sum::<usize>() + k.saturating_sub(1) * m.saturating_sub(1)
}

fn sign_matrix(rows: &[&[i64]]) -> HadamardMatrix {
    let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
    HadamardMatrix::from_root_exponents(2, &rows).expect("sign matrix is unimodular")
}

/// `[[A, E·B], [A, −E·B]]`.
pub fn double(
    a: &HadamardMatrix,
    b: &HadamardMatrix,
    e: &DiagonalPhase,
) -> Result<HadamardMatrix, ChmError> {
    let f2 = sign_matrix(&[&[0, 0], &[0, 1]]).named("F2");
    Ok(dita_compose(&f2, &[a.clone(), b.clone()], std::slice::from_ref(e))?.traced("double"))
}

/// The sign-block matrix
/// `[[A, B, C, D], [A, −B, C, −D], [A, B, −C, −D], [A, −B, −C, D]]`
/// with `B`, `C`, `D` pre-multiplied by `E1`, `E2`, `E3`.
#[allow(clippy::too_many_arguments)]
pub fn quadruple(
    a: &HadamardMatrix,
    b: &HadamardMatrix,
    c: &HadamardMatrix,
    d: &HadamardMatrix,
    e1: &DiagonalPhase,
    e2: &DiagonalPhase,
    e3: &DiagonalPhase,
) -> Result<HadamardMatrix, ChmError> {
    let signs = sign_matrix(&[&[0, 0, 0, 0], &[0, 1, 0, 1], &[0, 0, 1, 1], &[0, 1, 1, 0]])
        .named("W4");
    Ok(dita_compose(
        &signs,
        &[a.clone(), b.clone(), c.clone(), d.clone()],
        &[e1.clone(), e2.clone(), e3.clone()],
    )?
    .traced("quadruple"))
}

fn check_arity(f: &AffineFamily, found: usize) -> Result<(), ChmError> {
    if found != f.dim() {
        return Err(ChmError::Arity {
            id: f.base().meta().name.clone(),
            expected: f.dim(),
            found,
        });
    }
    Ok(())
}

fn bind(f: &AffineFamily, values: impl Iterator<Item = f64>) -> Vec<(String, f64)> {
    f.param_names().iter().cloned().zip(values).collect()
}

/// `H ∘ EXP(i·Σ α_k R_k)` with parameters in radians.
pub fn affine_eval(f: &AffineFamily, params: &[f64]) -> Result<HadamardMatrix, ChmError> {
    check_arity(f, params.len())?;
    let n = f.n();
    let out = f.base().map_entries(|i, j, e| {
        let x: f64 = f
            .patterns()
            .iter()
            .zip(params)
            .map(|(r, a)| r[i * n + j] * a)
            .sum();
        e.shift(&PhaseValue::from_radians(x))
    });
    Ok(out.with_params(bind(f, params.iter().copied())))
}

/// As [`affine_eval`], with phase-valued parameters. Integer pattern
/// coefficients applied to exact phases keep the result exact.
pub fn affine_eval_phases(
    f: &AffineFamily,
    params: &[PhaseValue],
) -> Result<HadamardMatrix, ChmError> {
    check_arity(f, params.len())?;
    let n = f.n();
    let out = f.base().map_entries(|i, j, e| {
        let mut shift = PhaseValue::ZERO;
        for (r, a) in f.patterns().iter().zip(params) {
            let coeff = r[i * n + j];
            if coeff == 0.0 {
                continue;
            }
            let term = if coeff.fract() == 0.0 && coeff.abs() < 1e15 {
                a.scale(coeff as i64)
            } else {
                PhaseValue::from_radians(coeff * a.radians())
            };
            shift = shift.add(&term);
        }
        e.shift(&shift)
    });
    Ok(out.with_params(bind(f, params.iter().map(|p| p.radians()))))
}

/// The entrywise phase shift `M ∘ EXP(i·R)` for a real `n×n` pattern `R`.
pub fn phase_shift(m: &HadamardMatrix, r: &[f64]) -> Result<HadamardMatrix, ChmError> {
    let n = m.n();
    if r.len() != n * n {
        return Err(ChmError::DimensionMismatch {
            expected: n * n,
            found: r.len(),
        });
    }
    Ok(m.map_entries(|i, j, e| {
        if r[i * n + j] == 0.0 {
            *e
        } else {
            e.shift(&PhaseValue::from_radians(r[i * n + j]))
        }
    }))
}

/// Convenience for block constructions: `diag(1, e^{iφ_1}, …)` from exact
/// or approximate phases.
pub fn leading_one_phases(rest: &[PhaseValue]) -> DiagonalPhase {
    let mut phases = vec![PhaseValue::ZERO];
    phases.extend_from_slice(rest);
    DiagonalPhase::new(phases)
}
