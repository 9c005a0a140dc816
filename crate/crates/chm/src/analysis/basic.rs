use num::complex::Complex64;
use serde::Serialize;

use crate::core::{
    apply_equivalence, DiagonalPhase, EquivalenceWitness, HadamardMatrix, LogPhaseMatrix,
    PermutationVector, PhaseValue, UnimodularEntry, EPS_UNIMOD,
};
use crate::error::ChmError;

/// Outcome of the Hadamard test `H H† = N·I`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HadamardReport {
    pub pass: bool,
    pub max_unimodular_deviation: f64,
    pub max_gram_deviation: f64,
    pub tol: f64,
}

/// `1e-10·N`, the default Gram tolerance.
pub fn default_tol(n: usize) -> f64 {
    1e-10 * n as f64
}

fn report_for_values(n: usize, values: &[Complex64], tol: f64, unimod_tol: f64) -> HadamardReport {
    let max_unimod = values
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut max_gram = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                s += values[i * n + k] * values[j * n + k].conj();
            }
            if i == j {
                s -= n as f64;
            }
            max_gram = max_gram.max(s.norm());
        }
    }
    HadamardReport {
        pass: max_unimod <= unimod_tol && max_gram <= tol,
        max_unimodular_deviation: max_unimod,
        max_gram_deviation: max_gram,
        tol,
    }
}

/// Checks `max |(M M†)_ij − N δ_ij| ≤ tol` (default `1e-10·N`) together with
/// unimodularity of the entries.
pub fn is_hadamard(m: &HadamardMatrix, tol: Option<f64>) -> HadamardReport {
    let n = m.n();
    report_for_values(n, &m.values(), tol.unwrap_or(default_tol(n)), EPS_UNIMOD)
}

/// The diagonals of the dephasing step and the dephased matrix, with
/// `h = d_r · M · d_c`.
#[derive(Clone, Debug)]
pub struct Dephasing {
    pub d_r: DiagonalPhase,
    pub d_c: DiagonalPhase,
    pub h: HadamardMatrix,
}

/// `D_r = diag(conj(M_11), …, conj(M_N1))`,
/// `D_c = diag(1, M_11·conj(M_12), …, M_11·conj(M_1N))`.
pub fn dephase(m: &HadamardMatrix) -> Dephasing {
    let n = m.n();
    let d_r = DiagonalPhase::new((0..n).map(|i| m.entry(i, 0).phase().neg()).collect());
    let mut dc = vec![PhaseValue::ZERO];
    for j in 1..n {
        dc.push(m.entry(0, 0).phase().sub(&m.entry(0, j).phase()));
    }
    let d_c = DiagonalPhase::new(dc);
    let corner = *m.entry(0, 0);
    let h = m.map_entries(|i, j, e| {
        if i == 0 || j == 0 {
            UnimodularEntry::ONE
        } else {
            // grouped so that a symmetric input gives a bit-identical
            // symmetric output
            let outer = m.entry(i, 0).conj().mul(&m.entry(0, j).conj());
            outer.mul(&e.mul(&corner))
        }
    });
    Dephasing {
        d_r,
        d_c,
        h: h.traced("dephase"),
    }
}

/// Principal log-phases in `[0, 2π)`; exact entries stay exact.
pub fn log_phases(m: &HadamardMatrix) -> LogPhaseMatrix {
    LogPhaseMatrix {
        n: m.n(),
        phases: m.entries().iter().map(|e| e.phase()).collect(),
    }
}

/// Whether `(1/√N)·H1†·H2` is again a Hadamard matrix.
pub fn is_unbiased_pair(
    h1: &HadamardMatrix,
    h2: &HadamardMatrix,
    tol: Option<f64>,
) -> Result<bool, ChmError> {
    let n = h1.n();
    if h2.n() != n {
        return Err(ChmError::DimensionMismatch {
            expected: n,
            found: h2.n(),
        });
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut prod = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                s += h1.value(k, i).conj() * h2.value(k, j);
            }
            prod[i * n + j] = s * scale;
        }
    }
    let tol = tol.unwrap_or(default_tol(n));
    Ok(report_for_values(n, &prod, tol, tol).pass)
}

/// A circulant matrix `C_ij = x_{(i−j) mod N}` and the permutation
/// `P = [e1, eN, eN−1, …, e2]` with `Cᵀ = Pᵀ·C·P`.
#[derive(Clone, Debug)]
pub struct Circulant {
    pub x: Vec<Complex64>,
    pub transpose_permutation: PermutationVector,
}

/// `[0, N−1, N−2, …, 1]`, the reversal that transposes a circulant.
pub fn circulant_transpose_permutation(n: usize) -> PermutationVector {
    let map = (0..n).map(|i| (n - i) % n).collect();
    PermutationVector::new(map).expect("reversal is a bijection")
}

/// The generating vector when `m` is circulant within `1e-12`.
pub fn circulant_decompose(m: &HadamardMatrix) -> Option<Circulant> {
    let n = m.n();
    let x: Vec<Complex64> = (0..n).map(|k| m.value(k, 0)).collect();
    for i in 0..n {
        for j in 0..n {
            if (m.value(i, j) - x[(i + n - j) % n]).norm() > 1e-12 {
                return None;
            }
        }
    }
    Some(Circulant {
        x,
        transpose_permutation: circulant_transpose_permutation(n),
    })
}

/// Checks `Cᵀ = Pᵀ·C·P` entrywise within `1e-12`.
pub fn verify_circulant_transpose(m: &HadamardMatrix) -> bool {
    let n = m.n();
    let p = circulant_transpose_permutation(n);
    let w = EquivalenceWitness {
        d1: DiagonalPhase::identity(n),
        p1: p.clone(),
        p2: p,
        d2: DiagonalPhase::identity(n),
    };
    match apply_equivalence(m, &w) {
        Ok(img) => img.phase_eq(&m.transpose(), 1e-12),
        Err(_) => false,
    }
}

/// The chain `H_ik·conj(H_jk)`, `k = 0..N`, for rows `i < j`.
pub fn chains(m: &HadamardMatrix, i: usize, j: usize) -> Result<Vec<Complex64>, ChmError> {
    let n = m.n();
    if i >= j || j >= n {
        return Err(ChmError::BadIndex { i, j, n });
    }
    Ok((0..n)
        .map(|k| m.value(i, k) * m.value(j, k).conj())
        .collect())
}
