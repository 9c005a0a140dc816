use nalgebra::DMatrix;
use serde::Serialize;

use crate::analysis::basic::is_hadamard;
use crate::core::HadamardMatrix;
use crate::error::ChmError;
use crate::exact::{
    annihilates, cyclotomic_power_table, kernel_candidates, powmod, primes_one_mod,
    rank_mod, root_of_unity,
};

/// Result of the defect computation.
///
/// `defect` is the exact value when the certified rational path succeeded and
/// the SVD value otherwise. Kernel vectors are `n×n` row-major real matrices.
#[derive(Clone, Debug, Serialize)]
pub struct DefectReport {
    pub defect: usize,
    pub kernel_basis: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub numeric_defect: usize,
    pub exact_defect: Option<usize>,
}

impl DefectReport {
    /// False only when both paths ran and disagree.
    pub fn paths_agree(&self) -> bool {
        self.exact_defect.is_none_or(|d| d == self.numeric_defect)
    }
}

/// The real system of the defect: `2N−1` dephasing rows followed by the real
/// and imaginary parts of `Σ_k H_ik·conj(H_jk)·(R_ik − R_jk) = 0` for each
/// `i < j`, over the `N²` unknowns `R` (row-major). Returned row-major.
pub fn defect_system(m: &HadamardMatrix) -> (usize, usize, Vec<f64>) {
    let n = m.n();
    let cols = n * n;
    let mut data = Vec::new();
    let mut rows = 0;
    let unit = |idx: usize, data: &mut Vec<f64>| {
        let mut row = vec![0.0; cols];
        row[idx] = 1.0;
        data.extend(row);
    };
    for j in 1..n {
        unit(j, &mut data);
        rows += 1;
    }
    for i in 0..n {
        unit(i * n, &mut data);
        rows += 1;
    }
    let (orth_rows, orth) = orthogonality_rows(m);
    data.extend(orth);
    rows += orth_rows;
    (rows, cols, data)
}

/// Only the orthogonality rows of [`defect_system`].
pub fn orthogonality_rows(m: &HadamardMatrix) -> (usize, Vec<f64>) {
    let n = m.n();
    let cols = n * n;
    let mut data = Vec::new();
    let mut rows = 0;
    for i in 0..n {
        for j in i + 1..n {
            let mut re = vec![0.0; cols];
            let mut im = vec![0.0; cols];
            for k in 0..n {
                let c = m.value(i, k) * m.value(j, k).conj();
                re[i * n + k] += c.re;
                re[j * n + k] -= c.re;
                im[i * n + k] += c.im;
                im[j * n + k] -= c.im;
            }
            data.extend(re);
            data.extend(im);
            rows += 2;
        }
    }
    (rows, data)
}

/// Singular values (descending), right singular vectors spanning the kernel,
/// and the threshold `1e-9·σ_max·max(rows, cols)`.
pub(crate) fn svd_kernel(rows: usize, cols: usize, data: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, f64) {
    // pad to a tall matrix so that V is complete
    let padded_rows = rows.max(cols);
    let mut a = DMatrix::<f64>::zeros(padded_rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            a[(r, c)] = data[r * cols + c];
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let threshold = 1e-9 * smax * rows.max(cols) as f64;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&x, &y| sv[y].total_cmp(&sv[x]));
    let kernel = order
        .iter()
        .filter(|&&k| sv[k] <= threshold)
        .map(|&k| v_t.row(k).iter().copied().collect())
        .collect();
    let sorted = order.iter().map(|&k| sv[k]).collect();
    (sorted, kernel, threshold)
}

/// Certified exact defect for matrices whose entries are all roots of unity.
#[derive(Clone, Debug)]
pub struct ExactDefect {
    pub defect: usize,
    /// Integer kernel vectors as `n×n` row-major matrices.
    pub basis: Vec<Vec<i64>>,
}

/// Exact defect over the cyclotomic field `Q(ζ_m)`.
///
/// With the dephasing rows eliminated, the unknowns are the `(N−1)²` core
/// entries. A lower bound comes from integer kernel vectors of the system
/// split into power-basis coordinates (real solutions with rational
/// coordinates), each verified exactly. An upper bound comes from the rank of
/// the complex system reduced modulo primes `p ≡ 1 (mod m)`, which can only
/// underestimate the true rank. The value is returned only when the bounds
/// meet; `None` means the matrix is not of root-of-unity type or the
/// certificate did not close.
pub fn exact_defect(m: &HadamardMatrix) -> Option<ExactDefect> {
    let order = m.root_order()? as usize;
    let n = m.n();
    if n == 1 {
        return Some(ExactDefect {
            defect: 0,
            basis: Vec::new(),
        });
    }
    let u = (n - 1) * (n - 1);
    let var = |i: usize, k: usize| (i >= 1 && k >= 1).then(|| (i - 1) * (n - 1) + (k - 1));
    let expo = |i: usize, k: usize| -> usize {
        let r = m.entry(i, k).exact_phase().expect("exact");
        (r.numer() * (order as i64 / r.denom())) as usize
    };
    let diffs = |i: usize, j: usize| -> Vec<usize> {
        (0..n)
            .map(|k| (expo(i, k) + order - expo(j, k)) % order)
            .collect()
    };

    // rational coordinates: one row per pair and power-basis coordinate
    let table = cyclotomic_power_table(order);
    let deg = table[0].len();
    let mut q_rows: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = diffs(i, j);
            for t in 0..deg {
                let mut row = vec![0i64; u];
                for k in 0..n {
                    let c = table[d[k]][t];
                    if c == 0 {
                        continue;
                    }
                    if let Some(v) = var(i, k) {
                        row[v] += c;
                    }
                    if let Some(v) = var(j, k) {
                        row[v] -= c;
                    }
                }
                if row.iter().any(|&x| x != 0) {
                    q_rows.push(row);
                }
            }
        }
    }

    let primes = primes_one_mod(order as u64, 2);
    let mut upper_rank = 0;
    for &p in &primes {
        let g = root_of_unity(order as u64, p);
        let pow: Vec<u64> = (0..order).map(|t| powmod(g, t as u64, p)).collect();
        let mut rows = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let d = diffs(i, j);
                for conj in [false, true] {
                    let mut row = vec![0u64; u];
                    for k in 0..n {
                        let e = if conj { (order - d[k]) % order } else { d[k] };
                        let c = pow[e];
                        if let Some(v) = var(i, k) {
                            row[v] = (row[v] + c) % p;
                        }
                        if let Some(v) = var(j, k) {
                            row[v] = (row[v] + p - c) % p;
                        }
                    }
                    rows.push(row);
                }
            }
        }
        upper_rank = upper_rank.max(rank_mod(rows, u, p));
    }
    let upper_defect = u - upper_rank;

    let candidates = kernel_candidates(&q_rows, u, primes[0])?;
    if candidates.len() != upper_defect || !candidates.iter().all(|v| annihilates(&q_rows, v)) {
        return None;
    }
    let basis = candidates
        .into_iter()
        .map(|v| {
            let mut full = vec![0i64; n * n];
            for i in 1..n {
                for k in 1..n {
                    full[i * n + k] = v[var(i, k).unwrap()];
                }
            }
            full
        })
        .collect();
    Some(ExactDefect {
        defect: upper_defect,
        basis,
    })
}

/// Defect of a Hadamard matrix: SVD always, plus the exact path when every
/// entry is a root of unity.
pub fn defect(m: &HadamardMatrix) -> Result<DefectReport, ChmError> {
    let rep = is_hadamard(m, None);
    if !rep.pass {
        return Err(ChmError::NotHadamard {
            gram_deviation: rep.max_gram_deviation.max(rep.max_unimodular_deviation),
        });
    }
    let (rows, cols, data) = defect_system(m);
    let (singular_values, kernel, threshold) = svd_kernel(rows, cols, &data);
    let numeric_defect = kernel.len();
    let exact = exact_defect(m);
    let exact_defect = exact.as_ref().map(|e| e.defect);
    let (defect, kernel_basis) = match exact {
        Some(e) if e.defect != numeric_defect => (
            e.defect,
            e.basis
                .iter()
                .map(|v| v.iter().map(|&x| x as f64).collect())
                .collect(),
        ),
        _ => (numeric_defect, kernel),
    };
    Ok(DefectReport {
        defect,
        kernel_basis,
        singular_values,
        threshold,
        numeric_defect,
        exact_defect,
    })
}

/// Nullity of the orthogonality rows alone. It is at least `2N−1` because
/// adding a constant to a column, or to a row, does not change any chain sum.
pub fn orthogonality_nullity(m: &HadamardMatrix) -> usize {
    let n = m.n();
    let (rows, data) = orthogonality_rows(m);
    if rows == 0 {
        return n * n;
    }
    svd_kernel(rows, n * n, &data).1.len()
}

fn factorize(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut k = 0;
        while n.is_multiple_of(d) {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Closed-form defect of the Fourier matrix `F_N` for `N` prime, a prime
/// power, or a product of two distinct primes.
pub fn fourier_defect_formula(n: usize) -> Option<usize> {
    let f = factorize(n);
    match f.as_slice() {
        [(p, k)] => {
            let (p, k) = (*p as i64, *k as i64);
            let v = p.pow(k as u32 - 1) * (k * (p - 1) - p) + 1;
            Some(v as usize)
        }
        [(p, 1), (q, 1)] => Some(2 * (p - 1) * (q - 1)),
        _ => None,
    }
}

/// One-way isolation certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Isolation {
    Isolated,
    Unknown,
}

/// `Isolated` exactly when the defect vanishes.
pub fn is_isolated_certificate(m: &HadamardMatrix) -> Result<Isolation, ChmError> {
    Ok(if defect(m)?.defect == 0 {
        Isolation::Isolated
    } else {
        Isolation::Unknown
    })
}
