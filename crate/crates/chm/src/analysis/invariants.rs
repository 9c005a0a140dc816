use std::collections::BTreeMap;

use num::complex::Complex64;
use serde::Serialize;

use crate::core::HadamardMatrix;
use crate::error::ChmError;
use crate::par::Execution;

/// Default grid spacing for clustering invariant values.
pub const TOL_CLUSTER: f64 = 1e-8;

/// The set `Λ = {H_ij·conj(H_kj)·H_kl·conj(H_il)}` after clustering, with
/// multiplicities kept as a diagnostic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantSet {
    /// Cluster representatives, sorted by real then imaginary part.
    pub values: Vec<Complex64>,
    /// Number of index quadruples landing in each cluster.
    pub multiplicities: Vec<u64>,
    pub tol_cluster: f64,
}

type Key = (i64, i64);

fn key(z: Complex64, tol: f64) -> Key {
    ((z.re / tol).round() as i64, (z.im / tol).round() as i64)
}

/// All `N⁴` quadruple products, rounded to a `tol_cluster` grid; grid cells
/// closer than `2·tol_cluster` are merged into one cluster.
pub fn haagerup_invariants(m: &HadamardMatrix, tol_cluster: Option<f64>) -> InvariantSet {
    haagerup_invariants_with(m, tol_cluster, Execution::default())
}

pub fn haagerup_invariants_with(
    m: &HadamardMatrix,
    tol_cluster: Option<f64>,
    exec: Execution,
) -> InvariantSet {
    let tol = tol_cluster.unwrap_or(TOL_CLUSTER);
    let n = m.n();
    let v = m.values();
    let per_i: Vec<BTreeMap<Key, u64>> = exec.map_range(n, |i| {
        let mut counts = BTreeMap::new();
        for j in 0..n {
            let hij = v[i * n + j];
            for k in 0..n {
                let a = hij * v[k * n + j].conj();
                for l in 0..n {
                    let z = a * v[k * n + l] * v[i * n + l].conj();
                    *counts.entry(key(z, tol)).or_insert(0) += 1;
                }
            }
        }
        counts
    });
    let mut cells: BTreeMap<Key, u64> = BTreeMap::new();
    for map in per_i {
        for (k, c) in map {
            *cells.entry(k).or_insert(0) += c;
        }
    }
    cluster(cells, tol)
}

fn cluster(cells: BTreeMap<Key, u64>, tol: f64) -> InvariantSet {
    let keys: Vec<(Key, u64)> = cells.into_iter().collect();
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    // keys are sorted by real part first, so neighbours sit in a window
    for a in 0..keys.len() {
        for b in a + 1..keys.len() {
            let (ka, kb) = (keys[a].0, keys[b].0);
            if kb.0 - ka.0 > 2 {
                break;
            }
            if (kb.1 - ka.1).abs() <= 2 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, (Key, u64)> = BTreeMap::new();
    for idx in 0..keys.len() {
        let root = find(&mut parent, idx);
        let entry = groups.entry(root).or_insert((keys[idx].0, 0));
        entry.1 += keys[idx].1;
    }
    let mut reps: Vec<(Key, u64)> = groups.into_values().collect();
    reps.sort();
    InvariantSet {
        values: reps
            .iter()
            .map(|((re, im), _)| Complex64::new(*re as f64 * tol, *im as f64 * tol))
            .collect(),
        multiplicities: reps.iter().map(|(_, c)| *c).collect(),
        tol_cluster: tol,
    }
}

impl InvariantSet {
    /// Set equality up to the clustering resolution: each value of one set
    /// has a partner in the other within `3·tol_cluster`.
    pub fn same_set(&self, other: &InvariantSet) -> bool {
        let tol = 3.0 * self.tol_cluster.max(other.tol_cluster);
        let covered = |a: &[Complex64], b: &[Complex64]| {
            a.iter()
                .all(|x| b.iter().any(|y| (x.re - y.re).abs() <= tol && (x.im - y.im).abs() <= tol))
        };
        covered(&self.values, &other.values) && covered(&other.values, &self.values)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let tol = 3.0 * self.tol_cluster;
        self.values
            .iter()
            .any(|y| (z.re - y.re).abs() <= tol && (z.im - y.im).abs() <= tol)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One-way invariant test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InvariantVerdict {
    Inequivalent,
    Inconclusive,
}

/// `Inequivalent` when the clustered `Λ` sets differ.
pub fn inequivalent_by_invariants(
    a: &HadamardMatrix,
    b: &HadamardMatrix,
) -> Result<InvariantVerdict, ChmError> {
    if a.n() != b.n() {
        return Err(ChmError::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let (la, lb) = (haagerup_invariants(a, None), haagerup_invariants(b, None));
    Ok(if la.same_set(&lb) {
        InvariantVerdict::Inconclusive
    } else {
        InvariantVerdict::Inequivalent
    })
}
