use std::collections::HashSet;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::core::HadamardMatrix;
use crate::error::ChmError;
use crate::exact::{integers_to_rational, primitive_integer, RationalRref};
use crate::par::Execution;

/// Closedness tolerance for subchain sums.
const TOL_CLOSED: f64 = 1e-10;

/// For every row pair `i < j` (in lexicographic order) a partition of the
/// column indices into blocks. Blocks are sorted by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubchainPattern {
    pub n: usize,
    pub blocks: Vec<Vec<Vec<usize>>>,
}

/// The row pairs `(i, j)`, `i < j`, in the order used by [`SubchainPattern`].
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

impl SubchainPattern {
    /// Checks that every pair carries a partition of `0..n`.
    pub fn new(n: usize, blocks: Vec<Vec<Vec<usize>>>) -> Result<Self, ChmError> {
        let expected = n * n.saturating_sub(1) / 2;
        if blocks.len() != expected {
            return Err(ChmError::InvalidPattern(format!(
                "expected {expected} row pairs, got {}",
                blocks.len()
            )));
        }
        for (p, part) in blocks.iter().enumerate() {
            let mut seen = vec![false; n];
            for block in part {
                if block.is_empty() {
                    return Err(ChmError::InvalidPattern(format!("empty block in pair {p}")));
                }
                for &k in block {
                    if k >= n || seen[k] {
                        return Err(ChmError::InvalidPattern(format!(
                            "column {k} repeated or out of range in pair {p}"
                        )));
                    }
                    seen[k] = true;
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(ChmError::InvalidPattern(format!(
                    "pair {p} does not cover every column"
                )));
            }
        }
        let blocks = blocks
            .into_iter()
            .map(|part| {
                let mut part: Vec<Vec<usize>> = part
                    .into_iter()
                    .map(|mut b| {
                        b.sort_unstable();
                        b
                    })
                    .collect();
                part.sort();
                part
            })
            .collect();
        Ok(SubchainPattern { n, blocks })
    }

    /// The partition for rows `i < j`.
    pub fn blocks_for(&self, i: usize, j: usize) -> &[Vec<usize>] {
        let idx = pairs(self.n)
            .iter()
            .position(|&p| p == (i, j))
            .expect("i < j < n");
        &self.blocks[idx]
    }
}

/// Every chain kept whole.
pub fn trivial_pattern(n: usize) -> SubchainPattern {
    SubchainPattern {
        n,
        blocks: vec![vec![(0..n).collect()]; n * n.saturating_sub(1) / 2],
    }
}

/// Solution space of a pattern: integer basis matrices (row-major `n×n`)
/// with zero first row and column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSpace {
    pub n: usize,
    pub basis: Vec<Vec<i64>>,
}

impl PatternSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_f64(&self) -> Vec<Vec<f64>> {
        self.basis
            .iter()
            .map(|v| v.iter().map(|&x| x as f64).collect())
            .collect()
    }

    /// True when the span of `self` contains the span of `other`.
    pub fn contains(&self, other: &PatternSpace) -> bool {
        let mine = span(&self.basis, self.n * self.n);
        let theirs = span(&other.basis, other.n * other.n);
        self.n == other.n && mine.contains_rows_of(&theirs)
    }
}

fn span(vectors: &[Vec<i64>], ncols: usize) -> RationalRref {
    let rows: Vec<_> = vectors.iter().map(|v| integers_to_rational(v)).collect();
    RationalRref::span_of(ncols, &rows)
}

/// True when two lists of integer matrices span the same rational space.
pub fn same_span(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let ncols = a.first().or(b.first()).map_or(0, |v| v.len());
    if a.iter().chain(b).any(|v| v.len() != ncols) {
        return false;
    }
    span(a, ncols) == span(b, ncols)
}

/// Unknowns are the `(N−1)²` core entries; the first row and column are
/// fixed to zero by the dephasing constraints.
fn core_index(n: usize, i: usize, k: usize) -> Option<usize> {
    (i >= 1 && k >= 1).then(|| (i - 1) * (n - 1) + (k - 1))
}

/// Integer rows of `R_{i,b_0} − R_{j,b_0} = R_{i,b_t} − R_{j,b_t}`.
fn block_rows(n: usize, i: usize, j: usize, block: &[usize]) -> Vec<Vec<i64>> {
    let u = (n - 1) * (n - 1);
    let first = block[0];
    block[1..]
        .iter()
        .filter_map(|&k| {
            let mut row = vec![0i64; u];
            for (col, sign) in [(first, 1), (k, -1)] {
                if let Some(v) = core_index(n, i, col) {
                    row[v] += sign;
                }
                if let Some(v) = core_index(n, j, col) {
                    row[v] -= sign;
                }
            }
            row.iter().any(|&x| x != 0).then_some(row)
        })
        .collect()
}

fn space_from(n: usize, rref: &RationalRref) -> PatternSpace {
    let basis = rref
        .kernel()
        .iter()
        .map(|v| {
            let core = primitive_integer(v);
            let mut full = vec![0i64; n * n];
            for i in 1..n {
                for k in 1..n {
                    full[i * n + k] = core[core_index(n, i, k).unwrap()];
                }
            }
            full
        })
        .collect();
    PatternSpace { n, basis }
}

fn chain(m: &HadamardMatrix, i: usize, j: usize) -> Vec<Complex64> {
    (0..m.n())
        .map(|k| m.value(i, k) * m.value(j, k).conj())
        .collect()
}

/// Solves the equal-difference system of a closed subchain pattern.
///
/// Every block must be closed for `m`; otherwise the first offending pair and
/// block are reported.
pub fn solve_pattern(
    m: &HadamardMatrix,
    pattern: &SubchainPattern,
) -> Result<PatternSpace, ChmError> {
    let n = m.n();
    if pattern.n != n {
        return Err(ChmError::DimensionMismatch {
            expected: n,
            found: pattern.n,
        });
    }
    let pattern = SubchainPattern::new(n, pattern.blocks.clone())?;
    let mut rref = RationalRref::new((n - 1) * (n - 1));
    for (&(i, j), part) in pairs(n).iter().zip(&pattern.blocks) {
        let c = chain(m, i, j);
        for block in part {
            let sum: Complex64 = block.iter().map(|&k| c[k]).sum();
            if sum.norm() > TOL_CLOSED {
                return Err(ChmError::NotClosed {
                    i,
                    j,
                    block: block.clone(),
                    sum: sum.norm(),
                });
            }
            for row in block_rows(n, i, j, block) {
                rref.insert_integers(&row);
            }
        }
    }
    Ok(space_from(n, &rref))
}

/// Limits for [`enumerate_patterns`].
#[derive(Clone, Copy, Debug)]
pub struct PatternLimits {
    pub max_n: usize,
    pub exec: Execution,
}

impl Default for PatternLimits {
    fn default() -> Self {
        PatternLimits {
            max_n: 6,
            exec: Execution::default(),
        }
    }
}

/// Closed subsets of the chain with no closed proper non-empty subset, as
/// bitmasks.
fn minimal_closed_subsets(c: &[Complex64]) -> Vec<u32> {
    let n = c.len();
    let closed: Vec<bool> = (0..1u32 << n)
        .map(|mask| {
            mask != 0
                && (0..n)
                    .filter(|&k| mask & (1 << k) != 0)
                    .map(|k| c[k])
                    .sum::<Complex64>()
                    .norm()
                    <= TOL_CLOSED
        })
        .collect();
    (1..1u32 << n)
        .filter(|&mask| {
            if !closed[mask as usize] {
                return false;
            }
            // proper non-empty submasks
            let mut sub = (mask - 1) & mask;
            while sub != 0 {
                if closed[sub as usize] {
                    return false;
                }
                sub = (sub - 1) & mask;
            }
            true
        })
        .collect()
}

fn mask_to_block(mask: u32) -> Vec<usize> {
    (0..32).filter(|&k| mask & (1 << k) != 0).collect()
}

/// All partitions of the chain into minimal closed subsets, in lexicographic
/// order. Any closed partition is refined by one of these, and refining a
/// pattern can only enlarge its solution space.
fn finest_partitions(c: &[Complex64]) -> Vec<Vec<Vec<usize>>> {
    fn rec(
        full: u32,
        covered: u32,
        minimal: &[u32],
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if covered == full {
            out.push(current.iter().map(|&m| mask_to_block(m)).collect());
            return;
        }
        let first = (!covered & full).trailing_zeros();
        for &m in minimal {
            if m & (1 << first) != 0 && m & covered == 0 {
                current.push(m);
                rec(full, covered | m, minimal, current, out);
                current.pop();
            }
        }
    }
    let n = c.len();
    let mut minimal = minimal_closed_subsets(c);
    minimal.sort_by_key(|&m| mask_to_block(m));
    let mut out = Vec::new();
    rec((1u32 << n) - 1, 0, &minimal, &mut Vec::new(), &mut out);
    out
}

struct Options {
    /// per pair: (partition, its constraint rows)
    per_pair: Vec<Vec<(Vec<Vec<usize>>, Vec<Vec<i64>>)>>,
}

struct Found {
    pattern: Vec<Vec<Vec<usize>>>,
    rref: RationalRref,
}

struct Walker<'a> {
    opts: &'a Options,
    seen: HashSet<(usize, RationalRref)>,
    found: Vec<Found>,
}

impl Walker<'_> {
    fn walk(&mut self, depth: usize, rref: RationalRref, chosen: &mut Vec<Vec<Vec<usize>>>) {
        let ncols = rref.ncols();
        if rref.rank() == ncols {
            return;
        }
        if self.found.iter().any(|f| rref.contains_rows_of(&f.rref)) {
            return;
        }
        if depth == self.opts.per_pair.len() {
            self.found.push(Found {
                pattern: chosen.clone(),
                rref,
            });
            return;
        }
        if !self.seen.insert((depth, rref.clone())) {
            return;
        }
        for (part, rows) in &self.opts.per_pair[depth] {
            let mut next = rref.clone();
            for row in rows {
                next.insert_integers(row);
            }
            chosen.push(part.clone());
            self.walk(depth + 1, next, chosen);
            chosen.pop();
        }
    }
}

/// Enumerates closed subchain patterns of `m` and returns the maximal
/// non-zero solution spaces, each with the lexicographically first pattern
/// producing it.
///
/// Only partitions into minimal closed blocks are explored. The depth-first
/// walk over row pairs memoizes reduced constraint systems and drops branches
/// whose solution space already sits inside a found one. With parallel
/// execution the subtrees of the first row pair run independently and are
/// merged in order, which gives the same result as the sequential walk.
pub fn enumerate_patterns(
    m: &HadamardMatrix,
    limits: PatternLimits,
) -> Result<Vec<(SubchainPattern, PatternSpace)>, ChmError> {
    let n = m.n();
    if n > limits.max_n.min(6) {
        return Err(ChmError::TooLarge {
            n,
            limit: limits.max_n.min(6),
        });
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    let ps = pairs(n);
    let opts = Options {
        per_pair: ps
            .iter()
            .map(|&(i, j)| {
                finest_partitions(&chain(m, i, j))
                    .into_iter()
                    .map(|part| {
                        let rows = part.iter().flat_map(|b| block_rows(n, i, j, b)).collect();
                        (part, rows)
                    })
                    .collect()
            })
            .collect(),
    };
    let ncols = (n - 1) * (n - 1);
    let first = &opts.per_pair[0];
    let branches: Vec<Vec<Found>> = limits.exec.map_range(first.len(), |b| {
        let (part, rows) = &first[b];
        let mut rref = RationalRref::new(ncols);
        for row in rows {
            rref.insert_integers(row);
        }
        let mut walker = Walker {
            opts: &opts,
            seen: HashSet::new(),
            found: Vec::new(),
        };
        walker.walk(1, rref, &mut vec![part.clone()]);
        walker.found
    });

    // keep spaces not strictly contained in another, first occurrence wins
    let all: Vec<Found> = branches.into_iter().flatten().collect();
    let mut out: Vec<(SubchainPattern, PatternSpace)> = Vec::new();
    let mut kept: Vec<&RationalRref> = Vec::new();
    for (idx, f) in all.iter().enumerate() {
        let dominated = all.iter().enumerate().any(|(o, g)| {
            // g ⊋ f: f's constraints contain g's, not conversely
            o != idx && f.rref.contains_rows_of(&g.rref) && !g.rref.contains_rows_of(&f.rref)
        });
        if dominated || kept.iter().any(|k| **k == f.rref) {
            continue;
        }
        kept.push(&f.rref);
        out.push((
            SubchainPattern {
                n,
                blocks: f.pattern.clone(),
            },
            space_from(n, &f.rref),
        ));
    }
    Ok(out)
}
