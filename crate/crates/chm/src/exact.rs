//! Exact linear algebra: arithmetic modulo word-sized primes, cyclotomic
//! power tables, and row reduction over the rationals.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    if p < (1 << 32) {
        a * b % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The first `count` primes `p ≡ 1 (mod m)` below `2^31`, scanning downward.
/// Word-sized products of residues then fit in a `u64`.
pub(crate) fn primes_one_mod(m: u64, count: usize) -> Vec<u64> {
    let mut k = ((1u64 << 31) - 1) / m;
    let mut out = Vec::with_capacity(count);
    while out.len() < count && k > 0 {
        let p = k * m + 1;
        if is_prime(p) {
            out.push(p);
        }
        k -= 1;
    }
    out
}

/// An element of exact multiplicative order `m` in `F_p` (requires `m | p−1`).
pub(crate) fn root_of_unity(m: u64, p: u64) -> u64 {
    let factors = prime_factors(m);
    for g in 2.. {
        let h = powmod(g, (p - 1) / m, p);
        if factors.iter().all(|&f| powmod(h, m / f, p) != 1) {
            return h;
        }
    }
    unreachable!()
}

pub(crate) fn to_mod(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Row-reduces `rows` modulo `p` into reduced echelon form and returns the
/// pivot columns. Rows are modified in place; the first `rank` rows hold the
/// reduced basis.
pub(crate) fn rref_mod(rows: &mut Vec<Vec<u64>>, ncols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = powmod(rows[r][c], p - 2, p);
        for x in rows[r].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    if y != 0 {
                        *x = (*x + p - mulmod(f, y, p)) % p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Rank modulo `p` without keeping the reduced form.
pub(crate) fn rank_mod(mut rows: Vec<Vec<u64>>, ncols: usize, p: u64) -> usize {
    rref_mod(&mut rows, ncols, p).len()
}

/// Recovers `a/b ≡ x (mod p)` with `|a|, b ≤ sqrt(p/2)`.
pub(crate) fn rational_reconstruct(x: u64, p: u64) -> Option<(i128, i128)> {
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    if t1 < 0 {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

/// Kernel basis of an integer matrix, reconstructed from its reduced form
/// modulo `p` and scaled to primitive integer vectors. The vectors are not
/// verified here.
pub(crate) fn kernel_candidates(rows: &[Vec<i64>], ncols: usize, p: u64) -> Option<Vec<Vec<i64>>> {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| to_mod(x, p)).collect())
        .collect();
    let pivots = rref_mod(&mut m, ncols, p);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        // x_free = 1, x_pivot(r) = -m[r][free]
        let mut num = vec![0i128; ncols];
        let mut den = vec![1i128; ncols];
        num[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            let v = (p - m[r][free]) % p;
            let (a, b) = rational_reconstruct(v, p)?;
            num[pc] = a;
            den[pc] = b;
        }
        let l = den.iter().fold(1i128, |acc, &d| lcm(acc, d));
        let mut v: Vec<i128> = num
            .iter()
            .zip(&den)
            .map(|(&a, &b)| a * (l / b))
            .collect();
        let g = v.iter().fold(0i128, |acc, &x| gcd(acc, x.abs()));
        if g > 1 {
            for x in v.iter_mut() {
                *x /= g;
            }
        }
        let v: Option<Vec<i64>> = v.into_iter().map(|x| i64::try_from(x).ok()).collect();
        out.push(v?);
    }
    Some(out)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i128, b: i128) -> i128 {
    a / gcd(a, b) * b
}

/// Exact check `rows · v = 0` in 128-bit integer arithmetic.
pub(crate) fn annihilates(rows: &[Vec<i64>], v: &[i64]) -> bool {
    rows.iter().all(|r| {
        r.iter()
            .zip(v)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum::<i128>()
            == 0
    })
}

fn poly_divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // both polynomials stored lowest degree first; den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; num.len() - dd];
    for k in (0..q.len()).rev() {
        let c = rem[k + dd];
        q[k] = c;
        if c != 0 {
            for (t, &d) in den.iter().enumerate() {
                rem[k + t] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// Coefficients of the `m`-th cyclotomic polynomial, lowest degree first.
pub(crate) fn cyclotomic_polynomial(m: usize) -> Vec<i64> {
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        num = poly_divide_exact(&num, &cyclotomic_polynomial(d));
    }
    num
}

/// Row `t` holds the coordinates of `ζ_m^t` in the power basis
/// `1, ζ, …, ζ^{φ(m)−1}` of `Q(ζ_m)`.
pub(crate) fn cyclotomic_power_table(m: usize) -> Vec<Vec<i64>> {
    let phi_poly = cyclotomic_polynomial(m);
    let deg = phi_poly.len() - 1;
    let mut table = Vec::with_capacity(m);
    let mut cur = vec![0i64; deg];
    cur[0] = 1;
    for _ in 0..m {
        table.push(cur.clone());
        // multiply by x and reduce with the monic relation
        let top = cur[deg - 1];
        let mut next = vec![0i64; deg];
        for k in (1..deg).rev() {
            next[k] = cur[k - 1];
        }
        if top != 0 {
            for k in 0..deg {
                next[k] -= top * phi_poly[k];
            }
        }
        cur = next;
    }
    table
}

/// Reduced row echelon form over `Q`, built incrementally.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct RationalRref {
    ncols: usize,
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl RationalRref {
    pub fn new(ncols: usize) -> Self {
        RationalRref {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    fn reduce(&self, row: &mut [BigRational]) {
        for (r, &c) in self.rows.iter().zip(&self.pivots) {
            if !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(r) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
    }

    /// Adds a row; returns true when it increased the rank.
    pub fn insert(&mut self, mut row: Vec<BigRational>) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        self.reduce(&mut row);
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[c].recip();
        for x in row.iter_mut() {
            *x *= &inv;
        }
        for r in self.rows.iter_mut() {
            if !r[c].is_zero() {
                let f = r[c].clone();
                for (x, y) in r.iter_mut().zip(&row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < c);
        self.pivots.insert(pos, c);
        self.rows.insert(pos, row);
        true
    }

    pub fn insert_integers(&mut self, row: &[i64]) -> bool {
        self.insert(
            row.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        )
    }

    /// True when `row` lies in the row space.
    pub fn contains_row(&self, row: &[BigRational]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r.iter().all(|x| x.is_zero())
    }

    /// True when every row of `other` lies in the row space of `self`.
    pub fn contains_rows_of(&self, other: &RationalRref) -> bool {
        other.rows.iter().all(|r| self.contains_row(r))
    }

    /// Basis of the null space, one vector per free column, with the free
    /// coordinate set to one.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![BigRational::zero(); self.ncols];
                v[free] = BigRational::one();
                for (r, &pc) in self.rows.iter().zip(&self.pivots) {
                    v[pc] = -r[free].clone();
                }
                v
            })
            .collect()
    }

    /// Canonical form of the row space spanned by `vectors`.
    pub fn span_of(ncols: usize, vectors: &[Vec<BigRational>]) -> Self {
        let mut r = RationalRref::new(ncols);
        for v in vectors {
            r.insert(v.clone());
        }
        r
    }
}

/// Scales a rational vector to the primitive integer vector on the same
/// ray, with the first non-zero entry positive.
pub(crate) fn primitive_integer(v: &[BigRational]) -> Vec<i64> {
    use num::integer::Integer;
    use num::ToPrimitive;
    let den = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    let g = if g.is_zero() { BigInt::one() } else { g * sign };
    ints.iter()
        .map(|x| (x / &g).to_i64().expect("pattern coefficient fits in i64"))
        .collect()
}

pub(crate) fn integers_to_rational(v: &[i64]) -> Vec<BigRational> {
    v.iter()
        .map(|&x| BigRational::from_integer(BigInt::from(x)))
        .collect()
}
