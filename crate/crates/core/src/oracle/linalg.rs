//! Exact solvers for the one-dimensional left nullspace of an integer
//! generator matrix.
//!
//! Two routes: fraction-free Bareiss elimination over the integers, and
//! Dixon p-adic lifting (one LU factorization modulo a word-sized prime,
//! then cheap lifting steps and rational reconstruction). Both return the
//! normalized vector and both are checked exactly before returning.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Sparse square integer matrix stored by rows.
#[derive(Clone, Debug)]
pub struct SparseIntMatrix {
    pub dim: usize,
    pub rows: Vec<Vec<(usize, BigInt)>>,
}

impl SparseIntMatrix {
    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .fold(BigInt::zero(), |acc, (j, a)| acc + a * &x[*j])
            })
            .collect()
    }

    fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut m = vec![vec![BigInt::zero(); self.dim]; self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, a) in row {
                m[i][*j] += a;
            }
        }
        m
    }
}

/// Positive vector `x` with `M x = 0` and `sum x = 1`, where `M` has
/// nullity one, by Bareiss elimination (pivot: first nonzero by row index).
pub fn nullvector_bareiss(m: &SparseIntMatrix) -> Result<Vec<Rational>> {
    let n = m.dim;
    let mut a = m.to_dense();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let Some(p) = (row..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let (top, rest) = a.split_at_mut(row + 1);
        let pivot_row = &top[row];
        let pv = pivot_row[col].clone();
        for r in rest.iter_mut() {
            let factor = r[col].clone();
            for j in col + 1..n {
                let v = &pv * &r[j] - &factor * &pivot_row[j];
                r[j] = if prev.is_one() { v } else { v / &prev };
            }
            r[col] = BigInt::zero();
        }
        prev = pv;
        pivots.push((row, col));
        row += 1;
    }
    let nullity = n - pivots.len();
    if nullity != 1 {
        return Err(Error::SingularSystem { dim: n, nullity });
    }
    let free = (0..n)
        .find(|c| !pivots.iter().any(|&(_, pc)| pc == *c))
        .expect("one free column");
    let mut x = vec![Rational::zero(); n];
    x[free] = Rational::one();
    for &(r, c) in pivots.iter().rev() {
        let s = (c + 1..n).fold(Rational::zero(), |acc, j| {
            if a[r][j].is_zero() {
                acc
            } else {
                acc + Rational::from_integer(a[r][j].clone()) * &x[j]
            }
        });
        x[c] = -s / Rational::from_integer(a[r][c].clone());
    }
    normalize(x, n)
}

fn normalize(x: Vec<Rational>, n: usize) -> Result<Vec<Rational>> {
    let total: Rational = x.iter().sum();
    if total.is_zero() {
        return Err(Error::SingularSystem { dim: n, nullity: 1 });
    }
    Ok(x.into_iter().map(|v| v / &total).collect())
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes below `2^31`, descending, so products of residues fit in `u64`.
fn primes() -> impl Iterator<Item = u64> {
    (1u64 << 20..1u64 << 31).rev().filter(|&n| is_prime(n))
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// LU factorization with row pivoting modulo a prime.
struct ModularLu {
    p: u64,
    n: usize,
    lu: Vec<u64>,
    perm: Vec<usize>,
}

impl ModularLu {
    /// `None` when the matrix is singular modulo `p`; the second field is the
    /// rank reached.
    fn factor(m: &SparseIntMatrix, p: u64) -> std::result::Result<Self, usize> {
        let n = m.dim;
        let mut lu = vec![0u64; n * n];
        for (i, row) in m.rows.iter().enumerate() {
            for (j, a) in row {
                let cell = &mut lu[i * n + j];
                *cell = (*cell + residue(a, p)) % p;
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let Some(piv) = (k..n).find(|&i| lu[i * n + k] != 0) else {
                return Err(k);
            };
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let inv = pow_mod(lu[k * n + k], p - 2, p);
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..k * n + n];
            for row in tail.chunks_exact_mut(n) {
                if row[k] == 0 {
                    continue;
                }
                let f = row[k] * inv % p;
                row[k] = f;
                let nf = p - f;
                for j in k + 1..n {
                    if pivot_row[j] != 0 {
                        row[j] = (row[j] + nf * pivot_row[j]) % p;
                    }
                }
            }
        }
        Ok(Self { p, n, lu, perm })
    }

    fn solve(&self, b: &[u64]) -> Vec<u64> {
        let (n, p) = (self.n, self.p);
        let mut y: Vec<u64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + n];
            let mut s = y[i];
            for j in 0..i {
                if row[j] != 0 {
                    s = (s + (p - row[j]) * y[j]) % p;
                }
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..i * n + n];
            let mut s = y[i];
            for j in i + 1..n {
                if row[j] != 0 {
                    s = (s + (p - row[j]) * y[j]) % p;
                }
            }
            y[i] = s * pow_mod(row[i], p - 2, p) % p;
        }
        y
    }
}

/// `n/d` with `|n|, d <= sqrt(m/2)` and `n = d u (mod m)`, if it exists.
fn rational_reconstruction(u: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let sym = symmetric_mod(u, m);
    if sym.abs() <= *bound {
        return Some((sym, BigInt::one()));
    }
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > *bound {
        let (quot, rem) = r0.div_rem(&r1);
        let t2 = &t0 - &quot * &t1;
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.sign() == Sign::Minus {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

fn symmetric_mod(u: &BigInt, m: &BigInt) -> BigInt {
    let r = u.mod_floor(m);
    if &r + &r > *m {
        r - m
    } else {
        r
    }
}

/// Attempts to read `x = X mod M` as a rational vector with one common
/// denominator and checks `A x = b` exactly.
fn try_reconstruct(
    a: &SparseIntMatrix,
    b: &[BigInt],
    x: &[BigInt],
    m: &BigInt,
) -> Option<Vec<Rational>> {
    let bound = (m >> 1usize).sqrt();
    let mut den = BigInt::one();
    for xi in x {
        let (_, d) = rational_reconstruction(&(xi * &den), m, &bound)?;
        den *= d;
    }
    let nums: Vec<BigInt> = x.iter().map(|xi| symmetric_mod(&(xi * &den), m)).collect();
    let lhs = a.mul_vec(&nums);
    if lhs.iter().zip(b).any(|(l, r)| *l != r * &den) {
        return None;
    }
    Some(
        nums.into_iter()
            .map(|n| Rational::new(n, den.clone()))
            .collect(),
    )
}

/// Same contract as [`nullvector_bareiss`], solved by replacing the last
/// equation with the normalization `sum x = 1` and lifting p-adically.
pub fn nullvector_dixon(m: &SparseIntMatrix) -> Result<Vec<Rational>> {
    let n = m.dim;
    if n == 1 {
        return if m.rows[0].iter().all(|(_, a)| a.is_zero()) {
            Ok(vec![Rational::one()])
        } else {
            Err(Error::SingularSystem { dim: 1, nullity: 0 })
        };
    }
    let mut system = m.clone();
    system.rows[n - 1] = (0..n).map(|j| (j, BigInt::one())).collect();
    let mut b = vec![BigInt::zero(); n];
    b[n - 1] = BigInt::one();

    let mut lu = None;
    let mut best_rank = 0;
    for p in primes().take(4) {
        match ModularLu::factor(&system, p) {
            Ok(f) => {
                lu = Some(f);
                break;
            }
            Err(rank) => best_rank = best_rank.max(rank),
        }
    }
    let Some(lu) = lu else {
        // the normalized system is singular, so the nullspace is not a line
        return Err(Error::SingularSystem {
            dim: n,
            nullity: n - best_rank,
        });
    };
    let p = lu.p;
    let pb = BigInt::from(p);

    let mut residual = b.clone();
    let mut x = vec![BigInt::zero(); n];
    let mut modulus = BigInt::one();
    let mut next_attempt = 4;
    for step in 1..=20_000 {
        let rhs: Vec<u64> = residual.iter().map(|r| residue(r, p)).collect();
        let digit = lu.solve(&rhs);
        let digit_big: Vec<BigInt> = digit.iter().map(|&d| BigInt::from(d)).collect();
        for (xi, d) in x.iter_mut().zip(&digit_big) {
            *xi += d * &modulus;
        }
        modulus *= &pb;
        let ad = system.mul_vec(&digit_big);
        for (r, v) in residual.iter_mut().zip(ad) {
            *r = (&*r - v) / &pb;
        }
        if residual.iter().all(Zero::is_zero) {
            // exact integer solution
            return normalize(x.into_iter().map(Rational::from_integer).collect(), n);
        }
        if step == next_attempt {
            if let Some(sol) = try_reconstruct(&system, &b, &x, &modulus) {
                if sol.iter().any(Signed::is_negative) {
                    return Err(Error::SingularSystem { dim: n, nullity: 1 });
                }
                return Ok(sol);
            }
            next_attempt += (step / 4).max(4);
        }
    }
    Err(Error::SingularSystem { dim: n, nullity: 1 })
}
