//! q-numbers, q-Pochhammer symbols, exact polynomials in `z`, and the
//! Jackson derivative acting on the closed family `z^j / (z;q)_n`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::rational::{pow, Rational};

/// `[n]_q = 1 + q + ... + q^(n-1)`, zero for `n = 0`.
pub fn q_number(n: u32, q: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut term = Rational::one();
    for _ in 0..n {
        acc += &term;
        term *= q;
    }
    acc
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: u32, q: &Rational) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * q_number(k, q))
}

/// `(a;q)_n = prod_{k<n} (1 - a q^k)`.
pub fn q_pochhammer(a: &Rational, q: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    let mut aqk = a.clone();
    for _ in 0..n {
        acc *= Rational::one() - &aqk;
        aqk *= q;
    }
    acc
}

/// Dense polynomial in `z` with exact coefficients; index `i` holds the
/// coefficient of `z^i`. Trailing zeros are always trimmed, so the zero
/// polynomial has no coefficients and equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPolynomial {
    coeffs: Vec<Rational>,
}

impl QPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c z^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// `f(c z)`.
    pub fn dilate(&self, c: &Rational) -> Self {
        let mut ck = Rational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a * &ck);
            ck *= c;
        }
        Self::new(coeffs)
    }

    /// Jackson derivative of a polynomial, term by term.
    pub fn jackson_derivative(&self, q: &Rational) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, a)| a * q_number(n as u32, q))
                .collect(),
        )
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }
}

impl Add for &QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        QPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return QPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPolynomial::new(out)
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        Ok(())
    }
}

/// `(z;q)_n` expanded as a polynomial in `z`.
pub fn pochhammer_polynomial(q: &Rational, n: u32) -> QPolynomial {
    let mut coeffs = vec![Rational::one()];
    let mut qk = Rational::one();
    for _ in 0..n {
        // multiply by (1 - q^k z)
        let mut next = vec![Rational::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * &qk;
        }
        coeffs = next;
        qk *= q;
    }
    QPolynomial::new(coeffs)
}

/// Horner evaluation.
pub fn poly_eval(p: &QPolynomial, z: &Rational) -> Rational {
    p.coeffs
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * z + c)
}

/// `sum_j c_j z^j / (z;q)_depth` for a q fixed by the caller.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    depth: u32,
    numerator: QPolynomial,
}

impl BasisElement {
    pub fn new(depth: u32, coeffs: Vec<Rational>) -> Self {
        Self {
            depth,
            numerator: QPolynomial::new(coeffs),
        }
    }

    /// `1/(z;q)_n`.
    pub fn reciprocal_pochhammer(depth: u32) -> Self {
        Self::new(depth, vec![Rational::one()])
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn coeffs(&self) -> &[Rational] {
        self.numerator.coeffs()
    }

    pub fn numerator(&self) -> &QPolynomial {
        &self.numerator
    }

    /// Multiplication by `z`, depth unchanged.
    pub fn shift_by_z(&self) -> Self {
        Self {
            depth: self.depth,
            numerator: self.numerator.shift(1),
        }
    }

    /// Same function written over `(z;q)_(depth+1)`.
    pub fn raise_depth(&self, q: &Rational) -> Self {
        let factor = QPolynomial::new(vec![Rational::one(), -pow(q, self.depth)]);
        Self {
            depth: self.depth + 1,
            numerator: &self.numerator * &factor,
        }
    }

    /// Rewrites at the given depth, which must not be below the current one.
    pub fn at_depth(&self, depth: u32, q: &Rational) -> Self {
        assert!(
            depth >= self.depth,
            "cannot lower the depth of a basis element"
        );
        let mut e = self.clone();
        while e.depth < depth {
            e = e.raise_depth(q);
        }
        e
    }

    /// Value at `z`; `None` where `(z;q)_depth` vanishes.
    pub fn eval(&self, z: &Rational, q: &Rational) -> Option<Rational> {
        let den = q_pochhammer(z, q, self.depth);
        if den.is_zero() {
            None
        } else {
            Some(poly_eval(&self.numerator, z) / den)
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            depth: self.depth,
            numerator: self.numerator.scale(c),
        }
    }

    /// Sum of two elements, brought to a common depth first.
    pub fn add(&self, other: &Self, q: &Rational) -> Self {
        let d = self.depth.max(other.depth);
        let (a, b) = (self.at_depth(d, q), other.at_depth(d, q));
        Self {
            depth: d,
            numerator: &a.numerator + &b.numerator,
        }
    }
}

/// Coefficient `q^j [n]_q - q^n [j]_q` of `z^j` in `D_q[z^j/(z;q)_n]` once
/// written over `(z;q)_(n+1)`; equals `q^j [n-j]_q` when `j <= n`.
fn diagonal_coefficient(j: u32, n: u32, q: &Rational) -> Rational {
    pow(q, j) * q_number(n, q) - pow(q, n) * q_number(j, q)
}

/// Jackson derivative on the basis:
/// `D_q[z^j/(z;q)_n] = (q^j [n-j]_q z^j + [j]_q z^(j-1)) / (z;q)_(n+1)`.
pub fn jackson_dq(e: &BasisElement, q: &Rational) -> BasisElement {
    let n = e.depth;
    let len = e.coeffs().len();
    let mut out = vec![Rational::zero(); len];
    for (j, c) in e.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let j32 = j as u32;
        out[j] += c * diagonal_coefficient(j32, n, q);
        if j > 0 {
            out[j - 1] += c * q_number(j32, q);
        }
    }
    BasisElement::new(n + 1, out)
}

/// `(D_q z)[z^j/(z;q)_n] = (q^(j+1) [n-1-j]_q z^(j+1) + [j+1]_q z^j) / (z;q)_(n+1)`.
pub fn jackson_dq_z(e: &BasisElement, q: &Rational) -> BasisElement {
    let n = e.depth;
    let len = e.coeffs().len();
    let mut out = vec![Rational::zero(); len + 1];
    for (j, c) in e.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let j1 = j as u32 + 1;
        out[j + 1] += c * diagonal_coefficient(j1, n, q);
        out[j] += c * q_number(j1, q);
    }
    BasisElement::new(n + 1, out)
}
