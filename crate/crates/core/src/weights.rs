//! Composition polynomials `w_sigma`, the two-layer weight `Q`, its rescaled
//! form `Q~` and the partition function.

use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::{One, Signed, Zero};

use crate::caps::{self, CapKind};
use crate::error::{Error, Result};
use crate::lattice::{
    composition_of, enumerate_paths, path_of, Composition, LatticePath, Occupation,
};
use crate::qcalc::{
    jackson_dq, jackson_dq_z, pochhammer_polynomial, poly_eval, q_number, q_pochhammer,
    BasisElement, QPolynomial,
};
use crate::rational::{format_rational, pow, Rational};

/// Model parameters `q in [0,1)`, `A >= 0`, `B >= 0` (Liggett's condition
/// is implied and `C = D = -q` are not stored).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelParams {
    q: Rational,
    a: Rational,
    b: Rational,
}

impl ModelParams {
    pub fn new(q: Rational, a: Rational, b: Rational) -> Result<Self> {
        if q.is_negative() || q >= Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "q must lie in [0,1), got {}",
                format_rational(&q)
            )));
        }
        if a.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "A must be >= 0, got {}",
                format_rational(&a)
            )));
        }
        if b.is_negative() {
            return Err(Error::InvalidParameter(format!(
                "B must be >= 0, got {}",
                format_rational(&b)
            )));
        }
        Ok(Self { q, a, b })
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn ab(&self) -> Rational {
        &self.a * &self.b
    }

    /// Smallest `N >= 1` with `A B q^(N+2) = 1`, if any. The basic weight
    /// equations only have the zero solution for `L >= N + 1` there.
    pub fn singular_level(&self) -> Option<u32> {
        let ab = self.ab();
        if self.q.is_zero() || ab.is_zero() {
            return None;
        }
        let mut value = ab * pow(&self.q, 3);
        let mut n = 1;
        while value >= Rational::one() {
            if value.is_one() {
                return Some(n);
            }
            value *= &self.q;
            n += 1;
        }
        None
    }

    /// `(AB;q)_2 / (AB;q)_(L+2)`, the factor turning `Q` into `Q~`.
    pub fn tilde_factor(&self, l: usize) -> Result<Rational> {
        let ab = self.ab();
        let den = q_pochhammer(&ab, &self.q, l as u32 + 2);
        if den.is_zero() {
            return Err(Error::SingularParameter {
                ab: format_rational(&ab),
                q: format_rational(&self.q),
                length: l + 2,
            });
        }
        Ok(q_pochhammer(&ab, &self.q, 2) / den)
    }
}

/// `w_sigma` through the iterated Jackson-derivative operator, starting from
/// `1/(z;q)_1 = 1/(1-z)` and applying, for `j = r` down to `0`, one `D_q`
/// followed by `sigma_j - 1` applications of `D_q z`. The result sits over
/// `(z;q)_(L+2)`, so its numerator is `w_sigma` itself.
pub fn w_sigma_operator(sigma: &Composition, q: &Rational) -> QPolynomial {
    let mut e = BasisElement::reciprocal_pochhammer(1);
    for &part in sigma.parts().iter().rev() {
        e = jackson_dq(&e, q);
        for _ in 1..part {
            e = jackson_dq_z(&e, q);
        }
    }
    debug_assert_eq!(e.depth(), sigma.system_size() + 2);
    e.numerator().clone()
}

/// `w_sigma` from the power series
/// `(z;q)_(L+2) sum_n z^n prod_j [n+j+1]_q^sigma_j`, truncated after the
/// term `n = L + 2`.
///
/// Panics if a coefficient above degree `L - r` survives, which would mean
/// the two definitions disagree.
pub fn w_sigma_series(sigma: &Composition, q: &Rational) -> QPolynomial {
    let l = sigma.system_size() as usize;
    let r = sigma.r() as usize;
    let terms: Vec<Rational> = (0..=l + 2)
        .map(|n| {
            sigma
                .parts()
                .iter()
                .enumerate()
                .fold(Rational::one(), |acc, (j, &s)| {
                    acc * pow(&q_number((n + j + 1) as u32, q), s)
                })
        })
        .collect();
    let poch = pochhammer_polynomial(q, l as u32 + 2);
    let product: Vec<Rational> = (0..=l + 2)
        .map(|k| {
            (0..=k).fold(Rational::zero(), |acc, n| {
                acc + &terms[n] * poch.coeff(k - n)
            })
        })
        .collect();
    for (k, c) in product.iter().enumerate().skip(l - r + 1) {
        assert!(
            c.is_zero(),
            "series coefficient {k} of w_{sigma} is {c}, expected 0 beyond degree {}",
            l - r
        );
    }
    QPolynomial::new(product[..=l - r].to_vec())
}

/// Memo of `w_sigma(AB)` for one parameter point, shared between workers.
/// Entries are deterministic, so concurrent writers store identical values.
#[derive(Debug)]
pub struct WeightTable {
    params: ModelParams,
    ab: Rational,
    memo: RwLock<HashMap<Composition, Rational>>,
}

impl WeightTable {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            ab: params.ab(),
            params: params.clone(),
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `w_sigma(AB)`.
    pub fn w_at_ab(&self, sigma: &Composition) -> Rational {
        if let Some(v) = self.memo.read().unwrap().get(sigma) {
            return v.clone();
        }
        let v = poly_eval(&w_sigma_operator(sigma, self.params.q()), &self.ab);
        self.memo.write().unwrap().insert(sigma.clone(), v.clone());
        v
    }

    /// `Q = B^(gamma_L - min) A^(-min) w_sigma(AB)`, the nonnegative-exponent
    /// form of `B^gamma_L (AB)^(-min) w_sigma(AB)`.
    pub fn path_weight(&self, gamma: &LatticePath) -> Rational {
        let b_exp = (gamma.end() - gamma.min()) as u32;
        let a_exp = (-gamma.min()) as u32;
        let mono = pow(self.params.b(), b_exp) * pow(self.params.a(), a_exp);
        if mono.is_zero() {
            return mono;
        }
        mono * self.w_at_ab(&composition_of(gamma))
    }

    pub fn q_weight(&self, tau: &Occupation, xi: &Occupation) -> Result<Rational> {
        Ok(self.path_weight(&path_of(tau, xi)?))
    }

    pub fn tilde_q_weight(&self, tau: &Occupation, xi: &Occupation) -> Result<Rational> {
        let factor = self.params.tilde_factor(tau.len())?;
        Ok(factor * self.q_weight(tau, xi)?)
    }

    pub fn len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Two-layer weight `Q(tau|xi)`.
pub fn q_weight(tau: &Occupation, xi: &Occupation, p: &ModelParams) -> Result<Rational> {
    WeightTable::new(p).q_weight(tau, xi)
}

/// Rescaled weight `Q~ = (AB;q)_2 / (AB;q)_(L+2) Q`.
pub fn tilde_q_weight(tau: &Occupation, xi: &Occupation, p: &ModelParams) -> Result<Rational> {
    WeightTable::new(p).tilde_q_weight(tau, xi)
}

/// `Z_L = sum_{tau,xi} Q`, computed as `sum_gamma 2^H(gamma) Q(gamma)` since
/// each path arises from exactly `2^H` pairs.
pub fn partition_z(l: usize, p: &ModelParams) -> Result<Rational> {
    caps::check(CapKind::Paths, l)?;
    let table = WeightTable::new(p);
    let mut z = Rational::zero();
    for gamma in enumerate_paths(l)? {
        let w = table.path_weight(&gamma);
        if !w.is_zero() {
            z += w * Rational::from_integer((1u64 << gamma.horizontal()).into());
        }
    }
    Ok(z)
}
