//! The two-layer ensemble, its top-layer marginal (the ASEP stationary
//! measure), the basic weight function `Phi`, the law of the random-walk
//! path, and the Duchi–Schaeffer comparison weight.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::caps::{self, CapKind};
use crate::error::{Error, Result};
use crate::lattice::{
    enumerate_occupations, enumerate_paths, is_motzkin, path_from_index, path_of, LatticePath,
    Occupation,
};
use crate::rational::{format_rational, pow, Rational};
use crate::weights::{ModelParams, WeightTable};

/// Exact probability distribution over an ordered support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution<S> {
    support: Vec<S>,
    probabilities: Vec<Rational>,
}

impl<S: PartialEq> Distribution<S> {
    /// Checks nonnegativity and that the probabilities sum to exactly one.
    pub fn new(support: Vec<S>, probabilities: Vec<Rational>) -> Result<Self> {
        if support.len() != probabilities.len() {
            return Err(Error::LengthMismatch {
                left: support.len(),
                right: probabilities.len(),
            });
        }
        if probabilities.iter().any(Signed::is_negative) {
            return Err(Error::InvalidParameter("negative probability".into()));
        }
        let total: Rational = probabilities.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {}",
                format_rational(&total)
            )));
        }
        Ok(Self {
            support,
            probabilities,
        })
    }

    /// Normalizes weights of a common sign; the total must be nonzero.
    pub fn from_weights(support: Vec<S>, weights: Vec<Rational>) -> Result<Self> {
        let total: Rational = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::InvalidParameter("weights sum to zero".into()));
        }
        let probabilities = weights.into_iter().map(|w| w / &total).collect();
        Self::new(support, probabilities)
    }

    pub fn support(&self) -> &[S] {
        &self.support
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, &Rational)> {
        self.support.iter().zip(&self.probabilities)
    }

    /// Probability of `state`, zero when it is not in the support.
    pub fn prob(&self, state: &S) -> Rational {
        self.support
            .iter()
            .position(|s| s == state)
            .map(|i| self.probabilities[i].clone())
            .unwrap_or_else(Rational::zero)
    }
}

impl Distribution<Occupation> {
    /// Probability lookup when the support is `Omega_L` in enumeration order.
    pub fn prob_of_occupation(&self, tau: &Occupation) -> Rational {
        match self.probabilities.get(tau.index()) {
            Some(p) if self.support[tau.index()] == *tau => p.clone(),
            _ => self.prob(tau),
        }
    }
}

/// Basic weight function `Phi` on `Omega_L`, indexed in enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTable {
    len: usize,
    values: Vec<Rational>,
}

impl PhiTable {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, tau: &Occupation) -> &Rational {
        assert_eq!(
            tau.len(),
            self.len,
            "configuration length does not match the table"
        );
        &self.values[tau.index()]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn normalized(&self) -> Result<Distribution<Occupation>> {
        Distribution::from_weights(
            enumerate_occupations(self.len)?.collect(),
            self.values.clone(),
        )
    }
}

/// `P_TL(tau, xi) = Q(tau|xi) / Z` over `Omega_L x Omega_L`, with `tau` as
/// the outer index.
pub fn two_layer_law(l: usize, p: &ModelParams) -> Result<Distribution<(Occupation, Occupation)>> {
    caps::check(CapKind::Pairs, l)?;
    let table = WeightTable::new(p);
    let mut support = Vec::with_capacity(1 << (2 * l));
    let mut weights = Vec::with_capacity(1 << (2 * l));
    for tau in enumerate_occupations(l)? {
        for xi in enumerate_occupations(l)? {
            weights.push(table.q_weight(&tau, &xi)?);
            support.push((tau, xi));
        }
    }
    Distribution::from_weights(support, weights)
}

/// Top-layer marginal `sum_xi P(tau, xi)`.
pub fn top_marginal(
    pairs: &Distribution<(Occupation, Occupation)>,
) -> Result<Distribution<Occupation>> {
    let l = pairs.support().first().map_or(0, |(t, _)| t.len());
    let mut acc = vec![Rational::zero(); 1 << l];
    for ((tau, _), pr) in pairs.iter() {
        acc[tau.index()] += pr;
    }
    Distribution::new(enumerate_occupations(l)?.collect(), acc)
}

/// Unnormalized top-layer sums `sum_xi Q(tau|xi)`, indexed by `tau`.
///
/// Walks the `3^L` paths instead of the `4^L` pairs: a path with `H` level
/// steps is compatible with exactly `2^H` top layers (free on level steps,
/// forced elsewhere), each paired with the unique matching bottom layer.
/// Path weights are brought to a common denominator so the per-`tau`
/// accumulation runs on integers.
fn top_layer_sums(l: usize, table: &WeightTable) -> Result<Vec<Rational>> {
    caps::check(CapKind::Paths, l)?;
    let count = 3u64.pow(l as u32);
    let weights: Vec<Rational> = (0..count)
        .into_par_iter()
        .map(|k| table.path_weight(&path_from_index(l, k)))
        .collect();
    let denom = weights
        .iter()
        .filter(|w| !w.is_zero())
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let numerators: Vec<BigInt> = weights
        .iter()
        .map(|w| w.numer() * (&denom / w.denom()))
        .collect();

    const CHUNK: u64 = 2048;
    let chunks = count.div_ceil(CHUNK);
    let accumulate = |chunk: u64| {
        let mut acc = vec![BigInt::zero(); 1 << l];
        for k in chunk * CHUNK..((chunk + 1) * CHUNK).min(count) {
            let num = &numerators[k as usize];
            if num.is_zero() {
                continue;
            }
            let (up, level) = path_from_index(l, k).forced_top_and_level_mask();
            // every submask of the level steps
            let mut sub = level;
            loop {
                acc[(up | sub) as usize] += num;
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & level;
            }
        }
        acc
    };
    let totals = (0..chunks).into_par_iter().map(accumulate).reduce(
        || vec![BigInt::zero(); 1 << l],
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    Ok(totals
        .into_iter()
        .map(|n| Rational::new(n, denom.clone()))
        .collect())
}

/// ASEP stationary measure as the top-layer marginal of the two-layer
/// ensemble. Valid for all `A, B >= 0`, including points where `Q~` is
/// singular.
pub fn stationary_mu(l: usize, p: &ModelParams) -> Result<Distribution<Occupation>> {
    let table = WeightTable::new(p);
    let sums = top_layer_sums(l, &table)?;
    Distribution::from_weights(enumerate_occupations(l)?.collect(), sums)
}

/// `Phi(tau) = sum_xi Q~(tau|xi)`, by direct enumeration of pairs.
pub fn phi_table(l: usize, p: &ModelParams) -> Result<PhiTable> {
    caps::check(CapKind::Pairs, l)?;
    let factor = p.tilde_factor(l)?;
    let table = WeightTable::new(p);
    let mut values = Vec::with_capacity(1 << l);
    for tau in enumerate_occupations(l)? {
        let mut sum = Rational::zero();
        for xi in enumerate_occupations(l)? {
            sum += table.q_weight(&tau, &xi)?;
        }
        values.push(sum * &factor);
    }
    Ok(PhiTable { len: l, values })
}

/// Law of the path: `P(gamma) ~ 2^H(gamma) Q(gamma)` over all `3^L` paths
/// in enumeration order (zero-probability paths included).
pub fn path_law(l: usize, p: &ModelParams) -> Result<Distribution<LatticePath>> {
    let table = WeightTable::new(p);
    let paths: Vec<LatticePath> = enumerate_paths(l)?.collect();
    let weights = paths
        .par_iter()
        .map(|g| table.path_weight(g) * Rational::from_integer(BigInt::one() << g.horizontal()))
        .collect();
    Distribution::from_weights(paths, weights)
}

/// Exact law of `tau` when `gamma` follows `law` and the level steps are
/// filled with independent fair bits.
pub fn push_forward_top(law: &Distribution<LatticePath>) -> Result<Distribution<Occupation>> {
    let l = law.support().first().map_or(0, LatticePath::len);
    let mut acc = vec![Rational::zero(); 1 << l];
    for (g, pr) in law.iter() {
        if pr.is_zero() {
            continue;
        }
        let (up, level) = g.forced_top_and_level_mask();
        let share = pr / Rational::from_integer(BigInt::one() << g.horizontal());
        let mut sub = level;
        loop {
            acc[(up | sub) as usize] += &share;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & level;
        }
    }
    Distribution::new(enumerate_occupations(l)?.collect(), acc)
}

/// W and B labels of a Motzkin pair: site `j` is W when
/// `gamma_(j-1) = gamma_j = 0` and `xi_j = 1`; it is B when
/// `gamma_(j-1) = 0`, `xi_j = 0` and no W label sits to its left.
/// Returned as zero-based site indices `(w, b)`.
pub fn duchi_labels(tau: &Occupation, xi: &Occupation) -> Result<(Vec<usize>, Vec<usize>)> {
    let gamma = path_of(tau, xi)?;
    if !is_motzkin(&gamma) {
        return Err(Error::NotInConfigurationSpace(format!(
            "({tau} | {xi}) has path {gamma}"
        )));
    }
    let v = gamma.values();
    let w: Vec<usize> = (0..tau.len())
        .filter(|&i| v[i] == 0 && v[i + 1] == 0 && xi.get(i) == 1)
        .collect();
    let first_w = w.first().copied().unwrap_or(usize::MAX);
    let b = (0..tau.len())
        .filter(|&i| v[i] == 0 && xi.get(i) == 0 && i < first_w)
        .collect();
    Ok((w, b))
}

/// Duchi–Schaeffer weight `(1+A)^N(B) (1+B)^N(W)` on Motzkin pairs.
pub fn duchi_weight(
    tau: &Occupation,
    xi: &Occupation,
    a: &Rational,
    b: &Rational,
) -> Result<Rational> {
    let (w, bl) = duchi_labels(tau, xi)?;
    let one = Rational::one();
    Ok(pow(&(&one + a), bl.len() as u32) * pow(&(&one + b), w.len() as u32))
}

/// Normalized top-layer marginal of the Duchi–Schaeffer weight over the
/// Motzkin pairs.
pub fn duchi_top_marginal(
    l: usize,
    a: &Rational,
    b: &Rational,
) -> Result<Distribution<Occupation>> {
    caps::check(CapKind::Pairs, l)?;
    let mut acc = vec![Rational::zero(); 1 << l];
    for tau in enumerate_occupations(l)? {
        for xi in enumerate_occupations(l)? {
            match duchi_weight(&tau, &xi, a, b) {
                Ok(w) => acc[tau.index()] += w,
                Err(Error::NotInConfigurationSpace(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Distribution::from_weights(enumerate_occupations(l)?.collect(), acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn params(q: Rational, a: Rational, b: Rational) -> ModelParams {
        ModelParams::new(q, a, b).unwrap()
    }

    fn occ(s: &str) -> Occupation {
        s.parse().unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![1, 2], vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Distribution::new(vec![1, 2], vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        let d = Distribution::new(vec![1, 2], vec![ratio(1, 4), ratio(3, 4)]).unwrap();
        assert_eq!(d.prob(&2), ratio(3, 4));
        assert_eq!(d.prob(&5), int(0));
    }

    #[test]
    fn uniform_pairs_at_l1_q0_ab1() {
        let law = two_layer_law(1, &params(int(0), int(1), int(1))).unwrap();
        assert_eq!(law.len(), 4);
        assert!(law.probabilities().iter().all(|p| *p == ratio(1, 4)));
    }

    #[test]
    fn l1_pair_law_follows_weight_table() {
        let (q, a, b) = (ratio(1, 2), int(2), ratio(1, 3));
        let law = two_layer_law(1, &params(q.clone(), a.clone(), b.clone())).unwrap();
        let one = Rational::one();
        let w = [
            &one + &q * &a * &b,
            &b * (&one + &q),
            &a * (&one + &q),
            &one + &q * &a * &b,
        ];
        let z: Rational = w.iter().sum();
        // order: (0,0), (0,1), (1,0), (1,1) with tau outer
        let expect = [&w[0] / &z, &w[2] / &z, &w[1] / &z, &w[3] / &z];
        assert_eq!(law.probabilities(), &expect);
    }

    #[test]
    fn mu_l1_single_site_balance() {
        let mu = stationary_mu(1, &params(ratio(1, 2), int(2), int(1))).unwrap();
        assert_eq!(mu.prob_of_occupation(&occ("1")), ratio(7, 17));
        for q in [int(0), ratio(1, 3), ratio(9, 10)] {
            let mu = stationary_mu(1, &params(q, ratio(5, 3), ratio(5, 3))).unwrap();
            assert_eq!(mu.prob_of_occupation(&occ("1")), ratio(1, 2));
        }
    }

    #[test]
    fn path_route_equals_pair_marginal() {
        for (q, a, b) in [
            (ratio(1, 2), int(1), int(2)),
            (ratio(1, 3), int(0), int(2)),
            (ratio(9, 10), int(3), int(0)),
            (int(0), int(0), int(0)),
        ] {
            let p = params(q, a, b);
            for l in 0..=5 {
                let direct = top_marginal(&two_layer_law(l, &p).unwrap()).unwrap();
                assert_eq!(stationary_mu(l, &p).unwrap(), direct);
            }
        }
    }

    #[test]
    fn phi_at_l0_and_l1() {
        let (q, a, b) = (ratio(1, 3), int(2), ratio(3, 5));
        let p = params(q.clone(), a.clone(), b.clone());
        let phi0 = phi_table(0, &p).unwrap();
        assert_eq!(phi0.get(&Occupation::EMPTY), &int(1));
        let phi1 = phi_table(1, &p).unwrap();
        let one = Rational::one();
        let expect = (&one + &q * &a * &b + &a * (&one + &q)) / (&one - &a * &b * &q * &q);
        assert_eq!(phi1.get(&occ("0")), &expect);
    }

    #[test]
    fn normalized_phi_is_mu() {
        let p = params(ratio(1, 2), ratio(1, 2), ratio(1, 3));
        for l in 0..=4 {
            assert_eq!(
                phi_table(l, &p).unwrap().normalized().unwrap(),
                stationary_mu(l, &p).unwrap()
            );
        }
    }

    #[test]
    fn phi_refuses_singular_points() {
        let p = params(ratio(1, 2), int(4), int(1));
        assert!(matches!(
            phi_table(2, &p),
            Err(Error::SingularParameter { .. })
        ));
    }

    #[test]
    fn path_law_l1_with_doubled_level_edge() {
        let law = path_law(1, &params(int(0), int(1), int(1))).unwrap();
        let down = LatticePath::from_values(vec![0, -1]).unwrap();
        let flat = LatticePath::from_values(vec![0, 0]).unwrap();
        let up = LatticePath::from_values(vec![0, 1]).unwrap();
        assert_eq!(law.prob(&flat), ratio(1, 2));
        assert_eq!(law.prob(&up), ratio(1, 4));
        assert_eq!(law.prob(&down), ratio(1, 4));
    }

    #[test]
    fn path_law_pushes_forward_to_mu() {
        let p = params(ratio(1, 2), int(1), int(2));
        for l in 0..=5 {
            let pushed = push_forward_top(&path_law(l, &p).unwrap()).unwrap();
            assert_eq!(pushed, stationary_mu(l, &p).unwrap());
        }
    }

    #[test]
    fn path_law_at_zero_boundaries_lives_on_motzkin_paths() {
        let law = path_law(4, &params(ratio(1, 3), int(0), int(0))).unwrap();
        for (g, pr) in law.iter() {
            assert_eq!(!pr.is_zero(), is_motzkin(g), "{g}");
        }
    }

    #[test]
    fn duchi_labels_on_figure_pair() {
        let tau = occ("1011001000");
        let xi = occ("1000110100");
        let (w, b) = duchi_labels(&tau, &xi).unwrap();
        assert_eq!(w, vec![0]);
        assert!(b.is_empty());
        assert_eq!(duchi_weight(&tau, &xi, &int(2), &int(5)).unwrap(), int(6));
    }

    #[test]
    fn duchi_rejects_non_motzkin_pairs() {
        assert!(matches!(
            duchi_weight(&occ("01"), &occ("10"), &int(1), &int(1)),
            Err(Error::NotInConfigurationSpace(_))
        ));
    }

    #[test]
    fn duchi_weight_is_one_at_zero_boundaries() {
        for tau in enumerate_occupations(4).unwrap() {
            for xi in enumerate_occupations(4).unwrap() {
                if let Ok(w) = duchi_weight(&tau, &xi, &int(0), &int(0)) {
                    assert_eq!(w, int(1));
                }
            }
        }
    }

    #[test]
    fn duchi_empty_bottom_on_flat_path() {
        // xi = 0 and a flat path force tau = 0: every site is B, none is W
        let tau = occ("0000");
        let (w, b) = duchi_labels(&tau, &tau).unwrap();
        assert!(w.is_empty());
        assert_eq!(b, vec![0, 1, 2, 3]);
        assert_eq!(duchi_weight(&tau, &tau, &int(2), &int(7)).unwrap(), int(81));
    }

    #[test]
    fn duchi_marginal_matches_mu_at_q0() {
        for (a, b) in [
            (int(1), int(2)),
            (ratio(1, 2), ratio(1, 2)),
            (int(0), int(0)),
        ] {
            let p = params(int(0), a.clone(), b.clone());
            for l in 1..=4 {
                assert_eq!(
                    duchi_top_marginal(l, &a, &b).unwrap(),
                    stationary_mu(l, &p).unwrap()
                );
            }
        }
    }

    #[test]
    fn mu_positive_for_positive_boundaries() {
        let mu = stationary_mu(5, &params(ratio(9, 10), ratio(1, 7), int(5))).unwrap();
        assert!(mu.probabilities().iter().all(|p| p.is_positive()));
    }
}
