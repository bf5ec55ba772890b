//! Brute-force ground truth: the continuous-time ASEP generator on `2^L`
//! configurations, its exact stationary vector, and a Gillespie simulator.

mod gillespie;
pub mod linalg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::caps::{self, CapKind};
use crate::ensemble::Distribution;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_occupations, Occupation};
use crate::rational::Rational;
use crate::weights::ModelParams;

pub use gillespie::{gillespie_replicas, gillespie_simulate, SimulationEstimate};
use linalg::{nullvector_bareiss, nullvector_dixon, SparseIntMatrix};

/// Boundary and bulk rates of the open ASEP: particles hop right at rate 1
/// and left at rate `q`, enter at site 1 at `alpha`, leave there at `gamma`,
/// leave at site `L` at `beta` and enter there at `delta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rates {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub delta: Rational,
    pub q: Rational,
}

impl Rates {
    pub fn new(
        alpha: Rational,
        beta: Rational,
        gamma: Rational,
        delta: Rational,
        q: Rational,
    ) -> Result<Self> {
        for (name, v) in [
            ("alpha", &alpha),
            ("beta", &beta),
            ("gamma", &gamma),
            ("delta", &delta),
            ("q", &q),
        ] {
            if v.is_negative() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
            q,
        })
    }

    /// `gamma = q(1 - alpha)` and `delta = q(1 - beta)`.
    pub fn satisfies_liggett(&self) -> bool {
        let one = Rational::one();
        self.gamma == &self.q * (&one - &self.alpha) && self.delta == &self.q * (&one - &self.beta)
    }
}

/// Rates under Liggett's condition with `alpha = 1/(1+A)`, `beta = 1/(1+B)`.
pub fn rates_from_params(p: &ModelParams) -> Rates {
    let one = Rational::one();
    let alpha = (&one + p.a()).recip();
    let beta = (&one + p.b()).recip();
    let gamma = p.q() * (&one - &alpha);
    let delta = p.q() * (&one - &beta);
    Rates {
        alpha,
        beta,
        gamma,
        delta,
        q: p.q().clone(),
    }
}

/// Continuous-time generator: off-diagonal rates per source state, diagonal
/// equal to minus the row sum.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    len: usize,
    off: Vec<Vec<(usize, Rational)>>,
    diag: Vec<Rational>,
}

impl GeneratorMatrix {
    /// Builds a generator on `2^len` states from `(from, to, rate)` triples;
    /// repeated pairs are summed and self-loops ignored.
    pub fn from_transitions(
        len: usize,
        transitions: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self> {
        let dim = 1usize << len;
        let mut off: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); dim];
        for (from, to, rate) in transitions {
            if from >= dim || to >= dim {
                return Err(Error::InvalidParameter(format!(
                    "state index out of range for dimension {dim}"
                )));
            }
            if rate.is_negative() {
                return Err(Error::InvalidParameter(format!("negative rate {rate}")));
            }
            if from == to || rate.is_zero() {
                continue;
            }
            push_rate(&mut off[from], to, rate);
        }
        Ok(Self::from_rows(len, off))
    }

    fn from_rows(len: usize, mut off: Vec<Vec<(usize, Rational)>>) -> Self {
        for row in off.iter_mut() {
            row.sort_by_key(|(j, _)| *j);
        }
        let diag = off
            .iter()
            .map(|row| -row.iter().map(|(_, r)| r).sum::<Rational>())
            .collect();
        Self { len, off, diag }
    }

    /// Number of sites.
    pub fn sites(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.off.len()
    }

    pub fn rate(&self, from: usize, to: usize) -> Rational {
        if from == to {
            return self.diag[from].clone();
        }
        self.off[from]
            .iter()
            .find(|(j, _)| *j == to)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn off_diagonal(&self, from: usize) -> &[(usize, Rational)] {
        &self.off[from]
    }

    pub fn diagonal(&self) -> &[Rational] {
        &self.diag
    }

    /// `pi G`, exactly.
    pub fn left_apply(&self, pi: &[Rational]) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.diag.iter().zip(pi).map(|(d, p)| d * p).collect();
        for (i, row) in self.off.iter().enumerate() {
            if pi[i].is_zero() {
                continue;
            }
            for (j, r) in row {
                out[*j] += r * &pi[i];
            }
        }
        out
    }

    /// Transposed generator scaled to integer entries.
    fn integer_transpose(&self) -> SparseIntMatrix {
        let scale = self
            .off
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, (_, r)| acc.lcm(r.denom()));
        let to_int =
            |r: &Rational| -> BigInt { (r * Rational::from_integer(scale.clone())).to_integer() };
        let dim = self.dim();
        let mut rows: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); dim];
        for (i, row) in self.off.iter().enumerate() {
            for (j, r) in row {
                rows[*j].push((i, to_int(r)));
            }
        }
        for (i, d) in self.diag.iter().enumerate() {
            if !d.is_zero() {
                rows[i].push((i, to_int(d)));
            }
        }
        SparseIntMatrix { dim, rows }
    }
}

fn push_rate(row: &mut Vec<(usize, Rational)>, to: usize, rate: Rational) {
    match row.iter_mut().find(|(j, _)| *j == to) {
        Some((_, r)) => *r += rate,
        None => row.push((to, rate)),
    }
}

/// Outgoing transitions of one configuration (bit `i` is site `i + 1`).
fn transitions_from(len: usize, bits: u64, r: &Rates) -> Vec<(usize, Rational)> {
    let mut row = Vec::new();
    let mut add = |to: u64, rate: &Rational| {
        if !rate.is_zero() {
            push_rate(&mut row, to as usize, rate.clone());
        }
    };
    let one = Rational::one();
    for i in 0..len.saturating_sub(1) {
        let (a, b) = ((bits >> i) & 1, (bits >> (i + 1)) & 1);
        let swapped = bits ^ (0b11 << i);
        match (a, b) {
            (1, 0) => add(swapped, &one),
            (0, 1) => add(swapped, &r.q),
            _ => {}
        }
    }
    if len > 0 {
        let first = bits & 1;
        add(bits ^ 1, if first == 0 { &r.alpha } else { &r.gamma });
        let last_bit = 1u64 << (len - 1);
        let last = bits & last_bit;
        add(bits ^ last_bit, if last == 0 { &r.delta } else { &r.beta });
    }
    row
}

/// The ASEP generator on `L` sites; states are indexed by [`Occupation::index`].
pub fn build_generator(l: usize, r: &Rates) -> Result<GeneratorMatrix> {
    caps::check(CapKind::Generator, l)?;
    let off: Vec<Vec<(usize, Rational)>> = (0..1u64 << l)
        .into_par_iter()
        .map(|bits| transitions_from(l, bits, r))
        .collect();
    Ok(GeneratorMatrix::from_rows(l, off))
}

/// Which exact elimination backs [`stationary_vector_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    /// Bareiss up to [`BAREISS_MAX_DIM`] states, p-adic lifting above.
    Auto,
    Bareiss,
    Dixon,
}

pub const BAREISS_MAX_DIM: usize = 64;

/// Exact `pi` with `pi G = 0`, `sum pi = 1`, verified by multiplication.
pub fn stationary_vector_with(g: &GeneratorMatrix, solver: Solver) -> Result<Vec<Rational>> {
    let m = g.integer_transpose();
    let pi = match solver {
        Solver::Bareiss => nullvector_bareiss(&m)?,
        Solver::Dixon => nullvector_dixon(&m)?,
        Solver::Auto if g.dim() <= BAREISS_MAX_DIM => nullvector_bareiss(&m)?,
        Solver::Auto => nullvector_dixon(&m)?,
    };
    let residual = g.left_apply(&pi);
    let total: Rational = pi.iter().sum();
    if !total.is_one() || residual.iter().any(|v| !v.is_zero()) {
        return Err(Error::SingularSystem {
            dim: g.dim(),
            nullity: 1,
        });
    }
    Ok(pi)
}

pub fn stationary_vector(g: &GeneratorMatrix) -> Result<Vec<Rational>> {
    stationary_vector_with(g, Solver::Auto)
}

/// Stationary distribution over configurations in index order.
pub fn stationary_exact(g: &GeneratorMatrix) -> Result<Distribution<Occupation>> {
    let pi = stationary_vector(g)?;
    let support: Vec<Occupation> = enumerate_occupations(g.sites())?.collect();
    Distribution::new(support, pi)
}
