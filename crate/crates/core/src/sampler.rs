//! Exact inverse-CDF sampling of the two-layer ensemble and z-score
//! comparison of samples against exact laws.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ensemble::{path_law, two_layer_law, Distribution};
use crate::error::{Error, Result};
use crate::lattice::{tau_from_path, xi_from_path, Occupation};
use crate::rational::{to_f64, Rational};
use crate::weights::ModelParams;

/// Draws per seeded substream.
const BLOCK: usize = 4096;

/// How a batch was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    /// Path from the `3^L` path law, top layer filled with fair bits.
    Path,
    /// Pair drawn directly from the `4^L` two-layer table.
    Pair,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Path => "path",
            Route::Pair => "pair",
        })
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(Route::Path),
            "pair" => Ok(Route::Pair),
            _ => Err(Error::Parse {
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    pub seed: u64,
    pub route: Route,
    /// `(tau, xi)` pairs in draw order.
    pub draws: Vec<(Occupation, Occupation)>,
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.draws.len()
    }

    pub fn tops(&self) -> impl Iterator<Item = &Occupation> {
        self.draws.iter().map(|(t, _)| t)
    }

    /// One `tau,xi` line per draw.
    pub fn to_csv_lines(&self) -> Vec<String> {
        self.draws.iter().map(|(t, x)| format!("{t},{x}")).collect()
    }
}

/// Cumulative sums of a distribution scaled to integers over a common
/// denominator, so that comparing with a dyadic uniform is integer work.
struct Cdf {
    cum: Vec<BigInt>,
    den: BigInt,
}

impl Cdf {
    fn new(probs: &[Rational]) -> Self {
        let den = probs.iter().fold(BigInt::one(), |acc, p| {
            num_integer::lcm(acc, p.denom().clone())
        });
        let mut run = BigInt::zero();
        let cum = probs
            .iter()
            .map(|p| {
                run += p.numer() * (&den / p.denom());
                run.clone()
            })
            .collect();
        Self { cum, den }
    }

    /// First index `i` with `cdf_i > u / 2^128`.
    fn invert(&self, u: u128) -> usize {
        let target = BigInt::from(u) * &self.den;
        self.cum.partition_point(|c| (c << 128usize) <= target)
    }
}

fn uniform128(rng: &mut ChaCha8Rng) -> u128 {
    (u128::from(rng.random::<u64>()) << 64) | u128::from(rng.random::<u64>())
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// `n` draws of `(tau, xi)` from the two-layer ensemble via the path law.
pub fn sample_two_layer(l: usize, p: &ModelParams, n: usize, seed: u64) -> Result<SampleBatch> {
    sample_two_layer_with(l, p, n, seed, Route::Path)
}

pub fn sample_two_layer_with(
    l: usize,
    p: &ModelParams,
    n: usize,
    seed: u64,
    route: Route,
) -> Result<SampleBatch> {
    let blocks = n.div_ceil(BLOCK);
    let sizes = move |b: usize| BLOCK.min(n - b * BLOCK);
    let draws: Vec<(Occupation, Occupation)> = match route {
        Route::Path => {
            let law = path_law(l, p)?;
            let cdf = Cdf::new(law.probabilities());
            let paths = law.support();
            let chunks: Vec<Vec<_>> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut rng = block_rng(seed, b);
                    (0..sizes(b))
                        .map(|_| {
                            let gamma = &paths[cdf.invert(uniform128(&mut rng))];
                            let eta = Occupation::from_bits(l, rng.random::<u64>());
                            let tau = tau_from_path(gamma, &eta)?;
                            let xi = xi_from_path(&tau, gamma)?;
                            Ok((tau, xi))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            chunks.concat()
        }
        Route::Pair => {
            let law = two_layer_law(l, p)?;
            let cdf = Cdf::new(law.probabilities());
            let pairs = law.support();
            let chunks: Vec<Vec<_>> = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut rng = block_rng(seed, b);
                    (0..sizes(b))
                        .map(|_| pairs[cdf.invert(uniform128(&mut rng))])
                        .collect()
                })
                .collect();
            chunks.concat()
        }
    };
    Ok(SampleBatch { seed, route, draws })
}

/// Per-state comparison of observed frequencies with exact probabilities.
#[derive(Clone, Debug)]
pub struct CompareReport<S> {
    pub count: usize,
    /// `(state, observed frequency, exact probability, z)`.
    pub cells: Vec<(S, f64, f64, f64)>,
    pub max_abs_z: f64,
    pub beyond_three: usize,
}

impl<S> CompareReport<S> {
    pub fn within(&self, bound: f64) -> bool {
        self.max_abs_z <= bound
    }
}

/// `z = (freq - p) sqrt(N) / sqrt(p (1 - p))`; cells with `p` in `{0, 1}`
/// score 0 when matched exactly and infinity otherwise.
pub fn z_scores<'a, S>(
    observed: impl IntoIterator<Item = &'a S>,
    exact: &Distribution<S>,
) -> Result<CompareReport<S>>
where
    S: Clone + Eq + Hash + fmt::Debug + 'a,
{
    let position: HashMap<&S, usize> = exact
        .support()
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let mut counts = vec![0usize; exact.len()];
    for s in observed {
        let Some(&i) = position.get(s) else {
            return Err(Error::StateSpaceMismatch(format!(
                "sampled state {s:?} is outside the exact support"
            )));
        };
        counts[i] += 1;
    }
    Ok(report_from_counts(exact, &counts))
}

fn report_from_counts<S: Clone + PartialEq>(
    exact: &Distribution<S>,
    counts: &[usize],
) -> CompareReport<S> {
    let n: usize = counts.iter().sum();
    let mut cells = Vec::with_capacity(exact.len());
    let mut max_abs_z = 0.0f64;
    let mut beyond_three = 0;
    for ((s, pr), &c) in exact.iter().zip(counts) {
        let p = to_f64(pr);
        let freq = if n == 0 { 0.0 } else { c as f64 / n as f64 };
        let var = p * (1.0 - p);
        let z = if var > 0.0 {
            (freq - p) * (n as f64).sqrt() / var.sqrt()
        } else if freq == p {
            0.0
        } else {
            f64::INFINITY
        };
        max_abs_z = max_abs_z.max(z.abs());
        if z.abs() > 3.0 {
            beyond_three += 1;
        }
        cells.push((s.clone(), freq, p, z));
    }
    CompareReport {
        count: n,
        cells,
        max_abs_z,
        beyond_three,
    }
}

/// Compares the top layers of a batch with an exact law of `tau` given over
/// all configurations in index order.
pub fn empirical_compare(
    batch: &SampleBatch,
    exact: &Distribution<Occupation>,
) -> Result<CompareReport<Occupation>> {
    let l = exact.support().first().map_or(0, Occupation::len);
    let indexed = exact.len() == 1 << l
        && exact
            .support()
            .iter()
            .enumerate()
            .all(|(i, s)| s.len() == l && s.index() == i);
    if !indexed {
        return Err(Error::StateSpaceMismatch(
            "exact law is not a full configuration table".into(),
        ));
    }
    let mut counts = vec![0usize; 1 << l];
    for t in batch.tops() {
        if t.len() != l {
            return Err(Error::StateSpaceMismatch(format!(
                "sample of length {} against table of length {l}",
                t.len()
            )));
        }
        counts[t.index()] += 1;
    }
    Ok(report_from_counts(exact, &counts))
}
