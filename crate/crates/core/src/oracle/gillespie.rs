//! Exponential-clock simulation of the open ASEP. This is the only
//! floating-point code path in the crate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Rates;
use crate::error::{Error, Result};
use crate::rational::to_f64;

/// Largest system the simulator accepts.
pub const MAX_SIMULATED_SITES: usize = 30;
/// Per-configuration frequencies are kept up to this many sites.
pub const MAX_TABULATED_SITES: usize = 16;

/// Time-averaged occupation statistics over the measured window.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationEstimate {
    pub sites: usize,
    pub seed: u64,
    /// Length of the measured window.
    pub measured_time: f64,
    pub events: u64,
    /// Fraction of time spent in each configuration (index order), when
    /// `sites <= MAX_TABULATED_SITES`.
    pub frequencies: Option<Vec<f64>>,
    /// Fraction of time each site was occupied.
    pub densities: Vec<f64>,
}

impl SimulationEstimate {
    /// A zero-length window carries no information.
    pub fn is_insufficient(&self) -> bool {
        self.measured_time <= 0.0
    }
}

struct FloatRates {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    q: f64,
}

fn event_list(len: usize, s: u64, r: &FloatRates, out: &mut Vec<(u64, f64)>) {
    out.clear();
    for i in 0..len.saturating_sub(1) {
        match ((s >> i) & 1, (s >> (i + 1)) & 1) {
            (1, 0) => out.push((s ^ (0b11 << i), 1.0)),
            (0, 1) if r.q > 0.0 => out.push((s ^ (0b11 << i), r.q)),
            _ => {}
        }
    }
    if len > 0 {
        let first = if s & 1 == 0 { r.alpha } else { r.gamma };
        if first > 0.0 {
            out.push((s ^ 1, first));
        }
        let bit = 1u64 << (len - 1);
        let last = if s & bit == 0 { r.delta } else { r.beta };
        if last > 0.0 {
            out.push((s ^ bit, last));
        }
    }
}

/// Simulates from the empty configuration, discards `[0, burn_in)` and
/// averages over `[burn_in, burn_in + horizon]`.
pub fn gillespie_simulate(
    l: usize,
    rates: &Rates,
    horizon: f64,
    burn_in: f64,
    seed: u64,
) -> Result<SimulationEstimate> {
    run(
        l,
        rates,
        horizon,
        burn_in,
        ChaCha8Rng::seed_from_u64(seed),
        seed,
    )
}

/// Averages `replicas` independent runs on substreams of `seed`, weighting
/// each run equally.
pub fn gillespie_replicas(
    l: usize,
    rates: &Rates,
    horizon: f64,
    burn_in: f64,
    seed: u64,
    replicas: usize,
) -> Result<SimulationEstimate> {
    if replicas == 0 {
        return Err(Error::InvalidParameter(
            "replica count must be positive".into(),
        ));
    }
    let runs: Vec<SimulationEstimate> = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            run(l, rates, horizon, burn_in, rng, seed)
        })
        .collect::<Result<_>>()?;
    let n = replicas as f64;
    let mut acc = runs[0].clone();
    acc.densities.iter_mut().for_each(|d| *d /= n);
    if let Some(f) = acc.frequencies.as_mut() {
        f.iter_mut().for_each(|v| *v /= n);
    }
    for r in &runs[1..] {
        acc.events += r.events;
        acc.measured_time += r.measured_time;
        for (a, b) in acc.densities.iter_mut().zip(&r.densities) {
            *a += b / n;
        }
        if let (Some(fa), Some(fb)) = (acc.frequencies.as_mut(), r.frequencies.as_ref()) {
            for (a, b) in fa.iter_mut().zip(fb) {
                *a += b / n;
            }
        }
    }
    Ok(acc)
}

fn run(
    l: usize,
    rates: &Rates,
    horizon: f64,
    burn_in: f64,
    mut rng: ChaCha8Rng,
    seed: u64,
) -> Result<SimulationEstimate> {
    if l > MAX_SIMULATED_SITES {
        return Err(Error::CapExceeded {
            what: "simulated sites",
            requested: l,
            cap: MAX_SIMULATED_SITES,
        });
    }
    if !(horizon.is_finite() && burn_in.is_finite()) || horizon < 0.0 || burn_in < 0.0 {
        return Err(Error::InvalidParameter(
            "horizon and burn-in must be finite and nonnegative".into(),
        ));
    }
    let r = FloatRates {
        alpha: to_f64(&rates.alpha),
        beta: to_f64(&rates.beta),
        gamma: to_f64(&rates.gamma),
        delta: to_f64(&rates.delta),
        q: to_f64(&rates.q),
    };
    let tabulate = l <= MAX_TABULATED_SITES;
    let mut freq = if tabulate {
        vec![0.0; 1 << l]
    } else {
        Vec::new()
    };
    let mut dens = vec![0.0; l];
    let end = burn_in + horizon;
    let mut state = 0u64;
    let mut t = 0.0;
    let mut events = 0u64;
    let mut moves = Vec::with_capacity(l + 1);
    while t < end {
        event_list(l, state, &r, &mut moves);
        let total: f64 = moves.iter().map(|(_, w)| w).sum();
        let dt = if total > 0.0 {
            -(1.0 - rng.random::<f64>()).ln() / total
        } else {
            f64::INFINITY
        };
        let next_t = t + dt;
        let overlap = next_t.min(end) - t.max(burn_in);
        if overlap > 0.0 {
            if tabulate {
                freq[state as usize] += overlap;
            }
            for (i, d) in dens.iter_mut().enumerate() {
                if (state >> i) & 1 == 1 {
                    *d += overlap;
                }
            }
        }
        if next_t >= end {
            break;
        }
        let mut u = rng.random::<f64>() * total;
        let mut target = moves[moves.len() - 1].0;
        for &(to, w) in &moves {
            if u < w {
                target = to;
                break;
            }
            u -= w;
        }
        state = target;
        t = next_t;
        events += 1;
    }
    if horizon > 0.0 {
        freq.iter_mut().for_each(|v| *v /= horizon);
        dens.iter_mut().for_each(|v| *v /= horizon);
    } else {
        freq.clear();
        dens.clear();
    }
    Ok(SimulationEstimate {
        sites: l,
        seed,
        measured_time: horizon,
        events,
        frequencies: tabulate.then_some(freq),
        densities: dens,
    })
}
