//! Exhaustive exact checks of the boundary and bulk equations for `Q~` and
//! of the basic weight equations for `Phi`.

use std::fmt;

use num_traits::{One, Zero};

use crate::ensemble::{phi_table, PhiTable};
use crate::error::Result;
use crate::lattice::{enumerate_occupations, Occupation};
use crate::rational::{format_rational, pow, Rational};
use crate::weights::{ModelParams, WeightTable};

const MAX_RECORDED_FAILURES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub inputs: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// Outcome of one identity over an enumerated instance set. Only the first
/// ten failures are kept; `failure_count` counts all of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub identity: String,
    pub sizes: String,
    pub q: Rational,
    pub a: Rational,
    pub b: Rational,
    pub instances: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    fn new(identity: &str, sizes: String, p: &ModelParams) -> Self {
        Self {
            identity: identity.to_string(),
            sizes,
            q: p.q().clone(),
            a: p.a().clone(),
            b: p.b().clone(),
            instances: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, lhs: Rational, rhs: Rational, inputs: impl FnOnce() -> String) {
        self.instances += 1;
        if lhs != rhs {
            self.failure_count += 1;
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(Failure {
                    inputs: inputs(),
                    lhs,
                    rhs,
                });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// Folds `other` into `self`; sizes are joined in call order.
    pub fn merge(mut self, other: VerificationReport) -> Self {
        if self.instances == 0 && self.sizes.is_empty() {
            return other;
        }
        self.sizes = format!("{}; {}", self.sizes, other.sizes);
        self.instances += other.instances;
        self.failure_count += other.failure_count;
        let room = MAX_RECORDED_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] q={} A={} B={}: {} instances, {} failures",
            self.identity,
            self.sizes,
            format_rational(&self.q),
            format_rational(&self.a),
            format_rational(&self.b),
            self.instances,
            self.failure_count
        )
    }
}

/// `Q~` with the rescaling factor cached per system size.
struct TildeWeights {
    table: WeightTable,
    factors: Vec<Rational>,
}

impl TildeWeights {
    fn new(p: &ModelParams, max_len: usize) -> Result<Self> {
        let factors = (0..=max_len)
            .map(|l| p.tilde_factor(l))
            .collect::<Result<_>>()?;
        Ok(Self {
            table: WeightTable::new(p),
            factors,
        })
    }

    fn get(&self, tau: &Occupation, xi: &Occupation) -> Rational {
        let q = self
            .table
            .q_weight(tau, xi)
            .expect("layers have equal length");
        q * &self.factors[tau.len()]
    }
}

fn pairs(l: usize) -> Result<impl Iterator<Item = (Occupation, Occupation)>> {
    let outer = enumerate_occupations(l)?;
    let inner = enumerate_occupations(l)?;
    Ok(outer.flat_map(move |t| inner.clone().map(move |x| (t, x))))
}

/// `Q~(0 tau | x' xi) - qA Q~(1 tau | x' xi) = A^x' Q~(tau | xi)` over all
/// `x'` and `(tau, xi)` in `Omega_L^2`.
pub fn check_left_boundary(l: usize, p: &ModelParams) -> Result<VerificationReport> {
    let w = TildeWeights::new(p, l + 1)?;
    let qa = p.q() * p.a();
    let mut report = VerificationReport::new("left", format!("L={l}"), p);
    for (tau, xi) in pairs(l)? {
        let base = w.get(&tau, &xi);
        for x in 0..=1u8 {
            let big_xi = xi.prepend(x);
            let lhs = w.get(&tau.prepend(0), &big_xi) - &qa * w.get(&tau.prepend(1), &big_xi);
            let rhs = pow(p.a(), x.into()) * &base;
            report.record(lhs, rhs, || format!("tau={tau} xi={xi} xi'={x}"));
        }
    }
    Ok(report)
}

/// `Q~(tau 1 | xi x') - qB Q~(tau 0 | xi x') = B^(1-x') Q~(tau | xi)`.
pub fn check_right_boundary(l: usize, p: &ModelParams) -> Result<VerificationReport> {
    let w = TildeWeights::new(p, l + 1)?;
    let qb = p.q() * p.b();
    let mut report = VerificationReport::new("right", format!("L={l}"), p);
    for (tau, xi) in pairs(l)? {
        let base = w.get(&tau, &xi);
        for x in 0..=1u8 {
            let big_xi = xi.append(x);
            let lhs = w.get(&tau.append(1), &big_xi) - &qb * w.get(&tau.append(0), &big_xi);
            let rhs = pow(p.b(), (1 - x).into()) * &base;
            report.record(lhs, rhs, || format!("tau={tau} xi={xi} xi'={x}"));
        }
    }
    Ok(report)
}

/// `Q~(t1 1 0 t2 | x1 x' x'' x2) - q Q~(t1 0 1 t2 | x1 x' x'' x2)
///  = Q~(t1 (1-x'') t2 | x1 x' x2)`.
pub fn check_bulk(l1: usize, l2: usize, p: &ModelParams) -> Result<VerificationReport> {
    let w = TildeWeights::new(p, l1 + l2 + 2)?;
    let q = p.q();
    let mut report = VerificationReport::new("bulk", format!("L1={l1},L2={l2}"), p);
    let left: Vec<_> = pairs(l1)?.collect();
    let right: Vec<_> = pairs(l2)?.collect();
    for (t1, x1) in &left {
        for (t2, x2) in &right {
            for x in 0..=1u8 {
                for xx in 0..=1u8 {
                    let bottom = x1.append(x).append(xx).concat(x2);
                    let hop = t1.append(1).append(0).concat(t2);
                    let back = t1.append(0).append(1).concat(t2);
                    let lhs = w.get(&hop, &bottom) - q * w.get(&back, &bottom);
                    let rhs = w.get(&t1.append(1 - xx).concat(t2), &x1.append(x).concat(x2));
                    report.record(lhs, rhs, || {
                        format!("tau1={t1} tau2={t2} xi1={x1} xi2={x2} xi'={x} xi''={xx}")
                    });
                }
            }
        }
    }
    Ok(report)
}

/// The four basic weight equations for `Phi` on every size up to `L`.
pub fn check_basic_weight_equations(l: usize, p: &ModelParams) -> Result<VerificationReport> {
    let tables: Vec<PhiTable> = (0..=l).map(|k| phi_table(k, p)).collect::<Result<_>>()?;
    let phi = |t: &Occupation| tables[t.len()].get(t).clone();
    let one = Rational::one();
    let (q, a, b) = (p.q(), p.a(), p.b());
    let mut report = VerificationReport::new("basic", format!("L<={l}"), p);

    report.record(phi(&Occupation::EMPTY), one.clone(), || "Phi(empty)".into());
    for k in 1..=l {
        for tau in enumerate_occupations(k - 1)? {
            let lhs = phi(&tau.prepend(0)) - q * a * phi(&tau.prepend(1));
            report.record(lhs, (&one + a) * phi(&tau), || format!("left tau={tau}"));
            let lhs = phi(&tau.append(1)) - q * b * phi(&tau.append(0));
            report.record(lhs, (&one + b) * phi(&tau), || format!("right tau={tau}"));
        }
        if k < 2 {
            continue;
        }
        for split in 0..=k - 2 {
            for t1 in enumerate_occupations(split)? {
                for t2 in enumerate_occupations(k - 2 - split)? {
                    let lhs = phi(&t1.append(1).append(0).concat(&t2))
                        - q * phi(&t1.append(0).append(1).concat(&t2));
                    let rhs = phi(&t1.append(0).concat(&t2)) + phi(&t1.append(1).concat(&t2));
                    report.record(lhs, rhs, || format!("bulk tau1={t1} tau2={t2}"));
                }
            }
        }
    }
    Ok(report)
}

/// Left and right boundaries for every size up to `L`, and the bulk for
/// every split with `L1 + L2 <= L`.
pub fn check_theorem_identities(l: usize, p: &ModelParams) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("left+right+bulk", String::new(), p);
    for k in 0..=l {
        report = report.merge(check_left_boundary(k, p)?);
        report = report.merge(check_right_boundary(k, p)?);
        for l1 in 0..=k {
            report = report.merge(check_bulk(l1, k - l1, p)?);
        }
    }
    report.identity = "left+right+bulk".into();
    Ok(report)
}

/// Whether all `Q~` values of size `L` share one sign.
pub fn tilde_weights_share_sign(l: usize, p: &ModelParams) -> Result<bool> {
    let w = TildeWeights::new(p, l)?;
    let mut pos = false;
    let mut neg = false;
    for (tau, xi) in pairs(l)? {
        let v = w.get(&tau, &xi);
        pos |= v > Rational::zero();
        neg |= v < Rational::zero();
    }
    Ok(!(pos && neg))
}
