//! Occupations, random-walk paths and compositions.
//!
//! An [`Occupation`] packs sites `1..=L` into a machine word with bit 0 for
//! site 1, so enumeration order is the integer order of that word. A
//! [`LatticePath`] caches the statistics that every weight formula reads:
//! minimum, maximum, end point and number of level steps.

use std::fmt;
use std::str::FromStr;

use crate::caps::{self, CapKind};
use crate::error::{Error, Result};

/// Configuration `tau in {0,1}^L`, `L <= 64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation {
    len: u8,
    bits: u64,
}

impl Occupation {
    pub const EMPTY: Occupation = Occupation { len: 0, bits: 0 };

    /// Builds from a packed word; bits at positions `>= len` are dropped.
    pub fn from_bits(len: usize, bits: u64) -> Self {
        assert!(len <= 64, "occupations hold at most 64 sites");
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Self {
            len: len as u8,
            bits: bits & mask,
        }
    }

    pub fn from_sites(sites: &[u8]) -> Self {
        assert!(sites.iter().all(|&s| s <= 1), "sites must be 0 or 1");
        let bits = sites
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &s)| acc | (u64::from(s) << i));
        Self::from_bits(sites.len(), bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_bits(len, 0)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Index of this configuration in enumeration order.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    /// Occupation of site `i + 1` (zero-based `i`).
    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.bits >> i) & 1) as u8
    }

    pub fn sites(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn with_site(&self, i: usize, value: u8) -> Self {
        let bits = if value == 1 {
            self.bits | (1 << i)
        } else {
            self.bits & !(1 << i)
        };
        Self {
            len: self.len,
            bits,
        }
    }

    /// `(s, self)`.
    pub fn prepend(&self, s: u8) -> Self {
        Self::from_bits(self.len() + 1, (self.bits << 1) | u64::from(s))
    }

    /// `(self, s)`.
    pub fn append(&self, s: u8) -> Self {
        Self::from_bits(self.len() + 1, self.bits | (u64::from(s) << self.len))
    }

    /// `(self, other)`.
    pub fn concat(&self, other: &Self) -> Self {
        Self::from_bits(
            self.len() + other.len(),
            self.bits | (other.bits << self.len),
        )
    }

    /// Drops site `i + 1`.
    pub fn remove(&self, i: usize) -> Self {
        let low = self.bits & ((1u64 << i) - 1);
        let high = (self.bits >> (i + 1)) << i;
        Self::from_bits(self.len() - 1, low | high)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.sites() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Occupation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > 64 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidParameter(format!(
                "not an occupation string: {s:?}"
            )));
        }
        let sites: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
        Ok(Self::from_sites(&sites))
    }
}

/// All `2^L` configurations in packed-word order.
pub fn enumerate_occupations(len: usize) -> Result<impl Iterator<Item = Occupation> + Clone> {
    caps::check(CapKind::Occupations, len)?;
    Ok((0..1u64 << len).map(move |w| Occupation::from_bits(len, w)))
}

/// Path `(gamma_0, ..., gamma_L)` with `gamma_0 = 0` and steps in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePath {
    values: Vec<i32>,
    min: i32,
    max: i32,
    horizontal: u32,
}

impl LatticePath {
    pub fn from_values(values: Vec<i32>) -> Result<Self> {
        if values.first() != Some(&0) {
            return Err(Error::InvalidParameter("paths start at 0".into()));
        }
        if values.windows(2).any(|w| (w[1] - w[0]).abs() > 1) {
            return Err(Error::InvalidParameter(format!(
                "not a lattice path: {values:?}"
            )));
        }
        Ok(Self::from_values_unchecked(values))
    }

    fn from_values_unchecked(values: Vec<i32>) -> Self {
        let min = *values.iter().min().unwrap();
        let max = *values.iter().max().unwrap();
        let horizontal = values.windows(2).filter(|w| w[0] == w[1]).count() as u32;
        Self {
            values,
            min,
            max,
            horizontal,
        }
    }

    /// Path from its increments.
    pub fn from_steps(steps: &[i8]) -> Result<Self> {
        if steps.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Error::InvalidParameter(format!(
                "steps must be -1, 0 or 1: {steps:?}"
            )));
        }
        let mut values = Vec::with_capacity(steps.len() + 1);
        values.push(0);
        let mut h = 0i32;
        for &s in steps {
            h += i32::from(s);
            values.push(h);
        }
        Ok(Self::from_values_unchecked(values))
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    /// Number of steps `L`.
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn min(&self) -> i32 {
        self.min
    }

    pub fn max(&self) -> i32 {
        self.max
    }

    pub fn end(&self) -> i32 {
        *self.values.last().unwrap()
    }

    /// Number of level steps `H`.
    pub fn horizontal(&self) -> u32 {
        self.horizontal
    }

    /// Increment `gamma_j - gamma_(j-1)` for `j = i + 1`.
    pub fn step(&self, i: usize) -> i32 {
        self.values[i + 1] - self.values[i]
    }

    pub fn steps(&self) -> impl Iterator<Item = i32> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// Top layer forced by the path (up-steps) and the mask of level steps,
    /// where the top layer is free.
    pub fn forced_top_and_level_mask(&self) -> (u64, u64) {
        let mut up = 0u64;
        let mut level = 0u64;
        for (i, s) in self.steps().enumerate() {
            match s {
                1 => up |= 1 << i,
                0 => level |= 1 << i,
                _ => {}
            }
        }
        (up, level)
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(i32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All `3^L` paths, ordered by the base-3 index whose least significant
/// digit is the first step (digit `d` means increment `d - 1`).
pub fn enumerate_paths(len: usize) -> Result<impl Iterator<Item = LatticePath> + Clone> {
    caps::check(CapKind::Paths, len)?;
    let count = 3u64.pow(len as u32);
    Ok((0..count).map(move |k| path_from_index(len, k)))
}

/// Path number `k` of [`enumerate_paths`].
pub fn path_from_index(len: usize, mut k: u64) -> LatticePath {
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        steps.push((k % 3) as i8 - 1);
        k /= 3;
    }
    LatticePath::from_steps(&steps).expect("digits map to valid steps")
}

/// Ordered positive parts `sigma_0, ..., sigma_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "compositions have at least one part and all parts positive: {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `sigma_0 + ... + sigma_r = L + 1`.
    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// The system size `L`.
    pub fn system_size(&self) -> u32 {
        self.total() - 1
    }

    /// `r`, one less than the number of parts.
    pub fn r(&self) -> u32 {
        self.parts.len() as u32 - 1
    }

    /// `(1, 1, ..., 1)` with `L + 1` ones.
    pub fn all_ones(l: u32) -> Self {
        Self {
            parts: vec![1; l as usize + 1],
        }
    }

    /// The single-part composition `(L + 1)`.
    pub fn single(l: u32) -> Self {
        Self { parts: vec![l + 1] }
    }

    /// All `2^(n-1)` compositions of `n >= 1`.
    pub fn all_of(n: u32) -> Vec<Self> {
        assert!(n >= 1);
        (0..1u64 << (n - 1))
            .map(|cuts| {
                let mut parts = Vec::new();
                let mut run = 1;
                for i in 0..n - 1 {
                    if cuts >> i & 1 == 1 {
                        parts.push(run);
                        run = 1;
                    } else {
                        run += 1;
                    }
                }
                parts.push(run);
                Self { parts }
            })
            .collect()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `gamma_k = sum_{j <= k} (tau_j - xi_j)`.
pub fn path_of(tau: &Occupation, xi: &Occupation) -> Result<LatticePath> {
    if tau.len() != xi.len() {
        return Err(Error::LengthMismatch {
            left: tau.len(),
            right: xi.len(),
        });
    }
    let steps: Vec<i8> = tau
        .sites()
        .zip(xi.sites())
        .map(|(t, x)| t as i8 - x as i8)
        .collect();
    LatticePath::from_steps(&steps)
}

/// `sigma_i = #{ j : gamma_j = min + i }`.
pub fn composition_of(gamma: &LatticePath) -> Composition {
    let mut parts = vec![0u32; (gamma.max() - gamma.min()) as usize + 1];
    for &v in gamma.values() {
        parts[(v - gamma.min()) as usize] += 1;
    }
    Composition { parts }
}

pub fn is_motzkin(gamma: &LatticePath) -> bool {
    gamma.min() >= 0 && gamma.end() == 0
}

/// Top layer read off a path: 1 on up-steps, 0 on down-steps, `eta` on
/// level steps.
pub fn tau_from_path(gamma: &LatticePath, eta: &Occupation) -> Result<Occupation> {
    if gamma.len() != eta.len() {
        return Err(Error::LengthMismatch {
            left: gamma.len(),
            right: eta.len(),
        });
    }
    let (up, level) = gamma.forced_top_and_level_mask();
    Ok(Occupation::from_bits(
        gamma.len(),
        up | (eta.bits() & level),
    ))
}

/// Bottom layer recovered from `xi_j = tau_j - (gamma_j - gamma_(j-1))`.
pub fn xi_from_path(tau: &Occupation, gamma: &LatticePath) -> Result<Occupation> {
    if gamma.len() != tau.len() {
        return Err(Error::LengthMismatch {
            left: tau.len(),
            right: gamma.len(),
        });
    }
    let mut sites = Vec::with_capacity(tau.len());
    for (t, s) in tau.sites().zip(gamma.steps()) {
        let x = i32::from(t) - s;
        if !(0..=1).contains(&x) {
            return Err(Error::InvalidParameter(format!(
                "top layer {tau} is incompatible with path {gamma}"
            )));
        }
        sites.push(x as u8);
    }
    Ok(Occupation::from_sites(&sites))
}
