//! Enumeration caps. Every cap can be raised (or lowered) at once with the
//! `ASEP_MAX_L` environment variable.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MAX_L_ENV: &str = "ASEP_MAX_L";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapKind {
    /// `2^L` single-layer configurations.
    Occupations,
    /// `4^L` two-layer pairs.
    Pairs,
    /// `3^L` random-walk paths.
    Paths,
    /// `2^L`-state generator matrices.
    Generator,
}

impl CapKind {
    pub fn default_cap(self) -> usize {
        match self {
            CapKind::Occupations => 20,
            CapKind::Pairs => 10,
            CapKind::Paths => 12,
            CapKind::Generator => 12,
        }
    }

    fn label(self) -> &'static str {
        match self {
            CapKind::Occupations => "occupation enumeration",
            CapKind::Pairs => "pair enumeration",
            CapKind::Paths => "path enumeration",
            CapKind::Generator => "generator construction",
        }
    }
}

fn env_override() -> Option<usize> {
    static OVERRIDE: OnceLock<Option<usize>> = OnceLock::new();
    *OVERRIDE.get_or_init(|| {
        std::env::var(MAX_L_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
    })
}

/// Effective cap; packed occupations never exceed 64 sites.
pub fn cap(kind: CapKind) -> usize {
    env_override().unwrap_or_else(|| kind.default_cap()).min(64)
}

pub fn check(kind: CapKind, l: usize) -> Result<()> {
    let cap = cap(kind);
    if l > cap {
        Err(Error::CapExceeded {
            what: kind.label(),
            requested: l,
            cap,
        })
    } else {
        Ok(())
    }
}
