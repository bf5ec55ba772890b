use thiserror::Error;

/// Errors produced by the exact ASEP toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error(
        "{what}: requested L = {requested} exceeds the cap {cap} (set ASEP_MAX_L to override)"
    )]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("singular parameter: (AB;q)_{length} vanishes at AB = {ab}, q = {q}")]
    SingularParameter {
        ab: String,
        q: String,
        length: usize,
    },

    #[error("pair is not in the Motzkin configuration space: {0}")]
    NotInConfigurationSpace(String),

    #[error("singular system: nullspace dimension is {nullity}, expected 1 (dimension {dim})")]
    SingularSystem { dim: usize, nullity: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state-space mismatch: {0}")]
    StateSpaceMismatch(String),

    #[error("cannot parse {input:?} as a rational")]
    Parse { input: String },
}

pub type Result<T> = std::result::Result<T, Error>;
