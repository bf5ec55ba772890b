//! Exact stationary measures of the open asymmetric simple exclusion process
//! under Liggett's condition, computed as the top-layer marginal of a
//! two-layer ensemble, together with an independent Markov-chain oracle and
//! samplers.
//!
//! Every quantity is an exact [`Rational`]; only the Gillespie simulator in
//! [`oracle`] and the z-score report in [`sampler`] use floating point.

pub mod caps;
pub mod ensemble;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod qcalc;
pub mod rational;
pub mod recursions;
pub mod sampler;
pub mod weights;

pub use ensemble::{stationary_mu, Distribution};
pub use error::{Error, Result};
pub use lattice::{
    composition_of, is_motzkin, path_of, tau_from_path, Composition, LatticePath, Occupation,
};
pub use oracle::{build_generator, rates_from_params, stationary_exact, GeneratorMatrix, Rates};
pub use rational::{format_rational, parse_rational, Rational};
pub use sampler::{empirical_compare, sample_two_layer, SampleBatch};
pub use weights::{
    partition_z, q_weight, tilde_q_weight, w_sigma_operator, w_sigma_series, ModelParams,
    WeightTable,
};
