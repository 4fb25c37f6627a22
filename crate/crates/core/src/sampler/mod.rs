//! Metropolis-within-Gibbs sampling of the augmented posterior.

mod adapt;
mod chain;
mod config;
mod draws;
mod state;
pub mod steps;

pub use adapt::AdaptiveScale;
pub use chain::{initial_state, run_chain, run_chain_indexed, run_chain_with_rng, run_chains};
pub use config::{ChainConfig, ProposalScales, SweepOptions};
pub use draws::{ChainMeta, PosteriorDraws};
pub use state::ChainState;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid chain configuration: {0}")]
    Config(String),
    #[error("non-finite value after the {block} block at iteration {iteration}")]
    NonFinite {
        block: &'static str,
        iteration: usize,
        /// JSON dump of the chain state at the failure.
        state: String,
    },
    #[error("numerical failure: {0}")]
    Numerics(String),
}
