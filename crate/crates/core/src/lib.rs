//! Bayesian binary regression with links built from scale mixtures of
//! centered skew-normal (SMCSN) distributions.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`] holds special functions, quadrature, truncated-normal
//!   sampling and posterior summaries.
//! * [`smcsn`] implements the centered skew-normal family and its scale
//!   mixtures (skew-t, skew-slash, skew contaminated normal).
//! * [`model`] defines datasets, the latent-variable augmentation, the
//!   complete likelihood and the priors.
//! * [`sampler`] is the Metropolis-within-Gibbs sampler over the augmented
//!   posterior.
//! * [`diagnostics`] covers latent residuals, normal envelopes, the
//!   skewness-sign selection scheme and posterior summaries.
//! * [`simharness`] runs replica studies (recovery, sign choice, prior
//!   comparison).
//! * [`cli`] wires everything into the `smcsn` binary.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod numerics;
pub mod par;
pub mod sampler;
pub mod simharness;
pub mod smcsn;
pub mod streams;

pub use error::{Error, Result};
