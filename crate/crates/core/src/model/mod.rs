//! The binary regression model: datasets, link evaluation, latent
//! augmentation, likelihoods, priors and synthetic data.

mod data;
mod ingest;
pub(crate) mod likelihood;
mod link;
mod prior;
mod simulate;

pub use data::{BinaryDataset, Covariate, CovariateKind, DataError, DataWarning, INTERCEPT};
pub use ingest::{read_dataset, read_dataset_path, write_dataset, CategoricalEncoding, IngestOptions};
pub use likelihood::{
    complete_log_likelihood, cscn_marginal_log_likelihood, observation_log_likelihood, LatentState,
};
pub use link::{success_prob, LinkSpec, ModelParams, ModelSpec, SignRegion};
pub use prior::{
    ln_alpha_prior, ln_beta_prior, ln_delta_prior, ln_g_prior, ln_shape_prior, log_prior,
    sample_g_prior, AlphaPrior, BetaPrior, PriorSpec, SHAPE_PRIOR_RATE, SIGMA_B,
};
pub use simulate::{simulate_dataset, SimulatedData};
