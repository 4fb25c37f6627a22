//! Post-fit analysis: latent residuals, simulated normal envelopes, the
//! skewness-sign selection of δ, posterior summaries and link curves.

mod curve;
mod envelope;
mod residuals;
mod sign;
mod summary;

pub use curve::{draw_curve, eta_grid, link_curve, predict, LinkCurve, Predictions};
pub use envelope::{
    normal_envelope, residual_envelope, series_envelope, EnvelopeBand, DEFAULT_BAND_PROB, DEFAULT_REPLICATES, MIN_REPLICATES,
};
pub use residuals::{latent_residual, latent_residuals, ResidualDraws, ResidualSeries};
pub use sign::{select_delta_sign, select_delta_sign_indexed, SignReport, Statistic, SIGN_FIT_PRIOR};
pub use summary::{recommended_statistic, summarize, summarize_column, PosteriorSummary, SummaryRow};
