//! Special functions, quadrature, sampling primitives and draw summaries.

mod ars;
mod normal;
mod owens_t;
mod quadrature;
mod summary;
mod truncnorm;

pub use normal::{
    ln_normal_pdf, ln_std_normal_cdf, ln_std_normal_pdf, std_normal_cdf, std_normal_pdf, std_normal_quantile,
    std_normal_sf,
};
pub use ars::sample_log_concave;
pub use owens_t::owens_t;
pub use quadrature::{integrate, Domain, Integral, QuadratureRule};
pub use summary::{
    equal_tailed_interval, hpd_interval, mean, median, posterior_mode, quantile, sample_skewness,
    std_dev, Hpd, MIN_HPD_DRAWS,
};
pub use truncnorm::{sample_truncated_normal, sample_truncated_standard};
