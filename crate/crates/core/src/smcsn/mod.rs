//! Centered skew-normal distributions and their scale mixtures.

mod cdf;
mod mixing;
mod nodes;
mod params;
mod sample;

pub use cdf::{csn_cdf, csn_pdf, smcsn_cdf, smcsn_pdf, UnitCsn, MIXING_TOL};
pub use nodes::MixingNodes;
pub use mixing::{FamilyKind, MixingFamily, CSS_NU_MIN, CST_NU_MIN, NU_MAX};
pub use params::{cp_to_dp, latent_terms, pearson_gamma, CenteredParams, DirectDerived, B, S};
pub use sample::smcsn_sample;
