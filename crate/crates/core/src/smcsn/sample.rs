use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::mixing::MixingFamily;
use super::params::{latent_terms, CenteredParams, B};

/// Exact draw from SMCSN(μ, σ², δ, G(·|ν)):
/// `μ + σU^{-1/2}[Δ(H − b) + √τ T]` with H half-normal and T standard normal.
pub fn smcsn_sample<R: Rng + ?Sized>(p: &CenteredParams, fam: &MixingFamily, rng: &mut R) -> f64 {
    let u = fam.sample_mixing(rng);
    let h: f64 = StandardNormal.sample(rng);
    let t: f64 = StandardNormal.sample(rng);
    let (loading, tau) = latent_terms(p.delta());
    p.mu() + p.sigma() / u.sqrt() * (loading * (h.abs() - B) + tau.sqrt() * t)
}
