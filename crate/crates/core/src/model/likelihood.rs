use serde::{Deserialize, Serialize};

use super::data::BinaryDataset;
use super::link::ModelParams;
use crate::numerics::{ln_normal_pdf, ln_std_normal_pdf};
use crate::smcsn::{latent_terms, MixingFamily, B};
use crate::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// Per-observation latent variables (Z, H, U) of the augmented model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentState {
    pub z: Vec<f64>,
    pub h: Vec<f64>,
    pub u: Vec<f64>,
}

impl LatentState {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Whether every observation satisfies I(zᵢ > 0) = yᵢ, hᵢ > 0, uᵢ > 0.
    pub fn is_consistent(&self, y: &[bool]) -> bool {
        self.z.len() == y.len()
            && self.h.len() == y.len()
            && self.u.len() == y.len()
            && (0..y.len()).all(|i| {
                (self.z[i] > 0.0) == y[i] && self.h[i] > 0.0 && self.u[i] > 0.0
            })
    }
}

/// Latent mean μᵢ = ηᵢ + Δ(b − hᵢ)/√uᵢ.
#[inline]
pub(crate) fn latent_mean(eta: f64, h: f64, u: f64, loading: f64) -> f64 {
    eta + loading * (B - h) / u.sqrt()
}

/// log of N(z; μ(u), τ/u) · 2φ(h) · h(u | ν) for a single observation, or −∞
/// when the sign of `z` contradicts `y`.
pub fn observation_log_likelihood(
    eta: f64,
    y: bool,
    z: f64,
    h: f64,
    u: f64,
    delta: f64,
    fam: &MixingFamily,
) -> f64 {
    if (z > 0.0) != y || !(h > 0.0) || !(u > 0.0) {
        return f64::NEG_INFINITY;
    }
    let (loading, tau) = latent_terms(delta);
    ln_normal_pdf(z, latent_mean(eta, h, u, loading), tau / u)
        + LN_2
        + ln_std_normal_pdf(h)
        + fam.ln_mixing_density(u)
}

/// Complete-data log likelihood of (Z, H, U) given θ, normalizing constants
/// included.
pub fn complete_log_likelihood(theta: &ModelParams, lat: &LatentState, data: &BinaryDataset) -> f64 {
    if lat.len() != data.n() || lat.h.len() != data.n() || lat.u.len() != data.n() {
        return f64::NEG_INFINITY;
    }
    let eta = data.linear_predictor(&theta.beta);
    let y = data.y();
    let mut total = 0.0;
    for i in 0..data.n() {
        total += observation_log_likelihood(
            eta[i],
            y[i],
            lat.z[i],
            lat.h[i],
            lat.u[i],
            theta.delta,
            &theta.family,
        );
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    total
}

/// Per-observation CSCN log likelihood with U summed out.
pub(crate) fn cscn_observation(
    eta: f64,
    y: bool,
    z: f64,
    h: f64,
    loading: f64,
    tau: f64,
    nu1: f64,
    nu2: f64,
) -> f64 {
    if (z > 0.0) != y || !(h > 0.0) {
        return f64::NEG_INFINITY;
    }
    let a = nu1.ln() + ln_normal_pdf(z, latent_mean(eta, h, nu2, loading), tau / nu2);
    let b = (-nu1).ln_1p() + ln_normal_pdf(z, latent_mean(eta, h, 1.0, loading), tau);
    log_sum_exp(a, b) + LN_2 + ln_std_normal_pdf(h)
}

/// Contaminated-normal likelihood of (Z, H) with each Uᵢ marginalized over
/// its two atoms. The `u` field of `lat` is ignored.
pub fn cscn_marginal_log_likelihood(
    theta: &ModelParams,
    lat: &LatentState,
    data: &BinaryDataset,
) -> Result<f64> {
    let MixingFamily::Cscn { nu1, nu2 } = theta.family else {
        return Err(Error::Config(
            "the marginal likelihood is defined for the contaminated-normal link only".into(),
        ));
    };
    if lat.z.len() != data.n() || lat.h.len() != data.n() {
        return Err(Error::Config("latent state does not match the dataset".into()));
    }
    let (loading, tau) = latent_terms(theta.delta);
    let eta = data.linear_predictor(&theta.beta);
    let y = data.y();
    Ok((0..data.n())
        .map(|i| cscn_observation(eta[i], y[i], lat.z[i], lat.h[i], loading, tau, nu1, nu2))
        .sum())
}

pub(crate) fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}
