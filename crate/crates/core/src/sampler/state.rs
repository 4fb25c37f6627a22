use serde::Serialize;

use crate::model::{BinaryDataset, LatentState, ModelParams};

/// Current position of a chain: θ, the latents and the cached linear
/// predictor Xβ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainState {
    pub theta: ModelParams,
    pub latent: LatentState,
    eta: Vec<f64>,
}

impl ChainState {
    pub fn new(theta: ModelParams, latent: LatentState, data: &BinaryDataset) -> Self {
        let eta = data.linear_predictor(&theta.beta);
        ChainState { theta, latent, eta }
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn set_beta(&mut self, beta: Vec<f64>, data: &BinaryDataset) {
        self.eta = data.linear_predictor(&beta);
        self.theta.beta = beta;
    }

    pub(crate) fn set_beta_with_eta(&mut self, beta: Vec<f64>, eta: Vec<f64>) {
        self.theta.beta = beta;
        self.eta = eta;
    }

    pub fn is_finite(&self) -> bool {
        let t = &self.theta;
        t.beta.iter().all(|v| v.is_finite())
            && t.delta.is_finite()
            && t.g.is_finite()
            && t.alpha.is_finite()
            && t.family.shape().iter().all(|v| v.is_finite())
            && [&self.latent.z, &self.latent.h, &self.latent.u]
                .iter()
                .all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// JSON rendering of the whole state, for failure reports.
    pub fn dump(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_else(|e| format!("unserializable state: {e}"))
    }
}
