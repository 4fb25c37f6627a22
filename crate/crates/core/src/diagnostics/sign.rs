use serde::{Deserialize, Serialize};

use crate::model::{BetaPrior, BinaryDataset, DataWarning, LinkSpec, ModelSpec, PriorSpec, SignRegion};
use crate::numerics::{mean, median, posterior_mode, sample_skewness};
use crate::sampler::{run_chain_with_rng, ChainConfig};
use crate::streams::{derive, Purpose};
use crate::{Error, Result};

/// Point summary of a posterior sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Mean,
    Median,
    Mode,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::Mean, Statistic::Median, Statistic::Mode];

    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Median => "median",
            Statistic::Mode => "mode",
        }
    }

    pub fn apply(&self, draws: &[f64]) -> Result<f64> {
        if draws.is_empty() {
            return Err(Error::domain("statistic of an empty sample"));
        }
        match self {
            Statistic::Mean => Ok(mean(draws)),
            Statistic::Median => Ok(median(draws)),
            Statistic::Mode => posterior_mode(draws),
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Statistic::Mean),
            "median" => Ok(Statistic::Median),
            "mode" => Ok(Statistic::Mode),
            other => Err(Error::Config(format!("unknown statistic `{other}` (mean, median, mode)"))),
        }
    }
}

/// Outcome of the skewness-sign scheme.
#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    /// Selected sign of δ.
    pub sign: i32,
    pub statistic: Statistic,
    /// The statistic applied to the skewness draws.
    pub value: f64,
    /// Sample skewness of the probit latent residuals, one per retained draw.
    pub skewness: Vec<f64>,
    pub warnings: Vec<DataWarning>,
}

impl SignReport {
    pub fn region(&self) -> SignRegion {
        SignRegion::from_sign(self.sign)
    }

    /// The selection each statistic would make on the same skewness draws.
    pub fn sign_under(&self, statistic: Statistic) -> Result<i32> {
        Ok(sign_of_negated(statistic.apply(&self.skewness)?))
    }
}

/// −sign(value), with a zero statistic resolved to +1.
fn sign_of_negated(value: f64) -> i32 {
    if value > 0.0 {
        -1
    } else {
        1
    }
}

/// Coefficient prior of the probit pre-fit: weakly informative N(0, 1000).
pub const SIGN_FIT_PRIOR: PriorSpec = PriorSpec {
    beta: BetaPrior::Normal { variance: 1000.0 },
};

/// Choose the sign of δ from a probit pre-fit: every retained draw's latent
/// residual vector z − Xβ has a sample skewness; the negated sign of the
/// chosen statistic of those skewnesses is returned.
///
/// The probit chain runs on its own stream derived from `cfg.seed`, so the
/// selection does not consume the main fit's random numbers.
pub fn select_delta_sign(data: &BinaryDataset, cfg: &ChainConfig, statistic: Statistic) -> Result<SignReport> {
    select_delta_sign_indexed(data, cfg, statistic, 0)
}

/// As [`select_delta_sign`], with the pre-fit on stream `index` of the
/// sign-fit purpose (one per replica in simulation studies).
pub fn select_delta_sign_indexed(
    data: &BinaryDataset,
    cfg: &ChainConfig,
    statistic: Statistic,
    index: u64,
) -> Result<SignReport> {
    let mut cfg = *cfg;
    cfg.keep_latents = true;
    let spec = ModelSpec::new(LinkSpec::probit(), SIGN_FIT_PRIOR);
    let rng = derive(cfg.seed, Purpose::SignFit, index);
    let draws = run_chain_with_rng(data, &spec, &cfg, index, rng)?;
    let latents = draws.latents.as_ref().expect("latents retained");
    let skewness = draws
        .params
        .iter()
        .zip(latents)
        .map(|(theta, lat)| {
            let eta = data.linear_predictor(&theta.beta);
            let eps: Vec<f64> = lat.z.iter().zip(&eta).map(|(z, e)| z - e).collect();
            sample_skewness(&eps)
        })
        .collect::<Result<Vec<f64>>>()?;
    let value = statistic.apply(&skewness)?;
    Ok(SignReport {
        sign: sign_of_negated(value),
        statistic,
        value,
        skewness,
        warnings: data.warnings(),
    })
}
