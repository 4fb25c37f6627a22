use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use super::link::{ModelParams, ModelSpec, SignRegion};
use crate::smcsn::{MixingFamily, CSS_NU_MIN, CST_NU_MIN, NU_MAX};
use crate::{Error, Result};

/// Diagonal of Σ_b in β | g ~ N(0, gΣ_b).
pub const SIGMA_B: f64 = 0.5;
/// Rate of the truncated exponential prior on the excess degrees of freedom.
pub const SHAPE_PRIOR_RATE: f64 = 0.1;

/// Prior on the hyper-g exponent α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaPrior {
    Fixed { value: f64 },
    Uniform { lower: f64, upper: f64 },
}

impl AlphaPrior {
    pub fn initial(&self) -> f64 {
        match *self {
            AlphaPrior::Fixed { value } => value,
            AlphaPrior::Uniform { lower, upper } => 0.5 * (lower + upper),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaPrior {
    /// β | g ~ N(0, g·sigma_b·I), π(g | α) ∝ (1 + g)^{−α/2}.
    HyperG { alpha: AlphaPrior, sigma_b: f64 },
    /// β ~ N(0, g·sigma_b·I) with g held fixed.
    FixedG { g: f64, sigma_b: f64 },
    /// β ~ N(0, variance·I).
    Normal { variance: f64 },
}

impl BetaPrior {
    pub fn hyper_g(alpha: f64) -> Self {
        BetaPrior::HyperG {
            alpha: AlphaPrior::Fixed { value: alpha },
            sigma_b: SIGMA_B,
        }
    }

    pub fn hyper_g_uniform(lower: f64, upper: f64) -> Self {
        BetaPrior::HyperG {
            alpha: AlphaPrior::Uniform { lower, upper },
            sigma_b: SIGMA_B,
        }
    }

    /// Prior variance of each coefficient at the given g.
    pub fn variance(&self, g: f64) -> f64 {
        match *self {
            BetaPrior::HyperG { sigma_b, .. } => g * sigma_b,
            BetaPrior::FixedG { g, sigma_b } => g * sigma_b,
            BetaPrior::Normal { variance } => variance,
        }
    }

    pub fn samples_g(&self) -> bool {
        matches!(self, BetaPrior::HyperG { .. })
    }

    pub fn samples_alpha(&self) -> bool {
        matches!(
            self,
            BetaPrior::HyperG {
                alpha: AlphaPrior::Uniform { .. },
                ..
            }
        )
    }

    pub fn initial_g(&self) -> f64 {
        match *self {
            BetaPrior::FixedG { g, .. } => g,
            _ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            BetaPrior::HyperG { alpha, sigma_b } => {
                sigma_b > 0.0
                    && match alpha {
                        AlphaPrior::Fixed { value } => value > 2.0 && value.is_finite(),
                        AlphaPrior::Uniform { lower, upper } => {
                            lower >= 2.0 && upper > lower && upper.is_finite()
                        }
                    }
            }
            BetaPrior::FixedG { g, sigma_b } => g > 0.0 && sigma_b > 0.0 && g.is_finite(),
            BetaPrior::Normal { variance } => variance > 0.0 && variance.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid coefficient prior {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub beta: BetaPrior,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec {
            beta: BetaPrior::hyper_g(4.0),
        }
    }
}

/// log π(δ) = log 2/(π√(1−δ²)) on A.
pub fn ln_delta_prior(delta: f64, region: SignRegion) -> f64 {
    if !region.contains(delta) {
        return f64::NEG_INFINITY;
    }
    (2.0 / std::f64::consts::PI).ln() - 0.5 * (1.0 - delta * delta).ln()
}

/// Independent N(0, variance) densities for each coefficient.
pub fn ln_beta_prior(beta: &[f64], variance: f64) -> f64 {
    let c = -0.5 * (2.0 * std::f64::consts::PI * variance).ln();
    beta.iter().map(|b| c - b * b / (2.0 * variance)).sum()
}

/// log[(α − 2)/2 · (1 + g)^{−α/2}], a proper density on g > 0.
pub fn ln_g_prior(g: f64, alpha: f64) -> f64 {
    if !(g > 0.0) || !(alpha > 2.0) {
        return f64::NEG_INFINITY;
    }
    (0.5 * (alpha - 2.0)).ln() - 0.5 * alpha * g.ln_1p()
}

pub fn ln_alpha_prior(alpha: f64, prior: &AlphaPrior) -> f64 {
    match *prior {
        AlphaPrior::Fixed { value } => {
            if alpha == value {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        AlphaPrior::Uniform { lower, upper } => {
            if alpha > lower && alpha < upper {
                -(upper - lower).ln()
            } else {
                f64::NEG_INFINITY
            }
        }
    }
}

/// Truncated exponential priors on the excess degrees of freedom for CST and
/// CSS, independent uniforms for the contaminated normal.
pub fn ln_shape_prior(fam: &MixingFamily) -> f64 {
    fn trunc_exp(x: f64, width: f64) -> f64 {
        if !(x > 0.0 && x <= width) {
            return f64::NEG_INFINITY;
        }
        SHAPE_PRIOR_RATE.ln() - SHAPE_PRIOR_RATE * x - (-(-SHAPE_PRIOR_RATE * width).exp_m1()).ln()
    }
    match *fam {
        MixingFamily::Normal | MixingFamily::Csn => 0.0,
        MixingFamily::Cst { nu } => trunc_exp(nu - CST_NU_MIN, NU_MAX - CST_NU_MIN),
        MixingFamily::Css { nu } => trunc_exp(nu - CSS_NU_MIN, NU_MAX - CSS_NU_MIN),
        MixingFamily::Cscn { nu1, nu2 } => {
            if nu1 > 0.0 && nu1 < 1.0 && nu2 > 0.0 && nu2 < 1.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
    }
}

/// log π(β | g) + log π(g) + log π(α) + log π(δ) + log π(ν).
pub fn log_prior(theta: &ModelParams, spec: &ModelSpec) -> f64 {
    if theta.family.kind() != spec.link.family || !spec.link.admits_delta(theta.delta) {
        return f64::NEG_INFINITY;
    }
    let ln_delta = if spec.link.delta_is_free() {
        ln_delta_prior(theta.delta, spec.link.sign_region)
    } else {
        0.0
    };
    let ln_hyper = match spec.prior.beta {
        BetaPrior::HyperG { alpha, .. } => {
            ln_g_prior(theta.g, theta.alpha) + ln_alpha_prior(theta.alpha, &alpha)
        }
        _ => 0.0,
    };
    let variance = spec.prior.beta.variance(theta.g);
    ln_beta_prior(&theta.beta, variance) + ln_hyper + ln_delta + ln_shape_prior(&theta.family)
}

/// Draw g from its hyper-g prior: the shrinkage g/(1+g) is Beta(1, α/2 − 1).
pub fn sample_g_prior<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    let beta = Beta::new(1.0, 0.5 * alpha - 1.0)
        .map_err(|e| Error::domain(format!("hyper-g exponent {alpha}: {e}")))?;
    let s: f64 = beta.sample(rng);
    Ok(s / (1.0 - s))
}
