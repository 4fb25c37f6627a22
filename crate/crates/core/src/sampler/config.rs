use serde::{Deserialize, Serialize};

use super::SamplerError;

/// Initial random-walk standard deviations, each on the transformed scale
/// its block proposes on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposalScales {
    /// logit of δ rescaled to the sign region.
    pub delta: f64,
    /// log g.
    pub g: f64,
    /// logit of (α − lower)/(upper − lower).
    pub alpha: f64,
    /// log(ν − lower bound), or logit for the contaminated normal.
    pub nu: f64,
    /// log uᵢ, shared by all observations.
    pub u: f64,
    /// Global multiplier of the joint (β, δ) proposal.
    pub theta: f64,
}

impl Default for ProposalScales {
    fn default() -> Self {
        ProposalScales {
            delta: 0.3,
            g: 1.0,
            alpha: 1.0,
            nu: 0.5,
            u: 1.0,
            theta: 1.0,
        }
    }
}

/// Which optional blocks a sweep includes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Draw (Zᵢ, Hᵢ) jointly from their conditional given θ and Uᵢ instead of
    /// the two single-site updates.
    pub joint_latents: bool,
    /// Open every sweep with a Metropolis move on (β, δ) against the
    /// likelihood with Z and H integrated out. Requires `joint_latents`.
    pub marginal_theta: bool,
    /// Update δ with H integrated out, then redraw H.
    pub collapsed_delta: bool,
    /// Update the skew-t / skew-slash ν with Z, H and U integrated out, then
    /// redraw all three exactly.
    pub collapsed_nu: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            joint_latents: true,
            marginal_theta: true,
            collapsed_delta: true,
            collapsed_nu: true,
        }
    }
}

impl SweepOptions {
    /// The plain single-site Gibbs sweep.
    pub fn plain() -> Self {
        SweepOptions {
            joint_latents: false,
            marginal_theta: false,
            collapsed_delta: false,
            collapsed_nu: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub scales: ProposalScales,
    /// Iterations between Robbins–Monro updates during burn-in.
    pub adaptation_window: usize,
    pub target_acceptance: f64,
    /// Retain (Z, H, U) with every kept draw.
    pub keep_latents: bool,
    pub sweep: SweepOptions,
}

impl ChainConfig {
    pub fn new(iterations: usize, burn_in: usize, thin: usize, seed: u64) -> Self {
        ChainConfig {
            iterations,
            burn_in,
            thin,
            seed,
            scales: ProposalScales::default(),
            adaptation_window: 50,
            target_acceptance: 0.3,
            keep_latents: true,
            sweep: SweepOptions::default(),
        }
    }

    /// 60000 iterations, 40000 burn-in, thin 20: 1000 retained draws.
    pub fn full(seed: u64) -> Self {
        Self::new(60_000, 40_000, 20, seed)
    }

    /// 6000 iterations, 4000 burn-in, thin 2: 1000 retained draws.
    pub fn desk(seed: u64) -> Self {
        Self::new(6_000, 4_000, 2, seed)
    }

    pub fn retained(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    /// Whether iteration `t` (zero-based) is kept.
    #[inline]
    pub fn keeps(&self, t: usize) -> bool {
        t >= self.burn_in && (t - self.burn_in + 1).is_multiple_of(self.thin)
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let fail = |m: String| Err(SamplerError::Config(m));
        if self.thin == 0 {
            return fail("thin must be positive".into());
        }
        if self.burn_in >= self.iterations {
            return fail(format!(
                "burn-in {} must be below the iteration count {}",
                self.burn_in, self.iterations
            ));
        }
        if self.retained() < 100 {
            return fail(format!(
                "(iterations − burn-in)/thin = {} retained draws, at least 100 required",
                self.retained()
            ));
        }
        if self.adaptation_window == 0 {
            return fail("adaptation window must be positive".into());
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return fail(format!("target acceptance {} not in (0, 1)", self.target_acceptance));
        }
        let s = self.scales;
        if [s.delta, s.g, s.alpha, s.nu, s.u, s.theta]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return fail("proposal scales must be positive".into());
        }
        if self.sweep.marginal_theta && !self.sweep.joint_latents {
            return fail("the marginal (β, δ) move needs joint latent updates".into());
        }
        Ok(())
    }
}
