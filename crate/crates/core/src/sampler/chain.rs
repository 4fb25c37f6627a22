use std::time::Instant;

use nalgebra::DVector;

use super::adapt::AdaptiveScale;
use super::config::ChainConfig;
use super::draws::PosteriorDraws;
use super::state::ChainState;
use super::steps::{
    step_alpha, step_beta, step_delta, step_g, step_h, step_latents_joint, step_nu,
    step_theta_marginal, step_u, step_z, theta_vector, ThetaBlock,
};
use super::SamplerError;
use crate::model::{BinaryDataset, LatentState, ModelParams, ModelSpec};
use crate::par::{self, Execution};
use crate::smcsn::{FamilyKind, B};
use crate::streams::{self, Purpose, Rng as StreamRng};

/// Least squares of (2y − 1) on X, with a tiny ridge for rank-deficient designs.
fn least_squares_start(data: &BinaryDataset) -> Vec<f64> {
    let x = data.x();
    let target = DVector::from_iterator(data.n(), data.y().iter().map(|&v| if v { 1.0 } else { -1.0 }));
    let mut xtx = x.transpose() * x;
    for j in 0..data.p() {
        xtx[(j, j)] += 1e-8;
    }
    let rhs = x.transpose() * target;
    match xtx.cholesky() {
        Some(c) => c.solve(&rhs).as_slice().to_vec(),
        None => vec![0.0; data.p()],
    }
}

/// Starting point: least-squares β, δ at the centre of its region, default
/// shapes, u ≡ 1, h ≡ b and z from one pass of the Z block.
pub fn initial_state(
    data: &BinaryDataset,
    spec: &ModelSpec,
    rng: &mut StreamRng,
) -> Result<ChainState, SamplerError> {
    let kind = spec.link.family;
    let delta = if spec.link.delta_is_free() {
        spec.link.sign_region.midpoint()
    } else {
        0.0
    };
    let alpha = match spec.prior.beta {
        crate::model::BetaPrior::HyperG { alpha, .. } => alpha.initial(),
        _ => 4.0,
    };
    let theta = ModelParams {
        beta: least_squares_start(data),
        delta,
        family: kind.with_default_shape(),
        g: spec.prior.beta.initial_g(),
        alpha,
    };
    let n = data.n();
    let latent = LatentState {
        z: vec![0.0; n],
        h: vec![B; n],
        u: vec![1.0; n],
    };
    let mut state = ChainState::new(theta, latent, data);
    step_z(&mut state, data, rng)?;
    Ok(state)
}

struct Kernels {
    theta: ThetaBlock,
    delta: AdaptiveScale,
    g: AdaptiveScale,
    alpha: AdaptiveScale,
    nu: AdaptiveScale,
    u: AdaptiveScale,
}

impl Kernels {
    fn all_scales(&mut self) -> [&mut AdaptiveScale; 6] {
        [
            &mut self.theta.scale,
            &mut self.delta,
            &mut self.g,
            &mut self.alpha,
            &mut self.nu,
            &mut self.u,
        ]
    }
}

fn check(state: &ChainState, block: &'static str, iteration: usize) -> Result<(), SamplerError> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(SamplerError::NonFinite {
            block,
            iteration,
            state: state.dump(),
        })
    }
}

/// Random stream of chain `index` under the configured seed.
pub(crate) fn chain_rng(cfg: &ChainConfig, index: u64) -> StreamRng {
    streams::derive(cfg.seed, Purpose::Chain, index)
}

pub fn run_chain(data: &BinaryDataset, spec: &ModelSpec, cfg: &ChainConfig) -> Result<PosteriorDraws, SamplerError> {
    run_chain_indexed(data, spec, cfg, 0)
}

/// One chain on the random stream reserved for chain `index`.
pub fn run_chain_indexed(
    data: &BinaryDataset,
    spec: &ModelSpec,
    cfg: &ChainConfig,
    index: u64,
) -> Result<PosteriorDraws, SamplerError> {
    run_chain_with_rng(data, spec, cfg, index, chain_rng(cfg, index))
}

/// One chain driven by a caller-supplied stream; `index` is only recorded.
pub fn run_chain_with_rng(
    data: &BinaryDataset,
    spec: &ModelSpec,
    cfg: &ChainConfig,
    index: u64,
    mut rng: StreamRng,
) -> Result<PosteriorDraws, SamplerError> {
    cfg.validate()?;
    spec.prior
        .beta
        .validate()
        .map_err(|e| SamplerError::Config(e.to_string()))?;
    let start = Instant::now();
    let mut state = initial_state(data, spec, &mut rng)?;

    let kind = spec.link.family;
    let skewed = spec.link.delta_is_free();
    let sweep = cfg.sweep;
    let marginal = sweep.marginal_theta;
    let mut theta_sd = vec![0.1; data.p()];
    if skewed {
        theta_sd.push(cfg.scales.delta);
    }
    let mut k = Kernels {
        theta: ThetaBlock::new(&theta_sd, cfg.scales.theta),
        delta: AdaptiveScale::new(cfg.scales.delta),
        g: AdaptiveScale::new(cfg.scales.g),
        alpha: AdaptiveScale::new(cfg.scales.alpha),
        nu: AdaptiveScale::new(cfg.scales.nu),
        u: AdaptiveScale::new(cfg.scales.u),
    };
    let prior = spec.prior.beta;
    let retained = cfg.retained();
    let mut params = Vec::with_capacity(retained);
    let mut latents = cfg.keep_latents.then(|| Vec::with_capacity(retained));
    let mut jitter_events = 0;
    let covariance_from = cfg.burn_in / 4;

    for t in 0..cfg.iterations {
        if marginal {
            step_theta_marginal(&mut state, data, spec, &mut k.theta, &mut rng);
            check(&state, "theta", t)?;
        }
        if kind == FamilyKind::Normal {
            step_z(&mut state, data, &mut rng)?;
        } else if sweep.joint_latents {
            step_latents_joint(&mut state, data, &mut rng)?;
        } else {
            step_z(&mut state, data, &mut rng)?;
            check(&state, "z", t)?;
            step_h(&mut state, &mut rng)?;
        }
        check(&state, "latent", t)?;
        step_u(&mut state, &mut k.u, &mut rng);
        check(&state, "u", t)?;
        if step_beta(&mut state, data, &prior, &mut rng)? {
            jitter_events += 1;
        }
        check(&state, "beta", t)?;
        if prior.samples_g() {
            step_g(&mut state, &prior, &mut k.g, &mut rng);
            if prior.samples_alpha() {
                step_alpha(&mut state, &prior, &mut k.alpha, &mut rng);
            }
            check(&state, "g", t)?;
        }
        if skewed {
            step_delta(&mut state, data, spec, sweep.collapsed_delta, &mut k.delta, &mut rng)?;
            check(&state, "delta", t)?;
        }
        step_nu(&mut state, data, sweep.collapsed_nu, &mut k.nu, &mut rng)?;
        check(&state, "nu", t)?;

        if t < cfg.burn_in {
            if marginal && t >= covariance_from {
                k.theta.observe(&theta_vector(&state, spec));
            }
            if (t + 1) % cfg.adaptation_window == 0 {
                for s in k.all_scales() {
                    s.adapt(cfg.target_acceptance);
                }
                if marginal {
                    k.theta.refresh();
                }
            }
            if t + 1 == cfg.burn_in {
                for s in k.all_scales() {
                    s.reset_counts();
                }
            }
        }
        if cfg.keeps(t) {
            params.push(state.theta.clone());
            if let Some(l) = latents.as_mut() {
                l.push(state.latent.clone());
            }
        }
    }

    let mut acceptance = Vec::new();
    let mut report = |name: &str, s: &AdaptiveScale| {
        if let Some(r) = s.rate() {
            acceptance.push((name.to_string(), r));
        }
    };
    report("theta", &k.theta.scale);
    report("delta", &k.delta);
    report("g", &k.g);
    report("alpha", &k.alpha);
    report("nu", &k.nu);
    report("u", &k.u);

    Ok(PosteriorDraws {
        spec: *spec,
        config: *cfg,
        chain: index,
        covariates: data.covariate_names(),
        params,
        latents,
        acceptance,
        jitter_events,
        elapsed: start.elapsed(),
    })
}

/// Independent chains on distinct streams, in chain order.
pub fn run_chains(
    data: &BinaryDataset,
    spec: &ModelSpec,
    cfg: &ChainConfig,
    chains: usize,
    exec: Execution,
) -> Vec<Result<PosteriorDraws, SamplerError>> {
    par::map_indices(chains, exec, |c| run_chain_indexed(data, spec, cfg, c as u64))
}

