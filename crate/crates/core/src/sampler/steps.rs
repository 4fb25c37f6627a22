//! Individual blocks of the Metropolis-within-Gibbs sweep. Each block leaves
//! its full conditional (or, for the collapsed blocks, the joint conditional
//! of the block and what it integrates out) invariant.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::adapt::AdaptiveScale;
use super::state::ChainState;
use super::SamplerError;
use crate::model::likelihood::{cscn_observation, latent_mean};
use crate::model::{
    ln_beta_prior, ln_delta_prior, ln_g_prior, ln_shape_prior, AlphaPrior, BetaPrior,
    BinaryDataset, ModelSpec, SignRegion,
};
use crate::numerics::{
    ln_normal_pdf, ln_std_normal_cdf, ln_std_normal_pdf, sample_log_concave,
    sample_truncated_normal, sample_truncated_standard,
};
use crate::smcsn::{latent_terms, MixingFamily, MixingNodes, UnitCsn, B, CSS_NU_MIN, CST_NU_MIN, NU_MAX};

type StepResult<T = ()> = Result<T, SamplerError>;

fn numerics(e: crate::Error) -> SamplerError {
    SamplerError::Numerics(e.to_string())
}

#[inline]
fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Metropolis decision on a log ratio; NaN (from −∞ − −∞) rejects.
#[inline]
pub(crate) fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    if log_ratio >= 0.0 {
        return true;
    }
    if log_ratio.is_nan() {
        return false;
    }
    rng.random::<f64>().ln() < log_ratio
}

#[inline]
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn sign_bounds(y: bool) -> (f64, f64) {
    if y {
        (0.0, f64::INFINITY)
    } else {
        (f64::NEG_INFINITY, 0.0)
    }
}

/// Zᵢ ~ N(μᵢ, τ/uᵢ) truncated to the side of zero given by yᵢ.
pub fn step_z<R: Rng + ?Sized>(state: &mut ChainState, data: &BinaryDataset, rng: &mut R) -> StepResult {
    let (loading, tau) = latent_terms(state.theta.delta);
    let y = data.y();
    for i in 0..data.n() {
        let u = state.latent.u[i];
        let m = latent_mean(state.eta()[i], state.latent.h[i], u, loading);
        let (lo, hi) = sign_bounds(y[i]);
        state.latent.z[i] = sample_truncated_normal(m, tau / u, lo, hi, rng).map_err(numerics)?;
    }
    Ok(())
}

/// Mean and variance of Hᵢ given everything else, before truncation to (0, ∞).
pub fn h_conditional(z: f64, eta: f64, u: f64, delta: f64) -> (f64, f64) {
    let (loading, tau) = latent_terms(delta);
    let denom = loading * loading + tau;
    let a = z - eta - loading * B / u.sqrt();
    (-u.sqrt() * a * loading / denom, tau / denom)
}

/// Hᵢ from its truncated-normal full conditional.
pub fn step_h<R: Rng + ?Sized>(state: &mut ChainState, rng: &mut R) -> StepResult {
    for i in 0..state.latent.len() {
        let (m, v) = h_conditional(state.latent.z[i], state.eta()[i], state.latent.u[i], state.theta.delta);
        state.latent.h[i] = sample_truncated_normal(m, v, 0.0, f64::INFINITY, rng).map_err(numerics)?;
    }
    Ok(())
}

/// φ(x)/Φ(x), stable for very negative x.
#[inline]
fn inverse_mills(x: f64) -> f64 {
    (ln_std_normal_pdf(x) - ln_std_normal_cdf(x)).exp()
}

/// Exact draw from the density proportional to φ(h)Φ(a − ch) on h > 0.
///
/// The log density is concave, so adaptive rejection sampling applies; the
/// hull starts at the mode (found by safeguarded Newton) and one curvature
/// scale either side.
pub fn sample_h_marginal<R: Rng + ?Sized>(a: f64, c: f64, rng: &mut R) -> StepResult<f64> {
    if c == 0.0 {
        return Ok(sample_truncated_standard(0.0, f64::INFINITY, rng));
    }
    // l'(h) = −h − cκ(a − ch), l''(h) = −1 − c²κ(x)(x + κ(x)).
    let slope = |h: f64| -h - c * inverse_mills(a - c * h);
    let curvature = |h: f64| {
        let x = a - c * h;
        let k = inverse_mills(x);
        -1.0 - c * c * (k * (x + k)).clamp(0.0, 1.0)
    };
    let mode = if slope(0.0) <= 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, 1.0);
        while slope(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        let mut m = 0.5 * (lo + hi);
        for _ in 0..60 {
            let s = slope(m);
            if s > 0.0 {
                lo = m;
            } else {
                hi = m;
            }
            let newton = m - s / curvature(m);
            m = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-10 * hi.max(1.0) || s.abs() < 1e-12 {
                break;
            }
        }
        m
    };
    let spread = 1.0 / (-curvature(mode)).sqrt();
    let init = if mode > 0.0 {
        [(mode - spread).max(0.5 * mode), mode, mode + spread]
    } else {
        [0.3 * spread, spread, 2.0 * spread]
    };
    let eval = |h: f64| (-0.5 * h * h + ln_std_normal_cdf(a - c * h), slope(h));
    sample_log_concave(eval, 0.0, &init, rng).map_err(|e| {
        SamplerError::Numerics(format!("latent half-normal draw failed (a = {a}, c = {c}): {e}"))
    })
}

/// Joint exact draw of (Zᵢ, Hᵢ) given θ, Uᵢ and yᵢ: Hᵢ from its marginal
/// with Zᵢ integrated out, then Zᵢ | Hᵢ.
pub fn step_latents_joint<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &BinaryDataset,
    rng: &mut R,
) -> StepResult {
    let (loading, tau) = latent_terms(state.theta.delta);
    let y = data.y();
    for i in 0..data.n() {
        let (z, h) = draw_zh(state.eta()[i], state.latent.u[i], y[i], loading, tau, rng)?;
        state.latent.z[i] = z;
        state.latent.h[i] = h;
    }
    Ok(())
}

/// One exact draw of (Zᵢ, Hᵢ) given yᵢ, ηᵢ and uᵢ.
fn draw_zh<R: Rng + ?Sized>(eta: f64, u: f64, y: bool, loading: f64, tau: f64, rng: &mut R) -> StepResult<(f64, f64)> {
    let sqrt_tau = tau.sqrt();
    let sign = if y { 1.0 } else { -1.0 };
    let a = sign * (eta * u.sqrt() + loading * B) / sqrt_tau;
    let c = sign * loading / sqrt_tau;
    let h = sample_h_marginal(a, c, rng)?;
    let m = latent_mean(eta, h, u, loading);
    let (lo, hi) = sign_bounds(y);
    let z = sample_truncated_normal(m, tau / u, lo, hi, rng).map_err(numerics)?;
    Ok((z, h))
}

/// Proposals tried per observation before [`redraw_latents`] gives up.
const MAX_MIXING_TRIALS: usize = 200_000;

/// Σᵢ ln P(yᵢ | ηᵢ, δ, ν) with Z, H and U all integrated out, using the
/// fixed mixing rule.
pub fn collapsed_log_likelihood(eta: &[f64], y: &[bool], delta: f64, fam: &MixingFamily) -> f64 {
    let (Ok(pos), Ok(neg)) = (UnitCsn::new(delta), UnitCsn::new(-delta)) else {
        return f64::NEG_INFINITY;
    };
    let nodes = MixingNodes::new(fam);
    eta.iter()
        .zip(y)
        .map(|(&e, &yi)| nodes.response_prob(e, yi, &pos, &neg).ln())
        .sum()
}

/// Exact joint draw of every (Uᵢ, Zᵢ, Hᵢ) given yᵢ and the parameters.
///
/// Uᵢ comes from rejection sampling with the mixing law as proposal and
/// acceptance probability P(yᵢ | Uᵢ). If some observation exhausts
/// [`MAX_MIXING_TRIALS`], the state is left untouched and `false` returned.
pub fn redraw_latents<R: Rng + ?Sized>(state: &mut ChainState, data: &BinaryDataset, rng: &mut R) -> StepResult<bool> {
    let fam = state.theta.family;
    let delta = state.theta.delta;
    let pos = UnitCsn::new(delta).map_err(numerics)?;
    let neg = UnitCsn::new(-delta).map_err(numerics)?;
    let y = data.y();
    let mut u = Vec::with_capacity(data.n());
    for i in 0..data.n() {
        let eta = state.eta()[i];
        let mut drawn = None;
        for _ in 0..MAX_MIXING_TRIALS {
            let v = fam.sample_mixing(rng);
            let p = if y[i] { pos.cdf(eta * v.sqrt()) } else { neg.cdf(-eta * v.sqrt()) };
            if rng.random::<f64>() < p {
                drawn = Some(v);
                break;
            }
        }
        match drawn {
            Some(v) => u.push(v),
            None => return Ok(false),
        }
    }
    let (loading, tau) = latent_terms(delta);
    for (i, v) in u.into_iter().enumerate() {
        let (z, h) = draw_zh(state.eta()[i], v, y[i], loading, tau, rng)?;
        state.latent.u[i] = v;
        state.latent.z[i] = z;
        state.latent.h[i] = h;
    }
    Ok(true)
}

pub fn cscn_atom_probability(z: f64, eta: f64, h: f64, delta: f64, nu1: f64, nu2: f64) -> f64 {
    let (loading, tau) = latent_terms(delta);
    let a = nu1.ln() + ln_normal_pdf(z, latent_mean(eta, h, nu2, loading), tau / nu2);
    let b = (-nu1).ln_1p() + ln_normal_pdf(z, latent_mean(eta, h, 1.0, loading), tau);
    logistic(a - b)
}

fn draw_cscn_u<R: Rng + ?Sized>(state: &mut ChainState, delta: f64, nu1: f64, nu2: f64, rng: &mut R) {
    for i in 0..state.latent.len() {
        let p = cscn_atom_probability(state.latent.z[i], state.eta()[i], state.latent.h[i], delta, nu1, nu2);
        state.latent.u[i] = if rng.random::<f64>() < p { nu2 } else { 1.0 };
    }
}

/// Log conditional kernel of log uᵢ (Jacobian included):
/// ½ log u − (√u r − Δ(b − h))²/(2τ) + log h(u | ν) + log u, with r = z − η.
pub fn ln_u_kernel(u: f64, r: f64, h: f64, delta: f64, fam: &MixingFamily) -> f64 {
    let (loading, tau) = latent_terms(delta);
    let w = u.sqrt() * r - loading * (B - h);
    1.5 * u.ln() - w * w / (2.0 * tau) + fam.ln_mixing_density(u)
}

/// Uᵢ update: exact two-point draw for the contaminated normal, one
/// random-walk Metropolis move on log uᵢ per observation for the skew-t and
/// skew-slash. Degenerate mixing leaves U at one.
pub fn step_u<R: Rng + ?Sized>(state: &mut ChainState, scale: &mut AdaptiveScale, rng: &mut R) {
    let fam = state.theta.family;
    let delta = state.theta.delta;
    match fam {
        MixingFamily::Normal | MixingFamily::Csn => {}
        MixingFamily::Cscn { nu1, nu2 } => draw_cscn_u(state, delta, nu1, nu2, rng),
        MixingFamily::Cst { .. } | MixingFamily::Css { .. } => {
            let s = scale.scale();
            let mut accepted = 0;
            for i in 0..state.latent.len() {
                let r = state.latent.z[i] - state.eta()[i];
                let h = state.latent.h[i];
                let u = state.latent.u[i];
                let proposal = u * (s * normal(rng)).exp();
                let ratio = ln_u_kernel(proposal, r, h, delta, &fam) - ln_u_kernel(u, r, h, delta, &fam);
                if accept(ratio, rng) {
                    state.latent.u[i] = proposal;
                    accepted += 1;
                }
            }
            scale.record_many(accepted, state.latent.len() as u64);
        }
    }
}

/// Mean and precision Cholesky factor of β's Gaussian full conditional.
/// Returns whether diagonal jitter was needed.
pub fn beta_conditional(
    state: &ChainState,
    data: &BinaryDataset,
    prior_variance: f64,
) -> StepResult<(DVector<f64>, DMatrix<f64>, bool)> {
    let (loading, tau) = latent_terms(state.theta.delta);
    let x = data.x();
    let (n, p) = x.shape();
    let mut prec = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    for i in 0..n {
        let u = state.latent.u[i];
        let zt = state.latent.z[i] - loading * (B - state.latent.h[i]) / u.sqrt();
        let w = u / tau;
        for j in 0..p {
            let xij = x[(i, j)];
            rhs[j] += w * xij * zt;
            for k in 0..=j {
                prec[(j, k)] += w * xij * x[(i, k)];
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            prec[(k, j)] = prec[(j, k)];
        }
        prec[(j, j)] += 1.0 / prior_variance;
    }
    let mut jittered = false;
    let chol = match prec.clone().cholesky() {
        Some(c) => c,
        None => {
            log::warn!("β precision not positive definite; adding 1e-10 to the diagonal");
            jittered = true;
            let mut j = prec;
            for d in 0..p {
                j[(d, d)] += 1e-10;
            }
            j.cholesky()
                .ok_or_else(|| SamplerError::Numerics("β precision matrix is singular".into()))?
        }
    };
    let mean = chol.solve(&rhs);
    Ok((mean, chol.l(), jittered))
}

/// β ~ N(m, V) with V⁻¹ = XᵀWX/τ + I/v and m = V XᵀW z̃/τ.
pub fn step_beta<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &BinaryDataset,
    prior: &BetaPrior,
    rng: &mut R,
) -> StepResult<bool> {
    let (mean, l, jittered) = beta_conditional(state, data, prior.variance(state.theta.g))?;
    let xi = DVector::from_fn(mean.len(), |_, _| normal(rng));
    let noise = l
        .transpose()
        .solve_upper_triangular(&xi)
        .ok_or_else(|| SamplerError::Numerics("singular Cholesky factor".into()))?;
    state.set_beta((mean + noise).as_slice().to_vec(), data);
    Ok(jittered)
}

/// Log target of log g: π(β | g) π(g | α) g.
pub fn ln_g_target(g: f64, beta: &[f64], sigma_b: f64, alpha: f64) -> f64 {
    if !(g > 0.0 && g.is_finite()) {
        return f64::NEG_INFINITY;
    }
    ln_beta_prior(beta, g * sigma_b) + ln_g_prior(g, alpha) + g.ln()
}

pub fn step_g<R: Rng + ?Sized>(state: &mut ChainState, prior: &BetaPrior, scale: &mut AdaptiveScale, rng: &mut R) {
    let BetaPrior::HyperG { sigma_b, .. } = *prior else {
        return;
    };
    let t = &mut state.theta;
    let proposal = t.g * (scale.scale() * normal(rng)).exp();
    let ratio = ln_g_target(proposal, &t.beta, sigma_b, t.alpha) - ln_g_target(t.g, &t.beta, sigma_b, t.alpha);
    let ok = accept(ratio, rng);
    if ok {
        t.g = proposal;
    }
    scale.record(ok);
}

/// α update under a uniform prior, on the logit of its rescaled value.
pub fn step_alpha<R: Rng + ?Sized>(state: &mut ChainState, prior: &BetaPrior, scale: &mut AdaptiveScale, rng: &mut R) {
    let BetaPrior::HyperG {
        alpha: AlphaPrior::Uniform { lower, upper },
        ..
    } = *prior
    else {
        return;
    };
    let width = upper - lower;
    let target = |alpha: f64| {
        let s = (alpha - lower) / width;
        if !(s > 0.0 && s < 1.0) {
            return f64::NEG_INFINITY;
        }
        ln_g_prior(state.theta.g, alpha) + s.ln() + (1.0 - s).ln()
    };
    let current = state.theta.alpha;
    let x = logit((current - lower) / width) + scale.scale() * normal(rng);
    let proposal = lower + width * logistic(x);
    let ok = accept(target(proposal) - target(current), rng);
    if ok {
        state.theta.alpha = proposal;
    }
    scale.record(ok);
}

/// Log target of the δ move on the logit scale: the δ-dependent part of the
/// likelihood, log π(δ) and the Jacobian log[(δ − l)(u − δ)].
///
/// With `collapsed`, H is integrated out and each zᵢ − ηᵢ is scored as
/// CSN(0, 1/uᵢ, −δ); otherwise the complete likelihood is used.
pub fn delta_log_target(state: &ChainState, data: &BinaryDataset, region: SignRegion, delta: f64, collapsed: bool) -> f64 {
    if !region.contains(delta) {
        return f64::NEG_INFINITY;
    }
    let (lo, hi) = region.bounds();
    let n = data.n();
    let lat = &state.latent;
    let eta = state.eta();
    let ll: f64 = if collapsed {
        let kernel = UnitCsn::new(-delta).expect("δ inside the sign region");
        (0..n).map(|i| kernel.ln_pdf(lat.z[i] - eta[i], 1.0 / lat.u[i].sqrt())).sum()
    } else {
        let (loading, tau) = latent_terms(delta);
        (0..n)
            .map(|i| {
                let u = lat.u[i];
                ln_normal_pdf(lat.z[i], latent_mean(eta[i], lat.h[i], u, loading), tau / u)
            })
            .sum()
    };
    ll + ln_delta_prior(delta, region) + (delta - lo).ln() + (hi - delta).ln()
}

/// Log Metropolis ratio for moving δ from `from` to `to` under the symmetric
/// logit-scale random walk.
pub fn delta_log_acceptance(
    state: &ChainState,
    data: &BinaryDataset,
    region: SignRegion,
    from: f64,
    to: f64,
    collapsed: bool,
) -> f64 {
    delta_log_target(state, data, region, to, collapsed) - delta_log_target(state, data, region, from, collapsed)
}

/// Random-walk move on logit((δ − l)/(u − l)). With `collapsed`, H is
/// redrawn from its conditional afterwards.
pub fn step_delta<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &BinaryDataset,
    spec: &ModelSpec,
    collapsed: bool,
    scale: &mut AdaptiveScale,
    rng: &mut R,
) -> StepResult {
    if !spec.link.delta_is_free() {
        return Ok(());
    }
    let region = spec.link.sign_region;
    let (lo, hi) = region.bounds();
    let current = state.theta.delta;
    let x = logit((current - lo) / (hi - lo)) + scale.scale() * normal(rng);
    let proposal = lo + (hi - lo) * logistic(x);
    let ok = region.contains(proposal)
        && accept(delta_log_acceptance(state, data, region, current, proposal, collapsed), rng);
    if ok {
        state.theta.delta = proposal;
    }
    scale.record(ok);
    if collapsed {
        step_h(state, rng)?;
    }
    Ok(())
}

/// Log target of the transformed shape parameter(s).
pub fn nu_log_target(state: &ChainState, data: &BinaryDataset, fam: &MixingFamily) -> f64 {
    let prior = ln_shape_prior(fam);
    if prior == f64::NEG_INFINITY {
        return prior;
    }
    match *fam {
        MixingFamily::Normal | MixingFamily::Csn => 0.0,
        MixingFamily::Cst { nu } | MixingFamily::Css { nu } => {
            let lower = if matches!(fam, MixingFamily::Cst { .. }) { CST_NU_MIN } else { CSS_NU_MIN };
            let ll: f64 = state.latent.u.iter().map(|&u| fam.ln_mixing_density(u)).sum();
            ll + prior + (nu - lower).ln()
        }
        MixingFamily::Cscn { nu1, nu2 } => {
            let (loading, tau) = latent_terms(state.theta.delta);
            let y = data.y();
            let lat = &state.latent;
            let ll: f64 = (0..data.n())
                .map(|i| cscn_observation(state.eta()[i], y[i], lat.z[i], lat.h[i], loading, tau, nu1, nu2))
                .sum();
            ll + prior + nu1.ln() + (-nu1).ln_1p() + nu2.ln() + (-nu2).ln_1p()
        }
    }
}

/// Shape update: log(ν − lower) random walk for the skew-t and skew-slash
/// given U; for the contaminated normal, logit moves on ν₁ then ν₂ with U
/// summed out, followed by a fresh draw of U.
pub fn step_nu<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &BinaryDataset,
    collapsed: bool,
    scale: &mut AdaptiveScale,
    rng: &mut R,
) -> StepResult {
    let fam = state.theta.family;
    let s = scale.scale();
    match fam {
        MixingFamily::Normal | MixingFamily::Csn => {}
        MixingFamily::Cst { nu } | MixingFamily::Css { nu } => {
            let is_t = matches!(fam, MixingFamily::Cst { .. });
            let lower = if is_t { CST_NU_MIN } else { CSS_NU_MIN };
            let prop_nu = lower + (nu - lower) * (s * normal(rng)).exp();
            let proposal = if is_t {
                MixingFamily::Cst { nu: prop_nu }
            } else {
                MixingFamily::Css { nu: prop_nu }
            };
            if !collapsed {
                let ok = prop_nu <= NU_MAX
                    && accept(nu_log_target(state, data, &proposal) - nu_log_target(state, data, &fam), rng);
                if ok {
                    state.theta.family = proposal;
                }
                scale.record(ok);
                return Ok(());
            }
            let target = |f: &MixingFamily| {
                collapsed_log_likelihood(state.eta(), data.y(), state.theta.delta, f)
                    + ln_shape_prior(f)
                    + (f.shape()[0] - lower).ln()
            };
            let mut ok = prop_nu <= NU_MAX && accept(target(&proposal) - target(&fam), rng);
            if ok {
                state.theta.family = proposal;
            }
            if !redraw_latents(state, data, rng)? {
                log::debug!("latent redraw exhausted its trials at {:?}", state.theta.family);
                state.theta.family = fam;
                ok = false;
            }
            scale.record(ok);
        }
        MixingFamily::Cscn { .. } => {
            for which in 0..2 {
                let MixingFamily::Cscn { nu1, nu2 } = state.theta.family else {
                    unreachable!()
                };
                let proposal = if which == 0 {
                    MixingFamily::Cscn { nu1: logistic(logit(nu1) + s * normal(rng)), nu2 }
                } else {
                    MixingFamily::Cscn { nu1, nu2: logistic(logit(nu2) + s * normal(rng)) }
                };
                let current = state.theta.family;
                let ok = accept(nu_log_target(state, data, &proposal) - nu_log_target(state, data, &current), rng);
                if ok {
                    state.theta.family = proposal;
                }
                scale.record(ok);
            }
            if let MixingFamily::Cscn { nu1, nu2 } = state.theta.family {
                draw_cscn_u(state, state.theta.delta, nu1, nu2, rng);
            }
        }
    }
    Ok(())
}

/// Random-walk Metropolis on (β, logit δ) against the likelihood with Z and
/// H integrated out given U, using a proposal covariance learned during
/// burn-in.
#[derive(Debug, Clone)]
pub struct ThetaBlock {
    pub scale: AdaptiveScale,
    factor: DMatrix<f64>,
    count: usize,
    mean: DVector<f64>,
    scatter: DMatrix<f64>,
}

impl ThetaBlock {
    /// Start from independent proposals with the given standard deviations.
    pub fn new(initial_sd: &[f64], initial_scale: f64) -> Self {
        let dim = initial_sd.len();
        let factor = DMatrix::from_diagonal(&DVector::from_column_slice(initial_sd));
        ThetaBlock {
            scale: AdaptiveScale::new(initial_scale),
            factor,
            count: 0,
            mean: DVector::zeros(dim),
            scatter: DMatrix::zeros(dim, dim),
        }
    }

    fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Add a burn-in position to the running covariance estimate.
    pub fn observe(&mut self, x: &DVector<f64>) {
        self.count += 1;
        let d = x - &self.mean;
        self.mean += &d / self.count as f64;
        let d2 = x - &self.mean;
        self.scatter += &d * d2.transpose();
    }

    /// Rebuild the proposal factor from the covariance seen so far.
    pub fn refresh(&mut self) {
        let dim = self.dim();
        if self.count < (10 * dim).max(100) {
            return;
        }
        let mut cov = &self.scatter / (self.count - 1) as f64 * (2.38 * 2.38 / dim as f64);
        for j in 0..dim {
            cov[(j, j)] += 1e-8;
        }
        if let Some(c) = cov.cholesky() {
            self.factor = c.l();
        }
    }
}

pub fn theta_vector(state: &ChainState, spec: &ModelSpec) -> DVector<f64> {
    let mut v = state.theta.beta.clone();
    if spec.link.delta_is_free() {
        let (lo, hi) = spec.link.sign_region.bounds();
        v.push(logit((state.theta.delta - lo) / (hi - lo)));
    }
    DVector::from_vec(v)
}

/// Σᵢ log P(yᵢ | ηᵢ, uᵢ, δ): P(Y = 1) = F(η√u; δ), P(Y = 0) = F(−η√u; −δ).
pub fn marginal_log_likelihood(eta: &[f64], u: &[f64], y: &[bool], delta: f64) -> f64 {
    let pos = UnitCsn::new(delta).expect("valid δ");
    let neg = UnitCsn::new(-delta).expect("valid δ");
    let mut total = 0.0;
    for i in 0..y.len() {
        let s = eta[i] * u[i].sqrt();
        let p = if y[i] { pos.cdf(s) } else { neg.cdf(-s) };
        total += p.ln();
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    total
}

fn theta_log_target(eta: &[f64], beta: &[f64], delta: f64, state: &ChainState, data: &BinaryDataset, spec: &ModelSpec) -> f64 {
    let mut lp = ln_beta_prior(beta, spec.prior.beta.variance(state.theta.g));
    if spec.link.delta_is_free() {
        let region = spec.link.sign_region;
        if !region.contains(delta) {
            return f64::NEG_INFINITY;
        }
        let (lo, hi) = region.bounds();
        lp += ln_delta_prior(delta, region) + (delta - lo).ln() + (hi - delta).ln();
    }
    lp + marginal_log_likelihood(eta, &state.latent.u, data.y(), delta)
}

/// The joint (β, δ) move. Z and H are stale afterwards and must be redrawn
/// jointly before any block conditions on them.
pub fn step_theta_marginal<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &BinaryDataset,
    spec: &ModelSpec,
    block: &mut ThetaBlock,
    rng: &mut R,
) {
    let p = data.p();
    let x = theta_vector(state, spec);
    let xi = DVector::from_fn(x.len(), |_, _| normal(rng));
    let proposal = &x + &block.factor * xi * block.scale.scale();
    let beta: Vec<f64> = proposal.as_slice()[..p].to_vec();
    let delta = if spec.link.delta_is_free() {
        let (lo, hi) = spec.link.sign_region.bounds();
        lo + (hi - lo) * logistic(proposal[p])
    } else {
        0.0
    };
    let eta = data.linear_predictor(&beta);
    let current = theta_log_target(state.eta(), &state.theta.beta, state.theta.delta, state, data, spec);
    let candidate = theta_log_target(&eta, &beta, delta, state, data, spec);
    let ok = accept(candidate - current, rng);
    if ok {
        state.set_beta_with_eta(beta, eta);
        state.theta.delta = delta;
    }
    block.scale.record(ok);
}
