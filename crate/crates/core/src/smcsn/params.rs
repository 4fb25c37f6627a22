use crate::{Error, Result};

/// √(2/π), the mean of a standard half-normal variable.
pub const B: f64 = 0.797_884_560_802_865_4;
/// (2/(4 − π))^{1/3}.
pub const S: f64 = 1.325_700_815_100_011_2;
const HALF_FOUR_MINUS_PI: f64 = 0.429_203_673_205_103_4;

/// Centered parameters of a skew-normal: mean, scale and skewness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredParams {
    mu: f64,
    sigma2: f64,
    delta: f64,
}

impl CenteredParams {
    pub fn new(mu: f64, sigma2: f64, delta: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain(format!("mean {mu} is not finite")));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::domain(format!("scale {sigma2} must be positive")));
        }
        check_delta(delta)?;
        Ok(CenteredParams { mu, sigma2, delta })
    }

    /// Unit-scale, zero-mean parameters as used by the link function.
    pub fn standard(delta: f64) -> Result<Self> {
        Self::new(0.0, 1.0, delta)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same parameters with the scale divided by `u`.
    pub(crate) fn rescaled(&self, u: f64) -> Self {
        CenteredParams {
            sigma2: self.sigma2 / u,
            ..*self
        }
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("skewness parameter {delta} not in (-1, 1)")))
    }
}

/// Direct-parameterization quantities and the latent-representation terms
/// derived from a [`CenteredParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectDerived {
    /// Location ξ = μ − σγ^{1/3}s.
    pub location: f64,
    /// Scale ω = σ√(1 + s²γ^{2/3}).
    pub scale: f64,
    /// Shape λ = δ/√(1 − δ²).
    pub shape: f64,
    /// Pearson skewness γ.
    pub skewness: f64,
    /// Δ = δ/√(1 − b²δ²), the loading of the half-normal term.
    pub loading: f64,
    /// τ = (1 − δ²)/(1 − b²δ²), the variance of the normal term.
    pub tau: f64,
}

/// Pearson skewness coefficient of a centered skew-normal with skewness
/// parameter `delta`.
pub fn pearson_gamma(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let bd = B * delta;
    Ok(HALF_FOUR_MINUS_PI * bd * bd * bd / (1.0 - bd * bd).powf(1.5))
}

/// Δ and τ for a given δ.
#[inline]
pub fn latent_terms(delta: f64) -> (f64, f64) {
    let denom = 1.0 - B * B * delta * delta;
    (delta / denom.sqrt(), (1.0 - delta * delta) / denom)
}

pub fn cp_to_dp(p: &CenteredParams) -> DirectDerived {
    let sigma = p.sigma();
    let delta = p.delta;
    let skewness = pearson_gamma(delta).expect("validated delta");
    let g13 = skewness.cbrt();
    let (loading, tau) = latent_terms(delta);
    DirectDerived {
        location: p.mu - sigma * g13 * S,
        scale: sigma * (1.0 + S * S * g13 * g13).sqrt(),
        shape: delta / (1.0 - delta * delta).sqrt(),
        skewness,
        loading,
        tau,
    }
}
