use super::mixing::MixingFamily;
use super::params::{cp_to_dp, CenteredParams};
use crate::numerics::{
    integrate, ln_std_normal_cdf, ln_std_normal_pdf, owens_t, std_normal_cdf, std_normal_pdf,
    Domain, QuadratureRule,
};
use crate::{Error, Result};
use std::sync::OnceLock;

/// Absolute tolerance for the mixing integrals of the skew-t and skew-slash.
pub const MIXING_TOL: f64 = 1e-8;

/// Density of CSN(μ, σ², δ).
pub fn csn_pdf(y: f64, p: &CenteredParams) -> f64 {
    let dp = cp_to_dp(p);
    let z = (y - dp.location) / dp.scale;
    2.0 / dp.scale * std_normal_pdf(z) * std_normal_cdf(dp.shape * z)
}

/// CDF of CSN(μ, σ², δ): Φ(z) − 2T(z, λ) with z = (y − ξ)/ω.
pub fn csn_cdf(y: f64, p: &CenteredParams) -> f64 {
    if y == f64::INFINITY {
        return 1.0;
    }
    if y == f64::NEG_INFINITY {
        return 0.0;
    }
    let dp = cp_to_dp(p);
    sn_cdf((y - dp.location) / dp.scale, dp.shape)
}

/// CDF of the standard skew-normal SN(0, 1, λ).
#[inline]
fn sn_cdf(z: f64, shape: f64) -> f64 {
    if shape == 0.0 {
        return std_normal_cdf(z);
    }
    let t = owens_t(z, shape).expect("finite arguments");
    (std_normal_cdf(z) - 2.0 * t).clamp(0.0, 1.0)
}

/// Zero-mean, unit-scale CSN(0, 1, δ) with its direct parameters computed
/// once, for repeated evaluation at many points and scales.
#[derive(Debug, Clone, Copy)]
pub struct UnitCsn {
    location: f64,
    scale: f64,
    shape: f64,
}

impl UnitCsn {
    pub fn new(delta: f64) -> Result<Self> {
        let dp = cp_to_dp(&CenteredParams::standard(delta)?);
        Ok(UnitCsn {
            location: dp.location,
            scale: dp.scale,
            shape: dp.shape,
        })
    }

    /// CDF of CSN(0, 1, δ) at `y`.
    #[inline]
    pub fn cdf(&self, y: f64) -> f64 {
        sn_cdf((y - self.location) / self.scale, self.shape)
    }

    /// Log density of CSN(0, sd², δ) at `y`.
    #[inline]
    pub fn ln_pdf(&self, y: f64, sd: f64) -> f64 {
        let omega = self.scale * sd;
        let z = (y - self.location * sd) / omega;
        std::f64::consts::LN_2 - omega.ln() + ln_std_normal_pdf(z) + ln_std_normal_cdf(self.shape * z)
    }
}

/// Standardization of CSN(μ, σ²/u, δ) as a function of u, reusing one
/// direct-parameter evaluation: z(u) = (√u (y − μ) + σc)/(σk).
struct ScaledCsn {
    offset: f64,
    inv_scale: f64,
    shape: f64,
    centered_y: f64,
}

impl ScaledCsn {
    fn new(y: f64, p: &CenteredParams) -> Self {
        let dp = cp_to_dp(p);
        ScaledCsn {
            offset: p.mu() - dp.location,
            inv_scale: 1.0 / dp.scale,
            shape: dp.shape,
            centered_y: y - p.mu(),
        }
    }

    #[inline]
    fn z(&self, u: f64) -> f64 {
        (u.sqrt() * self.centered_y + self.offset) * self.inv_scale
    }

    #[inline]
    fn cdf(&self, u: f64) -> f64 {
        sn_cdf(self.z(u), self.shape)
    }

    #[inline]
    fn pdf(&self, u: f64) -> f64 {
        let z = self.z(u);
        2.0 * u.sqrt() * self.inv_scale * std_normal_pdf(z) * std_normal_cdf(self.shape * z)
    }
}

fn unit_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| QuadratureRule::standard(Domain::Finite(0.0, 1.0)))
}

fn half_line_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| QuadratureRule::standard(Domain::UpperHalfLine(0.0)))
}

fn check_normal(p: &CenteredParams, fam: &MixingFamily) -> Result<()> {
    if matches!(fam, MixingFamily::Normal) && p.delta() != 0.0 {
        return Err(Error::domain("the normal family has no skewness (delta must be 0)"));
    }
    Ok(())
}

/// Integrate `g(u)·f(u)` over the mixing law of a continuous family.
fn mix_continuous(fam: &MixingFamily, f: impl Fn(f64) -> f64) -> Result<f64> {
    let integral = match *fam {
        MixingFamily::Cst { .. } => integrate(
            |u| {
                let w = fam.ln_mixing_density(u);
                if w == f64::NEG_INFINITY {
                    0.0
                } else {
                    w.exp() * f(u)
                }
            },
            half_line_rule(),
            MIXING_TOL,
        ),
        MixingFamily::Css { nu } => integrate(
            |u| {
                if u <= 0.0 {
                    0.0
                } else {
                    nu * u.powf(nu - 1.0) * f(u)
                }
            },
            unit_rule(),
            MIXING_TOL,
        ),
        _ => unreachable!("atomic families are summed directly"),
    };
    integral.into_result()
}

/// CDF of SMCSN(μ, σ², δ, G(·|ν)) with k(u) = 1/u.
pub fn smcsn_cdf(y: f64, p: &CenteredParams, fam: &MixingFamily) -> Result<f64> {
    check_normal(p, fam)?;
    if y == f64::INFINITY {
        return Ok(1.0);
    }
    if y == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    match *fam {
        MixingFamily::Normal => Ok(std_normal_cdf((y - p.mu()) / p.sigma())),
        MixingFamily::Csn => Ok(csn_cdf(y, p)),
        MixingFamily::Cscn { nu1, nu2 } => {
            Ok(nu1 * csn_cdf(y, &p.rescaled(nu2)) + (1.0 - nu1) * csn_cdf(y, p))
        }
        MixingFamily::Cst { .. } | MixingFamily::Css { .. } => {
            let scaled = ScaledCsn::new(y, p);
            mix_continuous(fam, |u| scaled.cdf(u)).map(|v| v.clamp(0.0, 1.0))
        }
    }
}

/// Density of SMCSN(μ, σ², δ, G(·|ν)).
pub fn smcsn_pdf(y: f64, p: &CenteredParams, fam: &MixingFamily) -> Result<f64> {
    check_normal(p, fam)?;
    match *fam {
        MixingFamily::Normal => Ok(std_normal_pdf((y - p.mu()) / p.sigma()) / p.sigma()),
        MixingFamily::Csn => Ok(csn_pdf(y, p)),
        MixingFamily::Cscn { nu1, nu2 } => {
            Ok(nu1 * csn_pdf(y, &p.rescaled(nu2)) + (1.0 - nu1) * csn_pdf(y, p))
        }
        MixingFamily::Cst { .. } | MixingFamily::Css { .. } => {
            let scaled = ScaledCsn::new(y, p);
            mix_continuous(fam, |u| scaled.pdf(u))
        }
    }
}
