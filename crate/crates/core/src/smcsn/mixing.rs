use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::distr::Open01;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest degrees of freedom accepted for the skew-t and skew-slash links.
pub const NU_MAX: f64 = 40.0;
/// Skew-t needs ν > 2 for a finite variance.
pub const CST_NU_MIN: f64 = 2.0;
/// Skew-slash needs ν > 1 for a finite variance.
pub const CSS_NU_MIN: f64 = 1.0;

/// Law of the mixing variable U in `Y = μ + U^{-1/2} Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum MixingFamily {
    /// P(U = 1) = 1 and δ = 0 (probit link).
    Normal,
    /// P(U = 1) = 1.
    Csn,
    /// U ~ gamma(ν/2, ν/2).
    Cst { nu: f64 },
    /// U ~ beta(ν, 1).
    Css { nu: f64 },
    /// U = ν₂ with probability ν₁, U = 1 otherwise.
    Cscn { nu1: f64, nu2: f64 },
}

/// Family tag without shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    #[serde(alias = "probit")]
    Normal,
    Csn,
    Cst,
    Css,
    Cscn,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::Normal,
        FamilyKind::Csn,
        FamilyKind::Cst,
        FamilyKind::Css,
        FamilyKind::Cscn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Normal => "probit",
            FamilyKind::Csn => "csn",
            FamilyKind::Cst => "cst",
            FamilyKind::Css => "css",
            FamilyKind::Cscn => "cscn",
        }
    }

    /// Family with the sampler's default starting shape.
    pub fn with_default_shape(&self) -> MixingFamily {
        match self {
            FamilyKind::Normal => MixingFamily::Normal,
            FamilyKind::Csn => MixingFamily::Csn,
            FamilyKind::Cst => MixingFamily::Cst { nu: 5.0 },
            FamilyKind::Css => MixingFamily::Css { nu: 3.0 },
            FamilyKind::Cscn => MixingFamily::Cscn { nu1: 0.5, nu2: 0.5 },
        }
    }

    pub fn shape_names(&self) -> &'static [&'static str] {
        match self {
            FamilyKind::Normal | FamilyKind::Csn => &[],
            FamilyKind::Cst | FamilyKind::Css => &["nu"],
            FamilyKind::Cscn => &["nu1", "nu2"],
        }
    }

    /// Whether the link carries a free skewness parameter.
    pub fn is_skewed(&self) -> bool {
        !matches!(self, FamilyKind::Normal)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "probit" | "normal" | "n" => Ok(FamilyKind::Normal),
            "csn" => Ok(FamilyKind::Csn),
            "cst" => Ok(FamilyKind::Cst),
            "css" => Ok(FamilyKind::Css),
            "cscn" => Ok(FamilyKind::Cscn),
            other => Err(Error::Config(format!("unknown link family `{other}`"))),
        }
    }
}

impl MixingFamily {
    pub fn cst(nu: f64) -> Result<Self> {
        MixingFamily::Cst { nu }.validated()
    }

    pub fn css(nu: f64) -> Result<Self> {
        MixingFamily::Css { nu }.validated()
    }

    pub fn cscn(nu1: f64, nu2: f64) -> Result<Self> {
        MixingFamily::Cscn { nu1, nu2 }.validated()
    }

    /// Checks the shape bounds and returns `self` when they hold.
    pub fn validated(self) -> Result<Self> {
        match self {
            MixingFamily::Normal | MixingFamily::Csn => Ok(self),
            MixingFamily::Cst { nu } if nu > CST_NU_MIN && nu <= NU_MAX => Ok(self),
            MixingFamily::Cst { nu } => Err(Error::domain(format!(
                "skew-t degrees of freedom {nu} outside ({CST_NU_MIN}, {NU_MAX}]"
            ))),
            MixingFamily::Css { nu } if nu > CSS_NU_MIN && nu <= NU_MAX => Ok(self),
            MixingFamily::Css { nu } => Err(Error::domain(format!(
                "skew-slash shape {nu} outside ({CSS_NU_MIN}, {NU_MAX}]"
            ))),
            MixingFamily::Cscn { nu1, nu2 } if in_unit(nu1) && in_unit(nu2) => Ok(self),
            MixingFamily::Cscn { nu1, nu2 } => Err(Error::domain(format!(
                "contaminated-normal parameters ({nu1}, {nu2}) must lie in (0, 1)"
            ))),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            MixingFamily::Normal => FamilyKind::Normal,
            MixingFamily::Csn => FamilyKind::Csn,
            MixingFamily::Cst { .. } => FamilyKind::Cst,
            MixingFamily::Css { .. } => FamilyKind::Css,
            MixingFamily::Cscn { .. } => FamilyKind::Cscn,
        }
    }

    pub fn shape(&self) -> Vec<f64> {
        match *self {
            MixingFamily::Normal | MixingFamily::Csn => vec![],
            MixingFamily::Cst { nu } | MixingFamily::Css { nu } => vec![nu],
            MixingFamily::Cscn { nu1, nu2 } => vec![nu1, nu2],
        }
    }

    /// Build a family of `kind` from a shape vector as returned by [`shape`](Self::shape).
    pub fn from_shape(kind: FamilyKind, shape: &[f64]) -> Result<Self> {
        let want = kind.shape_names().len();
        if shape.len() != want {
            return Err(Error::Config(format!(
                "{kind} takes {want} shape parameter(s), got {}",
                shape.len()
            )));
        }
        match kind {
            FamilyKind::Normal => Ok(MixingFamily::Normal),
            FamilyKind::Csn => Ok(MixingFamily::Csn),
            FamilyKind::Cst => MixingFamily::cst(shape[0]),
            FamilyKind::Css => MixingFamily::css(shape[0]),
            FamilyKind::Cscn => MixingFamily::cscn(shape[0], shape[1]),
        }
    }

    /// Whether U is degenerate at one.
    pub fn is_unit_mixing(&self) -> bool {
        matches!(self, MixingFamily::Normal | MixingFamily::Csn)
    }

    /// Draw U from its mixing law.
    pub fn sample_mixing<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            MixingFamily::Normal | MixingFamily::Csn => 1.0,
            MixingFamily::Cst { nu } => Gamma::new(0.5 * nu, 2.0 / nu)
                .expect("validated shape")
                .sample(rng),
            MixingFamily::Css { nu } => {
                let v: f64 = Open01.sample(rng);
                v.powf(1.0 / nu)
            }
            MixingFamily::Cscn { nu1, nu2 } => {
                if rng.random::<f64>() < nu1 {
                    nu2
                } else {
                    1.0
                }
            }
        }
    }

    /// E(U⁻¹), the variance inflation of the mixture.
    pub fn mixing_einv(&self) -> f64 {
        match *self {
            MixingFamily::Normal | MixingFamily::Csn => 1.0,
            MixingFamily::Cst { nu } => nu / (nu - 2.0),
            MixingFamily::Css { nu } => nu / (nu - 1.0),
            MixingFamily::Cscn { nu1, nu2 } => (nu1 + nu2 * (1.0 - nu1)) / nu2,
        }
    }

    /// Log of the mixing density (continuous families) or probability
    /// function (atomic families) at `u`.
    pub fn ln_mixing_density(&self, u: f64) -> f64 {
        match *self {
            MixingFamily::Normal | MixingFamily::Csn => {
                if u == 1.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            MixingFamily::Cst { nu } => {
                if !(u > 0.0) || !u.is_finite() {
                    return f64::NEG_INFINITY;
                }
                let k = 0.5 * nu;
                k * k.ln() - libm::lgamma(k) + (k - 1.0) * u.ln() - k * u
            }
            MixingFamily::Css { nu } => {
                if !(u > 0.0 && u <= 1.0) {
                    return f64::NEG_INFINITY;
                }
                nu.ln() + (nu - 1.0) * u.ln()
            }
            MixingFamily::Cscn { nu1, nu2 } => {
                let mut p = 0.0;
                if u == nu2 {
                    p += nu1;
                }
                if u == 1.0 {
                    p += 1.0 - nu1;
                }
                p.ln()
            }
        }
    }
}

fn in_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}
