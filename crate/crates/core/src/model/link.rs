use serde::{Deserialize, Serialize};

use super::prior::PriorSpec;
use crate::smcsn::{smcsn_cdf, CenteredParams, FamilyKind, MixingFamily};
use crate::{Error, Result};

/// The interval A to which δ is confined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignRegion {
    /// A = (0, 1).
    Positive,
    /// A = (−1, 0).
    Negative,
}

impl SignRegion {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            SignRegion::Positive => (0.0, 1.0),
            SignRegion::Negative => (-1.0, 0.0),
        }
    }

    pub fn contains(&self, delta: f64) -> bool {
        let (lo, hi) = self.bounds();
        delta > lo && delta < hi
    }

    pub fn midpoint(&self) -> f64 {
        let (lo, hi) = self.bounds();
        0.5 * (lo + hi)
    }

    pub fn from_sign(sign: i32) -> Self {
        if sign >= 0 {
            SignRegion::Positive
        } else {
            SignRegion::Negative
        }
    }

    pub fn sign(&self) -> i32 {
        match self {
            SignRegion::Positive => 1,
            SignRegion::Negative => -1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SignRegion::Positive => "pos",
            SignRegion::Negative => "neg",
        }
    }
}

/// Which link is fitted. The probit family pins δ at zero and ignores the
/// sign region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub family: FamilyKind,
    pub sign_region: SignRegion,
}

impl LinkSpec {
    pub fn new(family: FamilyKind, sign_region: SignRegion) -> Self {
        LinkSpec {
            family,
            sign_region,
        }
    }

    pub fn probit() -> Self {
        Self::new(FamilyKind::Normal, SignRegion::Positive)
    }

    pub fn delta_is_free(&self) -> bool {
        self.family.is_skewed()
    }

    /// δ admissible under this link.
    pub fn admits_delta(&self, delta: f64) -> bool {
        if self.delta_is_free() {
            self.sign_region.contains(delta)
        } else {
            delta == 0.0
        }
    }
}

/// Link plus priors: everything but the data that defines the posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub link: LinkSpec,
    pub prior: PriorSpec,
}

impl ModelSpec {
    pub fn new(link: LinkSpec, prior: PriorSpec) -> Self {
        ModelSpec { link, prior }
    }
}

/// θ = (β, δ, ν) together with the hyper-g scale g and exponent α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: Vec<f64>,
    pub delta: f64,
    pub family: MixingFamily,
    pub g: f64,
    pub alpha: f64,
}

impl ModelParams {
    pub fn with_beta(beta: Vec<f64>, delta: f64, family: MixingFamily) -> Self {
        ModelParams {
            beta,
            delta,
            family,
            g: 1.0,
            alpha: 4.0,
        }
    }

    pub fn check(&self, link: &LinkSpec) -> Result<()> {
        if self.family.kind() != link.family {
            return Err(Error::Config(format!(
                "parameters carry a {} family, the link is {}",
                self.family.kind(),
                link.family
            )));
        }
        if !link.admits_delta(self.delta) {
            return Err(Error::domain(format!("δ = {} outside the sign region", self.delta)));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::domain(format!("g = {} must be positive", self.g)));
        }
        if self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::domain("non-finite regression coefficient"));
        }
        self.family.validated().map(|_| ())
    }

    pub fn success_prob(&self, eta: f64) -> Result<f64> {
        success_prob(eta, self.delta, &self.family)
    }
}

/// P(Y = 1 | η) = F(η; 0, 1, δ, G(·|ν)).
pub fn success_prob(eta: f64, delta: f64, fam: &MixingFamily) -> Result<f64> {
    if eta == f64::INFINITY {
        return Ok(1.0);
    }
    if eta == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    smcsn_cdf(eta, &CenteredParams::standard(delta)?, fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_cdf;
    use crate::smcsn::smcsn_sample;
    use crate::streams;

    #[test]
    fn probit_special_case() {
        for i in 0..=120 {
            let eta = -6.0 + 0.1 * i as f64;
            let p = success_prob(eta, 0.0, &MixingFamily::Normal).unwrap();
            assert!((p - std_normal_cdf(eta)).abs() <= 1e-12);
            let q = success_prob(eta, 0.0, &MixingFamily::Csn).unwrap();
            assert!((q - std_normal_cdf(eta)).abs() <= 1e-12);
        }
    }

    #[test]
    fn limits_and_monotonicity() {
        let fam = MixingFamily::cst(3.0).unwrap();
        assert_eq!(success_prob(f64::INFINITY, 0.9, &fam).unwrap(), 1.0);
        assert_eq!(success_prob(f64::NEG_INFINITY, 0.9, &fam).unwrap(), 0.0);
        // ν = 3 tails decay like |η|⁻³.
        assert!(success_prob(60.0, 0.9, &fam).unwrap() > 1.0 - 1e-4);
        assert!(success_prob(-60.0, 0.9, &fam).unwrap() < 1e-4);
        let mut prev = 0.0;
        for i in 0..=80 {
            let p = success_prob(-8.0 + 0.2 * i as f64, 0.9, &fam).unwrap();
            assert!(p >= prev - 1e-9);
            prev = p;
        }
    }

    #[test]
    fn latent_representation_matches_link() {
        // Z = η + ε with ε ~ SMCSN(0, 1, −δ) gives P(Z > 0) = F(η; δ).
        let (eta, delta) = (1.0, 0.95);
        let fam = MixingFamily::cst(3.0).unwrap();
        let noise = CenteredParams::standard(-delta).unwrap();
        let mut rng = streams::master(7);
        let k = 1_000_000;
        let hits = (0..k)
            .filter(|_| eta + smcsn_sample(&noise, &fam, &mut rng) > 0.0)
            .count();
        let emp = hits as f64 / k as f64;
        let p = success_prob(eta, delta, &fam).unwrap();
        let se = (p * (1.0 - p) / k as f64).sqrt();
        assert!((emp - p).abs() < 4.0 * se, "{emp} vs {p}");
    }

    #[test]
    fn sign_region_bounds() {
        assert!(SignRegion::Positive.contains(0.5));
        assert!(!SignRegion::Positive.contains(-0.5));
        assert!(!SignRegion::Negative.contains(0.0));
        assert_eq!(SignRegion::Negative.midpoint(), -0.5);
    }
}
