use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{recommended_statistic, Statistic};
use crate::model::{LinkSpec, ModelSpec, PriorSpec, SignRegion};
use crate::sampler::ChainConfig;
use crate::smcsn::{FamilyKind, MixingFamily};
use crate::{Error, Result};

/// Chain-length profile of a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 6000 iterations, 4000 burn-in, thin 2.
    #[default]
    Desk,
    /// 60000 iterations, 40000 burn-in, thin 20.
    Full,
}

/// A replica study: the data-generating truth, the replica design and the
/// chain settings. Read from TOML:
///
/// ```toml
/// family = "cst"
/// beta = [1.0, 2.0]
/// delta = 0.99
/// shape = [3.0]
/// n = 250
/// replicas = 10
/// seed = 2024
///
/// [statistics]
/// nu = "median"
/// ```
///
/// Replica `r` simulates its dataset from stream `r` of the dataset purpose
/// and runs its chain on stream `r` of the chain purpose, both under `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub family: FamilyKind,
    /// True coefficients, intercept first; every other covariate is N(0, 1).
    pub beta: Vec<f64>,
    #[serde(default)]
    pub delta: f64,
    /// True shape parameters in `FamilyKind::shape_names` order.
    #[serde(default)]
    pub shape: Vec<f64>,
    pub n: usize,
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub preset: Preset,
    pub iterations: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    /// Point estimator per parameter; unlisted parameters use the
    /// recommended statistic of the family.
    #[serde(default)]
    pub statistics: BTreeMap<String, Statistic>,
    /// Coefficient prior of the fitted model (default hyper-g, α = 4).
    #[serde(default)]
    pub prior: PriorSpec,
}

impl StudySpec {
    pub fn new(family: MixingFamily, beta: Vec<f64>, delta: f64, n: usize, replicas: usize, seed: u64) -> Self {
        StudySpec {
            family: family.kind(),
            beta,
            delta,
            shape: family.shape(),
            n,
            replicas,
            seed,
            preset: Preset::Desk,
            iterations: None,
            burn_in: None,
            thin: None,
            statistics: BTreeMap::new(),
            prior: PriorSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: StudySpec = toml::from_str(text).map_err(|e| Error::Config(format!("study spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("study spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.replicas < 2 {
            return fail(format!("a study needs at least two replicas, got {}", self.replicas));
        }
        if self.beta.is_empty() || self.beta.iter().any(|b| !b.is_finite()) {
            return fail("true coefficients must be non-empty and finite".into());
        }
        if self.n < self.beta.len() + 1 {
            return fail(format!("n = {} too small for {} coefficients", self.n, self.beta.len()));
        }
        if self.family == FamilyKind::Normal {
            if self.delta != 0.0 {
                return fail(format!("the probit link has δ = 0, got {}", self.delta));
            }
        } else if !(self.delta > -1.0 && self.delta < 1.0) {
            return fail(format!("true δ = {} outside (−1, 1)", self.delta));
        }
        MixingFamily::from_shape(self.family, &self.shape)?;
        let names = self.parameter_names();
        if let Some(bad) = self.statistics.keys().find(|k| !names.contains(k)) {
            return fail(format!("statistic given for unknown parameter `{bad}`"));
        }
        self.prior.beta.validate()?;
        self.chain_config().validate()?;
        Ok(())
    }

    pub fn truth_family(&self) -> Result<MixingFamily> {
        MixingFamily::from_shape(self.family, &self.shape)
    }

    /// Sign region of the fitted model: the sign of the true δ, positive at
    /// zero.
    pub fn sign_region(&self) -> SignRegion {
        SignRegion::from_sign(if self.delta < 0.0 { -1 } else { 1 })
    }

    pub fn model_spec(&self) -> ModelSpec {
        let link = if self.family == FamilyKind::Normal {
            LinkSpec::probit()
        } else {
            LinkSpec::new(self.family, self.sign_region())
        };
        ModelSpec::new(link, self.prior)
    }

    pub fn chain_config(&self) -> ChainConfig {
        let base = match self.preset {
            Preset::Desk => ChainConfig::desk(self.seed),
            Preset::Full => ChainConfig::full(self.seed),
        };
        ChainConfig::new(
            self.iterations.unwrap_or(base.iterations),
            self.burn_in.unwrap_or(base.burn_in),
            self.thin.unwrap_or(base.thin),
            self.seed,
        )
    }

    /// Parameters with a known truth: β₀…, δ (skewed links), shape.
    pub fn parameter_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.beta.len()).map(|j| format!("beta{j}")).collect();
        if self.family.is_skewed() {
            names.push("delta".into());
        }
        names.extend(self.family.shape_names().iter().map(|s| s.to_string()));
        names
    }

    pub fn truths(&self) -> Vec<f64> {
        let mut t = self.beta.clone();
        if self.family.is_skewed() {
            t.push(self.delta);
        }
        t.extend_from_slice(&self.shape);
        t
    }

    pub fn statistic(&self, parameter: &str) -> Statistic {
        self.statistics
            .get(parameter)
            .copied()
            .unwrap_or_else(|| recommended_statistic(self.family, parameter))
    }
}
