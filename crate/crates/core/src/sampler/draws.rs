use std::collections::BTreeMap;
use std::io::Write;
use std::time::Duration;

use serde::Serialize;

use super::config::ChainConfig;
use crate::model::{LatentState, ModelParams, ModelSpec};

/// Retained output of one chain.
#[derive(Debug, Clone)]
pub struct PosteriorDraws {
    pub spec: ModelSpec,
    pub config: ChainConfig,
    pub chain: u64,
    pub covariates: Vec<String>,
    pub params: Vec<ModelParams>,
    pub latents: Option<Vec<LatentState>>,
    /// Post-burn-in acceptance rate of every Metropolis block that ran.
    pub acceptance: Vec<(String, f64)>,
    pub jitter_events: usize,
    pub elapsed: Duration,
}

/// Reproducibility record written next to the draws.
#[derive(Debug, Clone, Serialize)]
pub struct ChainMeta {
    pub seed: u64,
    pub chain: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub retained: usize,
    pub spec: ModelSpec,
    pub config: ChainConfig,
    pub covariates: Vec<String>,
    pub parameters: Vec<String>,
    pub acceptance: BTreeMap<String, f64>,
    pub jitter_events: usize,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Column names in export order: β₀…β_{p−1}, δ, shape parameters, g, α.
    pub fn parameter_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.covariates.len()).map(|j| format!("beta{j}")).collect();
        if self.spec.link.delta_is_free() {
            names.push("delta".into());
        }
        names.extend(self.spec.link.family.shape_names().iter().map(|s| s.to_string()));
        if self.spec.prior.beta.samples_g() {
            names.push("g".into());
        }
        if self.spec.prior.beta.samples_alpha() {
            names.push("alpha".into());
        }
        names
    }

    fn value(&self, t: &ModelParams, name: &str) -> Option<f64> {
        if let Some(j) = name.strip_prefix("beta").and_then(|s| s.parse::<usize>().ok()) {
            return t.beta.get(j).copied();
        }
        match name {
            "delta" => Some(t.delta),
            "g" => Some(t.g),
            "alpha" => Some(t.alpha),
            _ => {
                let idx = self.spec.link.family.shape_names().iter().position(|s| *s == name)?;
                t.family.shape().get(idx).copied()
            }
        }
    }

    /// Retained draws of one parameter.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.params.iter().map(|t| self.value(t, name)).collect()
    }

    pub fn acceptance_rate(&self, block: &str) -> Option<f64> {
        self.acceptance.iter().find(|(b, _)| b == block).map(|(_, r)| *r)
    }

    /// Delimited table, one row per retained draw, preceded by `# ` comments.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let names = self.parameter_names();
        writeln!(out, "draw,{}", names.join(","))?;
        for (k, t) in self.params.iter().enumerate() {
            let row: Vec<String> = names
                .iter()
                .map(|n| format!("{}", self.value(t, n).expect("known column")))
                .collect();
            writeln!(out, "{},{}", k, row.join(","))?;
        }
        Ok(())
    }

    pub fn meta(&self) -> ChainMeta {
        ChainMeta {
            seed: self.config.seed,
            chain: self.chain,
            iterations: self.config.iterations,
            burn_in: self.config.burn_in,
            thin: self.config.thin,
            retained: self.len(),
            spec: self.spec,
            config: self.config,
            covariates: self.covariates.clone(),
            parameters: self.parameter_names(),
            acceptance: self.acceptance.iter().cloned().collect(),
            jitter_events: self.jitter_events,
        }
    }
}
