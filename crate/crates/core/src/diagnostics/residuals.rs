use serde::{Deserialize, Serialize};

use crate::model::BinaryDataset;
use crate::numerics::sample_skewness;
use crate::par::{self, Execution};
use crate::sampler::PosteriorDraws;
use crate::smcsn::{latent_terms, B};
use crate::{Error, Result};

/// Latent residual of one observation under one draw:
///
/// ```text
/// ε = (√u (z − η) + Δ(h − b)) / √τ
/// ```
///
/// Given the latent representation `z = η + u^{-1/2}[Δ(b − h) + √τ T]` this
/// returns exactly `T`, which is standard normal a priori.
#[inline]
pub fn latent_residual(z: f64, eta: f64, h: f64, u: f64, delta: f64) -> f64 {
    let (loading, tau) = latent_terms(delta);
    (u.sqrt() * (z - eta) + loading * (h - B)) / tau.sqrt()
}

/// Which point summary of the residual draws is compared with the normal
/// envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualSeries {
    /// Posterior mean of the order statistics. Each draw's residual vector is
    /// a priori a standard-normal sample, so this series is calibrated
    /// against the envelope.
    #[default]
    OrderedMean,
    /// Posterior mean residual of each observation. These are shrunk towards
    /// zero (spread well below one for binary data) and sit inside the band
    /// only near the centre.
    PosteriorMean,
}

/// Residuals of every retained draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualDraws {
    /// `values[k][i]`: residual of observation `i` under draw `k`.
    pub values: Vec<Vec<f64>>,
    /// Posterior mean residual of each observation.
    pub posterior_mean: Vec<f64>,
    /// Sample skewness of each draw's residual vector; NaN when undefined
    /// (fewer than three observations or a constant vector).
    pub skewness: Vec<f64>,
}

impl ResidualDraws {
    /// Wrap a K×n table of residuals, computing the per-observation means and
    /// per-draw skewness.
    pub fn from_values(values: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.first().map_or(0, Vec::len);
        if values.is_empty() || n == 0 {
            return Err(Error::domain("residual table is empty"));
        }
        if values.iter().any(|row| row.len() != n) {
            return Err(Error::domain("residual rows have different lengths"));
        }
        let k = values.len() as f64;
        let posterior_mean = (0..n).map(|i| values.iter().map(|r| r[i]).sum::<f64>() / k).collect();
        let skewness = values.iter().map(|r| sample_skewness(r).unwrap_or(f64::NAN)).collect();
        Ok(ResidualDraws {
            values,
            posterior_mean,
            skewness,
        })
    }

    /// Posterior mean of each order statistic: every draw's residual vector
    /// is sorted, and the sorted vectors are averaged.
    pub fn ordered_mean(&self) -> Vec<f64> {
        let n = self.observations();
        let mut acc = vec![0.0; n];
        let mut sorted = vec![0.0; n];
        for row in &self.values {
            sorted.copy_from_slice(row);
            sorted.sort_by(f64::total_cmp);
            for (a, v) in acc.iter_mut().zip(&sorted) {
                *a += v;
            }
        }
        let k = self.draws() as f64;
        acc.iter().map(|a| a / k).collect()
    }

    pub fn series(&self, kind: ResidualSeries) -> Vec<f64> {
        match kind {
            ResidualSeries::OrderedMean => self.ordered_mean(),
            ResidualSeries::PosteriorMean => self.posterior_mean.clone(),
        }
    }

    pub fn draws(&self) -> usize {
        self.values.len()
    }

    pub fn observations(&self) -> usize {
        self.posterior_mean.len()
    }
}

/// Residuals for every retained draw of a chain fitted to `data`.
pub fn latent_residuals(draws: &PosteriorDraws, data: &BinaryDataset) -> Result<ResidualDraws> {
    let Some(latents) = draws.latents.as_ref() else {
        return Err(Error::Config(
            "latent residuals need the retained latent draws; rerun the chain with keep_latents enabled".into(),
        ));
    };
    if latents.len() != draws.params.len() {
        return Err(Error::domain("latent and parameter draw counts differ"));
    }
    if latents.iter().any(|l| l.len() != data.n()) {
        return Err(Error::domain(format!(
            "latent draws do not match the dataset's {} observations",
            data.n()
        )));
    }
    let values = par::map_indices(draws.params.len(), Execution::available(), |k| {
        let theta = &draws.params[k];
        let lat = &latents[k];
        let eta = data.linear_predictor(&theta.beta);
        (0..data.n())
            .map(|i| latent_residual(lat.z[i], eta[i], lat.h[i], lat.u[i], theta.delta))
            .collect()
    });
    ResidualDraws::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn inverts_the_latent_representation() {
        let mut rng = streams::master(81);
        for _ in 0..100 {
            let x: f64 = StandardNormal.sample(&mut rng);
            let eta = 3.0 * x;
            let delta: f64 = rng.random_range(-0.999..0.999);
            let u: f64 = rng.random_range(0.01..5.0);
            let h: f64 = StandardNormal.sample(&mut rng);
            let h = h.abs();
            let t: f64 = StandardNormal.sample(&mut rng);
            let (loading, tau) = latent_terms(delta);
            let z = eta + (loading * (B - h) + tau.sqrt() * t) / u.sqrt();
            assert!((latent_residual(z, eta, h, u, delta) - t).abs() < 1e-10);
        }
    }

    #[test]
    fn probit_residual_is_raw_latent_residual() {
        assert_eq!(latent_residual(1.3, 0.4, 0.9, 1.0, 0.0), 1.3 - 0.4);
    }

    #[test]
    fn summaries_of_a_table() {
        let r = ResidualDraws::from_values(vec![vec![1.0, 2.0, 6.0], vec![3.0, 2.0, 0.0]]).unwrap();
        assert_eq!(r.posterior_mean, vec![2.0, 2.0, 3.0]);
        assert!(r.skewness[0] > 0.0 && r.skewness[1] < 0.0);
        assert!(ResidualDraws::from_values(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert_eq!(r.ordered_mean(), vec![0.5, 2.0, 4.5]);
        assert_eq!(r.series(ResidualSeries::PosteriorMean), r.posterior_mean);
        let one = ResidualDraws::from_values(vec![vec![0.5]]).unwrap();
        assert!(one.skewness[0].is_nan());
    }
}
