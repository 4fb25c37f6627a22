use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::data::{BinaryDataset, Covariate, CovariateKind};
use crate::numerics::{mean, std_dev};
use crate::smcsn::{smcsn_sample, CenteredParams, MixingFamily};
use crate::{Error, Result};

/// A synthetic dataset together with the latent propensities that produced it.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub data: BinaryDataset,
    pub z: Vec<f64>,
}

/// Generate `Y = I(Z > 0)` with `Z = Xβ + ε`, `ε ~ SMCSN(0, 1, −δ)`, so that
/// `P(Y = 1 | x) = F(xᵀβ; δ)`. Every non-intercept covariate is drawn N(0, 1)
/// and standardized to sample mean 0, sample sd 1.
pub fn simulate_dataset<R: Rng + ?Sized>(
    beta: &[f64],
    delta: f64,
    fam: &MixingFamily,
    n: usize,
    rng: &mut R,
) -> Result<SimulatedData> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 observations, got {n}")));
    }
    if beta.is_empty() || n < beta.len() {
        return Err(Error::Config(format!(
            "{} coefficients for {n} observations",
            beta.len()
        )));
    }
    if matches!(fam, MixingFamily::Normal) && delta != 0.0 {
        return Err(Error::domain("the probit link has δ = 0"));
    }
    let fam = fam.validated()?;
    let noise = CenteredParams::standard(-delta)?;
    let mut columns = Vec::with_capacity(beta.len() - 1);
    for j in 1..beta.len() {
        let raw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let (m, s) = (mean(&raw), std_dev(&raw));
        let cov = Covariate {
            name: format!("x{j}"),
            kind: CovariateKind::Continuous {
                standardization: Some((m, s)),
            },
        };
        columns.push((cov, raw.iter().map(|v| (v - m) / s).collect::<Vec<_>>()));
    }
    let z: Vec<f64> = (0..n)
        .map(|i| {
            let eta = beta[0] + (1..beta.len()).map(|j| beta[j] * columns[j - 1].1[i]).sum::<f64>();
            eta + smcsn_sample(&noise, &fam, rng)
        })
        .collect();
    let y = z.iter().map(|&v| v > 0.0).collect();
    let data = BinaryDataset::from_columns(y, columns).map_err(Error::Data)?;
    Ok(SimulatedData { data, z })
}
