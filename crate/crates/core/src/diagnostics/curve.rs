use std::io::Write;

use serde::Serialize;

use crate::model::{BinaryDataset, ModelParams};
use crate::numerics::{equal_tailed_interval, mean};
use crate::par::{self, Execution};
use crate::smcsn::{MixingNodes, UnitCsn};
use crate::{Error, Result};

/// Posterior success-probability curve over a grid of linear predictors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkCurve {
    pub eta: Vec<f64>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub band_prob: f64,
}

impl LinkCurve {
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "eta,mean,lower,upper")?;
        for i in 0..self.eta.len() {
            writeln!(out, "{},{},{},{}", self.eta[i], self.mean[i], self.lower[i], self.upper[i])?;
        }
        Ok(())
    }
}

/// `F(η; δ, ν)` of one draw over the grid. The mixing integral uses the fixed
/// node rule, so every curve is a positive combination of CSN CDFs and hence
/// nondecreasing in η.
pub fn draw_curve(theta: &ModelParams, grid: &[f64]) -> Result<Vec<f64>> {
    let fam = theta.family.validated()?;
    let pos = UnitCsn::new(theta.delta)?;
    let neg = UnitCsn::new(-theta.delta)?;
    let nodes = MixingNodes::new(&fam);
    Ok(grid
        .iter()
        .map(|&eta| nodes.response_prob(eta, true, &pos, &neg).clamp(0.0, 1.0))
        .collect())
}

/// Pointwise posterior mean and equal-tailed `band_prob` band of the success
/// probability.
pub fn link_curve(params: &[ModelParams], grid: &[f64], band_prob: f64, exec: Execution) -> Result<LinkCurve> {
    if params.is_empty() {
        return Err(Error::domain("link curve needs at least one draw"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("link-curve grid must be finite"));
    }
    if !(band_prob > 0.0 && band_prob < 1.0) {
        return Err(Error::domain(format!("band probability {band_prob} not in (0, 1)")));
    }
    let curves = par::map_indices(params.len(), exec, |k| draw_curve(&params[k], grid))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut out = LinkCurve {
        eta: grid.to_vec(),
        mean: Vec::with_capacity(grid.len()),
        lower: Vec::with_capacity(grid.len()),
        upper: Vec::with_capacity(grid.len()),
        band_prob,
    };
    let mut column = vec![0.0; params.len()];
    for i in 0..grid.len() {
        for (c, curve) in column.iter_mut().zip(&curves) {
            *c = curve[i];
        }
        let (lo, hi) = equal_tailed_interval(&column, band_prob);
        out.mean.push(mean(&column));
        out.lower.push(lo);
        out.upper.push(hi);
    }
    Ok(out)
}

/// Posterior success probability of every row of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Predictions {
    /// Posterior mean linear predictor.
    pub eta: Vec<f64>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub band_prob: f64,
}

impl Predictions {
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "row,eta,prob,lower,upper")?;
        for i in 0..self.eta.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                i, self.eta[i], self.mean[i], self.lower[i], self.upper[i]
            )?;
        }
        Ok(())
    }
}

/// `F(xᵢᵀβ_k; δ_k, ν_k)` averaged over draws, with an equal-tailed band.
pub fn predict(params: &[ModelParams], data: &BinaryDataset, band_prob: f64, exec: Execution) -> Result<Predictions> {
    if params.is_empty() {
        return Err(Error::domain("prediction needs at least one draw"));
    }
    if !(band_prob > 0.0 && band_prob < 1.0) {
        return Err(Error::domain(format!("band probability {band_prob} not in (0, 1)")));
    }
    if let Some(t) = params.iter().find(|t| t.beta.len() != data.p()) {
        return Err(Error::domain(format!(
            "draw has {} coefficients for {} design columns",
            t.beta.len(),
            data.p()
        )));
    }
    let rows = par::map_indices(params.len(), exec, |k| -> Result<(Vec<f64>, Vec<f64>)> {
        let eta = data.linear_predictor(&params[k].beta);
        let p = draw_curve(&params[k], &eta)?;
        Ok((eta, p))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let n = data.n();
    let mut out = Predictions {
        eta: Vec::with_capacity(n),
        mean: Vec::with_capacity(n),
        lower: Vec::with_capacity(n),
        upper: Vec::with_capacity(n),
        band_prob,
    };
    let mut column = vec![0.0; params.len()];
    for i in 0..n {
        out.eta.push(rows.iter().map(|(e, _)| e[i]).sum::<f64>() / params.len() as f64);
        for (c, (_, p)) in column.iter_mut().zip(&rows) {
            *c = p[i];
        }
        let (lo, hi) = equal_tailed_interval(&column, band_prob);
        out.mean.push(mean(&column));
        out.lower.push(lo);
        out.upper.push(hi);
    }
    Ok(out)
}

/// Evenly spaced grid of `points` values on `[lo, hi]`.
pub fn eta_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        m => (0..m).map(|k| lo + (hi - lo) * k as f64 / (m - 1) as f64).collect(),
    }
}
