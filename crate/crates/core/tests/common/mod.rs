#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use smcsn_link::model::{BinaryDataset, Covariate, LatentState, ModelParams};
use smcsn_link::sampler::ChainState;
use smcsn_link::smcsn::MixingFamily;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Kolmogorov limiting survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov p-value (asymptotic, with the usual
/// small-sample correction).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = (n * m / (n + m)).sqrt();
    kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)
}

/// Pearson χ² p-value of observed counts against expected probabilities.
pub fn chi_square_pvalue(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * total as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let dof = (counts.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// Mean and batch-means standard error of an autocorrelated series.
pub fn batch_mean_se(v: &[f64], batches: usize) -> (f64, f64) {
    let size = v.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| v[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (m, (var / batches as f64).sqrt())
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Intercept plus one N(0,1) covariate, responses alternating.
pub fn small_dataset<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BinaryDataset {
    let x: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let y: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    BinaryDataset::from_columns(y, vec![(Covariate::continuous("x1"), x)]).unwrap()
}

/// Dataset of `n` identical rows (intercept only), all with response `y`.
pub fn replicated_dataset(n: usize, y: bool) -> BinaryDataset {
    BinaryDataset::from_columns(vec![y; n], vec![]).unwrap()
}

/// A random frozen state: β, δ and ν drawn at random, latents on the side
/// required by y.
pub fn random_state<R: Rng + ?Sized>(data: &BinaryDataset, fam: MixingFamily, rng: &mut R) -> ChainState {
    let p = data.p();
    let beta: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
    let delta = rng.random_range(-0.95..0.95);
    let n = data.n();
    let u: Vec<f64> = (0..n).map(|_| fam.sample_mixing(rng)).collect();
    let h: Vec<f64> = (0..n).map(|_| normal(rng).abs()).collect();
    let z: Vec<f64> = data
        .y()
        .iter()
        .map(|&y| {
            let v = normal(rng).abs() + 0.01;
            if y { v } else { -v }
        })
        .collect();
    let theta = ModelParams {
        beta,
        delta,
        family: fam,
        g: 1.0 + rng.random::<f64>() * 5.0,
        alpha: 4.0,
    };
    ChainState::new(theta, LatentState { z, h, u }, data)
}
