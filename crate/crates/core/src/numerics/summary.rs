//! Summaries of posterior draws and samples.

use crate::{Error, Result};

/// Minimum draw count accepted by [`hpd_interval`].
pub const MIN_HPD_DRAWS: usize = 50;

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (divisor n − 1).
pub fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    let ss: f64 = v.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (v.len() as f64 - 1.0)).sqrt()
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Linear-interpolation quantile (Hyndman-Fan type 7).
pub fn quantile(v: &[f64], p: f64) -> f64 {
    quantile_sorted(&sorted(v), p)
}

pub(crate) fn quantile_sorted(s: &[f64], p: f64) -> f64 {
    let n = s.len();
    if n == 1 {
        return s[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

pub fn median(v: &[f64]) -> f64 {
    quantile(v, 0.5)
}

/// Moment skewness `[Σ(v−v̄)³/n] / [Σ(v−v̄)²/n]^{3/2}`.
pub fn sample_skewness(v: &[f64]) -> Result<f64> {
    if v.len() < 3 {
        return Err(Error::domain("sample skewness needs at least three values"));
    }
    let n = v.len() as f64;
    let m = mean(v);
    let (m2, m3) = v.iter().fold((0.0, 0.0), |(s2, s3), &x| {
        let d = x - m;
        (s2 + d * d, s3 + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    let scale = m.abs().max(1.0);
    if !(m2 > (f64::EPSILON * scale).powi(2)) {
        return Err(Error::domain("sample skewness of a constant vector"));
    }
    Ok(m3 / m2.powf(1.5))
}

/// Highest posterior density interval estimated from draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hpd {
    pub lower: f64,
    pub upper: f64,
    /// The shortest window has zero width.
    pub degenerate: bool,
}

impl Hpd {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Shortest interval spanning `⌈prob·K⌉` sorted draws. Ties go to the
/// leftmost window.
pub fn hpd_interval(draws: &[f64], prob: f64) -> Result<Hpd> {
    if draws.len() < MIN_HPD_DRAWS {
        return Err(Error::domain(format!(
            "HPD interval needs at least {MIN_HPD_DRAWS} draws, got {}",
            draws.len()
        )));
    }
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::domain(format!("HPD probability {prob} not in (0, 1)")));
    }
    let s = sorted(draws);
    let k = s.len();
    let m = ((prob * k as f64).ceil() as usize).clamp(1, k);
    let mut best = 0;
    let mut best_width = f64::INFINITY;
    for i in 0..=(k - m) {
        let w = s[i + m - 1] - s[i];
        if w < best_width {
            best_width = w;
            best = i;
        }
    }
    Ok(Hpd {
        lower: s[best],
        upper: s[best + m - 1],
        degenerate: best_width == 0.0,
    })
}

/// Equal-tailed interval with mass `prob`.
pub fn equal_tailed_interval(draws: &[f64], prob: f64) -> (f64, f64) {
    let s = sorted(draws);
    let tail = 0.5 * (1.0 - prob);
    (quantile_sorted(&s, tail), quantile_sorted(&s, 1.0 - tail))
}

/// Half-sample mode (Bickel & Frühwirth): repeatedly keep the shortest
/// window holding half of the remaining sorted draws.
pub fn posterior_mode(draws: &[f64]) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::domain("mode of an empty sample"));
    }
    let s = sorted(draws);
    let mut x: &[f64] = &s;
    loop {
        match x.len() {
            1 => return Ok(x[0]),
            2 => return Ok(0.5 * (x[0] + x[1])),
            3 => {
                let left = x[1] - x[0];
                let right = x[2] - x[1];
                return Ok(if left < right {
                    0.5 * (x[0] + x[1])
                } else if left > right {
                    0.5 * (x[1] + x[2])
                } else {
                    x[1]
                });
            }
            n => {
                let k = n.div_ceil(2);
                let mut best = 0;
                let mut best_width = f64::INFINITY;
                for i in 0..=(n - k) {
                    let w = x[i + k - 1] - x[i];
                    if w < best_width {
                        best_width = w;
                        best = i;
                    }
                }
                x = &x[best..best + k];
            }
        }
    }
}
