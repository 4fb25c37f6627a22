//! Adaptive rejection sampling (tangent hull) for log-concave densities on
//! a half line.

use rand::Rng;

use crate::{Error, Result};

const MAX_POINTS: usize = 40;
const MAX_TRIALS: usize = 10_000;

struct Hull {
    x: Vec<f64>,
    h: Vec<f64>,
    d: Vec<f64>,
    lower: f64,
    /// Breakpoints z₀ = lower < z₁ < … < z_k = ∞.
    z: Vec<f64>,
    /// Log mass of each piece of the piecewise-exponential envelope.
    log_mass: Vec<f64>,
}

impl Hull {
    fn build(&mut self) {
        let k = self.x.len();
        self.z.clear();
        self.z.push(self.lower);
        for j in 0..k - 1 {
            let (x0, x1, h0, h1, d0, d1) = (self.x[j], self.x[j + 1], self.h[j], self.h[j + 1], self.d[j], self.d[j + 1]);
            let zj = if (d0 - d1).abs() > 1e-12 * (d0.abs() + d1.abs()).max(1e-300) {
                (h1 - h0 - x1 * d1 + x0 * d0) / (d0 - d1)
            } else {
                0.5 * (x0 + x1)
            };
            self.z.push(zj.clamp(x0, x1));
        }
        self.z.push(f64::INFINITY);
        self.log_mass = (0..k)
            .map(|j| piece_log_mass(self.upper_at(j, self.z[j]), self.d[j], self.z[j + 1] - self.z[j]))
            .collect();
    }

    #[inline]
    fn upper_at(&self, j: usize, x: f64) -> f64 {
        self.h[j] + self.d[j] * (x - self.x[j])
    }

    fn insert(&mut self, x: f64, h: f64, d: f64) {
        let pos = self.x.partition_point(|&v| v < x);
        if self.x.get(pos) == Some(&x) {
            return;
        }
        self.x.insert(pos, x);
        self.h.insert(pos, h);
        self.d.insert(pos, d);
        self.build();
    }
}

/// log ∫₀^w exp(u₀ + d t) dt, anchored at whichever end is higher so that
/// nothing overflows.
fn piece_log_mass(u0: f64, d: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if w.is_infinite() {
        return u0 - (-d).ln();
    }
    let dw = d * w;
    if dw.abs() < 1e-10 {
        return u0 + w.ln();
    }
    if d < 0.0 {
        u0 + (dw.exp_m1() / d).ln()
    } else {
        u0 + dw + ((-dw).exp_m1() / -d).ln()
    }
}

/// Draw from the density ∝ exp(l(x)) on (lower, ∞), where `l` is concave and
/// `eval` returns (l(x), l'(x)). `init` are interior starting abscissae; the
/// slope at the largest of them must be negative.
pub fn sample_log_concave<R, F>(eval: F, lower: f64, init: &[f64], rng: &mut R) -> Result<f64>
where
    R: Rng + ?Sized,
    F: Fn(f64) -> (f64, f64),
{
    let mut pts: Vec<f64> = init.iter().copied().filter(|&x| x > lower && x.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.is_empty() {
        return Err(Error::domain("adaptive rejection sampler needs a starting point"));
    }
    let (h, d): (Vec<f64>, Vec<f64>) = pts.iter().map(|&x| eval(x)).unzip();
    if !(d[d.len() - 1] < 0.0) || h.iter().chain(&d).any(|v| !v.is_finite()) {
        return Err(Error::domain("adaptive rejection sampler: invalid starting hull"));
    }
    let mut hull = Hull {
        x: pts,
        h,
        d,
        lower,
        z: Vec::new(),
        log_mass: Vec::new(),
    };
    hull.build();
    for _ in 0..MAX_TRIALS {
        let top = hull.log_mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = hull.log_mass.iter().map(|m| (m - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut pick = rng.random::<f64>() * total;
        let mut j = 0;
        while j + 1 < weights.len() && pick >= weights[j] {
            pick -= weights[j];
            j += 1;
        }
        let (lo, hi, dj) = (hull.z[j], hull.z[j + 1], hull.d[j]);
        let v: f64 = rng.random();
        let x = if dj.abs() < 1e-12 && hi.is_finite() {
            lo + v * (hi - lo)
        } else if hi.is_infinite() {
            lo + (-v).ln_1p() / dj
        } else if dj < 0.0 {
            lo + (v * (dj * (hi - lo)).exp_m1()).ln_1p() / dj
        } else {
            hi + (v + (1.0 - v) * (-dj * (hi - lo)).exp()).ln() / dj
        };
        if !(x > lower) || !x.is_finite() {
            continue;
        }
        let (lx, dx) = eval(x);
        let log_ratio = lx - hull.upper_at(j, x);
        if rng.random::<f64>().ln() < log_ratio {
            return Ok(x);
        }
        if hull.x.len() < MAX_POINTS && lx.is_finite() && dx.is_finite() {
            hull.insert(x, lx, dx);
        }
    }
    Err(Error::domain(format!(
        "adaptive rejection sampler made no acceptance in {MAX_TRIALS} trials"
    )))
}
