use rand::Rng;
use rand::distr::Open01;
use rand_distr::{Distribution, Exp1};

use super::normal::{std_normal_cdf, std_normal_quantile, std_normal_sf};
use crate::{Error, Result};

/// Standardized truncation points beyond which the inverse CDF gives way to
/// exponential rejection.
const TAIL_START: f64 = 3.0;

/// Draw from N(mean, variance) restricted to the open interval (lower, upper).
/// Either bound may be infinite.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    mean: f64,
    variance: f64,
    lower: f64,
    upper: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() || !mean.is_finite() {
        return Err(Error::domain(format!(
            "truncated normal needs finite mean and positive variance, got ({mean}, {variance})"
        )));
    }
    if lower.is_nan() || upper.is_nan() || lower >= upper {
        return Err(Error::domain(format!("empty truncation interval ({lower}, {upper})")));
    }
    let sd = variance.sqrt();
    let a = (lower - mean) / sd;
    let b = (upper - mean) / sd;
    if !(a < b) {
        return Err(Error::domain(format!(
            "truncation interval ({lower}, {upper}) vanishes at scale {sd}"
        )));
    }
    loop {
        let x = mean + sd * sample_truncated_standard(a, b, rng);
        // Guard against the affine map rounding onto a bound.
        if x > lower && x < upper {
            return Ok(x);
        }
    }
}

/// Draw from the standard normal restricted to (a, b), with a < b.
pub fn sample_truncated_standard<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    debug_assert!(a < b);
    if a >= 0.0 {
        upper_side(a, b, rng)
    } else if b <= 0.0 {
        -upper_side(-b, -a, rng)
    } else {
        loop {
            let pa = std_normal_cdf(a);
            let pb = std_normal_cdf(b);
            let u: f64 = Open01.sample(rng);
            let x = std_normal_quantile(pa + (pb - pa) * u);
            if x > a && x < b {
                return x;
            }
        }
    }
}

/// Truncation interval entirely on the right of the mode: 0 ≤ a < b.
fn upper_side<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    if a > TAIL_START {
        return if b - a < 1.0 / a {
            narrow_tail(a, b, rng)
        } else {
            exponential_tail(a, b, rng)
        };
    }
    // Inverse CDF on upper-tail probabilities, which stay accurate as a grows.
    let qa = std_normal_sf(a);
    let qb = std_normal_sf(b);
    loop {
        let u: f64 = Open01.sample(rng);
        let x = -std_normal_quantile(qb + (qa - qb) * u);
        if x > a && x < b {
            return x;
        }
    }
}

/// Robert (1995) translated-exponential proposal with the optimal rate.
fn exponential_tail<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let e: f64 = Exp1.sample(rng);
        let x = a + e / rate;
        if x <= a || x >= b {
            continue;
        }
        let d = x - rate;
        let u: f64 = Open01.sample(rng);
        if u.ln() <= -0.5 * d * d {
            return x;
        }
    }
}

/// Uniform proposal on a short interval far in the tail.
fn narrow_tail<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    loop {
        let u: f64 = Open01.sample(rng);
        let x = a + (b - a) * u;
        if x <= a || x >= b {
            continue;
        }
        let v: f64 = Open01.sample(rng);
        if v.ln() <= -0.5 * (x - a) * (x + a) {
            return x;
        }
    }
}
