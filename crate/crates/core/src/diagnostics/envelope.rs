use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::residuals::{ResidualDraws, ResidualSeries};
use crate::numerics::{quantile, std_normal_quantile};
use crate::{Error, Result};

pub const DEFAULT_REPLICATES: usize = 200;
pub const DEFAULT_BAND_PROB: f64 = 0.95;
pub const MIN_REPLICATES: usize = 100;

/// Simulated normal envelope of a residual series.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeBand {
    /// Blom plotting positions Φ⁻¹((i − 3/8)/(n + 1/4)).
    pub theoretical: Vec<f64>,
    /// Sorted observed residuals.
    pub observed: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub band_prob: f64,
}

impl EnvelopeBand {
    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    /// Fraction of observed order statistics inside `[lower, upper]`.
    pub fn fraction_inside(&self) -> f64 {
        let inside = (0..self.len())
            .filter(|&i| self.lower[i] <= self.observed[i] && self.observed[i] <= self.upper[i])
            .count();
        inside as f64 / self.len() as f64
    }

    /// Fraction of observed order statistics strictly above the band.
    pub fn fraction_above(&self) -> f64 {
        (0..self.len()).filter(|&i| self.observed[i] > self.upper[i]).count() as f64 / self.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "theoretical,observed,lower,upper")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{}",
                self.theoretical[i], self.observed[i], self.lower[i], self.upper[i]
            )?;
        }
        Ok(())
    }
}

/// Envelope of the posterior-mean order statistics of the residuals.
pub fn normal_envelope<R: Rng + ?Sized>(
    res: &ResidualDraws,
    replicates: usize,
    band_prob: f64,
    rng: &mut R,
) -> Result<EnvelopeBand> {
    residual_envelope(res, ResidualSeries::default(), replicates, band_prob, rng)
}

pub fn residual_envelope<R: Rng + ?Sized>(
    res: &ResidualDraws,
    kind: ResidualSeries,
    replicates: usize,
    band_prob: f64,
    rng: &mut R,
) -> Result<EnvelopeBand> {
    series_envelope(&res.series(kind), replicates, band_prob, rng)
}

/// Envelope of an arbitrary series against standard-normal samples of the
/// same size: `replicates` sorted N(0,1) samples give, per order statistic,
/// the empirical `(1 ± band_prob)/2` quantiles.
pub fn series_envelope<R: Rng + ?Sized>(
    series: &[f64],
    replicates: usize,
    band_prob: f64,
    rng: &mut R,
) -> Result<EnvelopeBand> {
    if replicates < MIN_REPLICATES {
        return Err(Error::domain(format!(
            "envelope needs at least {MIN_REPLICATES} replicates, got {replicates}"
        )));
    }
    if !(band_prob > 0.0 && band_prob < 1.0) {
        return Err(Error::domain(format!("band probability {band_prob} not in (0, 1)")));
    }
    if series.is_empty() || series.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("envelope series must be non-empty and finite"));
    }
    let n = series.len();
    let mut observed = series.to_vec();
    observed.sort_by(f64::total_cmp);

    // sims[i][r]: i-th order statistic of replicate r.
    let mut sims = vec![Vec::with_capacity(replicates); n];
    let mut sample = vec![0.0; n];
    for _ in 0..replicates {
        for v in sample.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        sample.sort_by(f64::total_cmp);
        for (col, &v) in sims.iter_mut().zip(&sample) {
            col.push(v);
        }
    }
    let lo_p = 0.5 * (1.0 - band_prob);
    let hi_p = 0.5 * (1.0 + band_prob);
    let lower = sims.iter().map(|c| quantile(c, lo_p)).collect();
    let upper = sims.iter().map(|c| quantile(c, hi_p)).collect();
    let theoretical = (1..=n)
        .map(|i| std_normal_quantile((i as f64 - 0.375) / (n as f64 + 0.25)))
        .collect();
    Ok(EnvelopeBand {
        theoretical,
        observed,
        lower,
        upper,
        band_prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams;

    fn blom(n: usize) -> Vec<f64> {
        (1..=n)
            .map(|i| std_normal_quantile((i as f64 - 0.375) / (n as f64 + 0.25)))
            .collect()
    }

    #[test]
    fn expected_order_statistics_sit_inside() {
        let mut rng = streams::master(5);
        let band = series_envelope(&blom(200), 200, 0.95, &mut rng).unwrap();
        assert_eq!(band.fraction_inside(), 1.0);
        assert_eq!(band.theoretical, blom(200));
    }

    #[test]
    fn single_observation_band_is_normal_quantile_pair() {
        let mut rng = streams::master(6);
        let band = series_envelope(&[0.3], 20_000, 0.95, &mut rng).unwrap();
        assert!((band.lower[0] + 1.959964).abs() < 0.05, "{}", band.lower[0]);
        assert!((band.upper[0] - 1.959964).abs() < 0.05, "{}", band.upper[0]);
        assert_eq!(band.theoretical[0], 0.0);
    }

    #[test]
    fn shifted_residuals_are_all_above() {
        let mut rng = streams::master(7);
        let shifted: Vec<f64> = blom(150).iter().map(|v| v + 10.0).collect();
        let band = series_envelope(&shifted, 200, 0.95, &mut rng).unwrap();
        assert_eq!(band.fraction_above(), 1.0);
        assert_eq!(band.fraction_inside(), 0.0);
    }

    #[test]
    fn bands_are_ordered_and_nested() {
        let series = blom(60);
        let narrow = series_envelope(&series, 300, 0.5, &mut streams::master(8)).unwrap();
        let wide = series_envelope(&series, 300, 0.99, &mut streams::master(8)).unwrap();
        for i in 0..60 {
            assert!(narrow.lower[i] <= narrow.upper[i]);
            assert!(wide.lower[i] <= narrow.lower[i] && narrow.upper[i] <= wide.upper[i]);
            if i > 0 {
                assert!(wide.lower[i - 1] <= wide.lower[i] && wide.upper[i - 1] <= wide.upper[i]);
            }
        }
    }

    #[test]
    fn argument_checks() {
        let mut rng = streams::master(9);
        assert!(series_envelope(&[0.0], 99, 0.95, &mut rng).is_err());
        assert!(series_envelope(&[0.0], 100, 1.0, &mut rng).is_err());
        assert!(series_envelope(&[], 100, 0.9, &mut rng).is_err());
        assert!(series_envelope(&[f64::NAN], 100, 0.9, &mut rng).is_err());
    }

    #[test]
    fn csv_layout() {
        let band = series_envelope(&[0.1, -0.2], 100, 0.9, &mut streams::master(1)).unwrap();
        let mut buf = Vec::new();
        band.write_csv(&mut buf, &["seed 1".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# seed 1");
        assert_eq!(lines[1], "theoretical,observed,lower,upper");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].split(',').nth(1).unwrap().starts_with("-0.2"));
    }
}
