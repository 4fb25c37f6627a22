use std::io::Write;

use serde::Serialize;

use super::sign::Statistic;
use crate::numerics::{hpd_interval, mean, median, posterior_mode, MIN_HPD_DRAWS};
use crate::sampler::PosteriorDraws;
use crate::smcsn::FamilyKind;
use crate::{Error, Result};

/// Point estimator that performed best for each parameter in simulation:
/// regression coefficients use the median (mean under the contaminated
/// normal), δ the mode, and ν the mode (skew-t), median (skew-slash) or mean
/// (contaminated normal). Probit coefficients and the g, α hyperparameters
/// use the median.
pub fn recommended_statistic(family: FamilyKind, parameter: &str) -> Statistic {
    if parameter.starts_with("beta") {
        return match family {
            FamilyKind::Cscn => Statistic::Mean,
            _ => Statistic::Median,
        };
    }
    match parameter {
        "delta" => Statistic::Mode,
        "nu" => match family {
            FamilyKind::Cst => Statistic::Mode,
            _ => Statistic::Median,
        },
        "nu1" | "nu2" => Statistic::Mean,
        _ => Statistic::Median,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub parameter: String,
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
    /// `None` when there are too few draws for an HPD interval.
    pub hpd: Option<(f64, f64)>,
    pub recommended: Statistic,
}

impl SummaryRow {
    pub fn estimate(&self) -> f64 {
        self.value(self.recommended)
    }

    pub fn value(&self, statistic: Statistic) -> f64 {
        match statistic {
            Statistic::Mean => self.mean,
            Statistic::Median => self.median,
            Statistic::Mode => self.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub prob: f64,
    pub rows: Vec<SummaryRow>,
}

impl PosteriorSummary {
    pub fn row(&self, parameter: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.parameter == parameter)
    }

    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "parameter,mean,median,mode,hpd_lower,hpd_upper,recommended,estimate")?;
        for r in &self.rows {
            let (lo, hi) = match r.hpd {
                Some((lo, hi)) => (lo.to_string(), hi.to_string()),
                None => (String::new(), String::new()),
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.parameter,
                r.mean,
                r.median,
                r.mode,
                lo,
                hi,
                r.recommended.name(),
                r.estimate()
            )?;
        }
        Ok(())
    }
}

/// Summarize one parameter's draws.
pub fn summarize_column(parameter: &str, draws: &[f64], prob: f64, recommended: Statistic) -> Result<SummaryRow> {
    if draws.is_empty() {
        return Err(Error::domain(format!("no draws for `{parameter}`")));
    }
    let hpd = if draws.len() >= MIN_HPD_DRAWS {
        let h = hpd_interval(draws, prob)?;
        Some((h.lower, h.upper))
    } else if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::domain(format!("HPD probability {prob} not in (0, 1)")));
    } else {
        None
    };
    Ok(SummaryRow {
        parameter: parameter.to_string(),
        mean: mean(draws),
        median: median(draws),
        mode: posterior_mode(draws)?,
        hpd,
        recommended,
    })
}

/// Mean, median, mode and `prob`-HPD interval of every parameter, in export
/// order.
pub fn summarize(draws: &PosteriorDraws, prob: f64) -> Result<PosteriorSummary> {
    let family = draws.spec.link.family;
    let rows = draws
        .parameter_names()
        .iter()
        .map(|name| {
            let col = draws.column(name).expect("known parameter");
            summarize_column(name, &col, prob, recommended_statistic(family, name))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorSummary { prob, rows })
}
