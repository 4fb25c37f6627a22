use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::recovery::{replica_dataset, replica_fit, Exclusion};
use super::spec::StudySpec;
use crate::diagnostics::Statistic;
use crate::model::{BetaPrior, PriorSpec};
use crate::numerics::mean;
use crate::par::{self, Execution};
use crate::{Error, Result};

/// The compared coefficient priors, in table order.
pub fn compared_priors() -> [(&'static str, BetaPrior); 3] {
    [
        ("normal", BetaPrior::Normal { variance: 1000.0 }),
        ("hyper-g(4)", BetaPrior::hyper_g(4.0)),
        ("hyper-g(U(2,4))", BetaPrior::hyper_g_uniform(2.0, 4.0)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorRow {
    pub parameter: String,
    pub prior: String,
    pub truth: f64,
    /// Replica-mean estimate under each statistic, in `Statistic::ALL` order.
    pub est: [f64; 3],
}

impl PriorRow {
    pub fn estimate(&self, statistic: Statistic) -> f64 {
        self.est[Statistic::ALL.iter().position(|s| *s == statistic).expect("known statistic")]
    }

    pub fn abs_bias(&self, statistic: Statistic) -> f64 {
        (self.estimate(statistic) - self.truth).abs()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PriorStudyReport {
    pub spec: StudySpec,
    pub rows: Vec<PriorRow>,
    pub replicas: Vec<usize>,
    pub excluded: Vec<Exclusion>,
    pub runtime: Duration,
}

impl PriorStudyReport {
    pub fn row(&self, parameter: &str, prior: &str) -> Option<&PriorRow> {
        self.rows.iter().find(|r| r.parameter == parameter && r.prior == prior)
    }

    pub fn write_table<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        for e in &self.excluded {
            writeln!(out, "# excluded replica {}: {}", e.replica, e.reason)?;
        }
        writeln!(out, "Parameter,Prior,Real,Mean,Median,Mode")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6}",
                r.parameter, r.prior, r.truth, r.est[0], r.est[1], r.est[2]
            )?;
        }
        Ok(())
    }
}

/// Regression-coefficient estimates of one replica: `[prior][coef][stat]`.
type ReplicaTable = Vec<Vec<[f64; 3]>>;

fn replica_table(spec: &StudySpec, r: usize) -> Result<ReplicaTable> {
    let data = replica_dataset(spec, r)?;
    compared_priors()
        .iter()
        .map(|(_, beta)| {
            let mut model = spec.model_spec();
            model.prior = PriorSpec { beta: *beta };
            let draws = replica_fit(spec, &model, &data, r)?;
            (0..spec.beta.len())
                .map(|j| {
                    let col = draws.column(&format!("beta{j}")).expect("coefficient column");
                    let mut est = [0.0; 3];
                    for (e, s) in est.iter_mut().zip(Statistic::ALL) {
                        *e = s.apply(&col)?;
                    }
                    Ok(est)
                })
                .collect()
        })
        .collect()
}

/// Fit every replica three times, differing only in the coefficient prior
/// (same dataset, same chain stream), and report replica-mean estimates of
/// the regression coefficients under each statistic.
pub fn run_prior_study(spec: &StudySpec, exec: Execution) -> Result<PriorStudyReport> {
    spec.validate()?;
    let start = Instant::now();
    let results = par::map_indices(spec.replicas, exec, |r| replica_table(spec, r));
    let mut tables = Vec::new();
    let mut replicas = Vec::new();
    let mut excluded = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(t) => {
                replicas.push(r);
                tables.push(t);
            }
            Err(e) => {
                log::warn!("replica {r} excluded: {e}");
                excluded.push(Exclusion {
                    replica: r,
                    reason: e.to_string(),
                })
            }
        }
    }
    if tables.is_empty() {
        return Err(Error::Config("no replica of the prior study succeeded".into()));
    }
    let mut rows = Vec::new();
    for (j, &truth) in spec.beta.iter().enumerate() {
        for (k, (label, _)) in compared_priors().iter().enumerate() {
            let mut est = [0.0; 3];
            for (s, e) in est.iter_mut().enumerate() {
                let mut v: Vec<f64> = tables.iter().map(|t| t[k][j][s]).collect();
                v.sort_by(f64::total_cmp);
                *e = mean(&v);
            }
            rows.push(PriorRow {
                parameter: format!("beta{j}"),
                prior: label.to_string(),
                truth,
                est,
            });
        }
    }
    Ok(PriorStudyReport {
        spec: spec.clone(),
        rows,
        replicas,
        excluded,
        runtime: start.elapsed(),
    })
}
