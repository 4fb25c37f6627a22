use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::spec::StudySpec;
use super::stats::{recovery_stats, RecoveryStats};
use crate::diagnostics::Statistic;
use crate::model::{simulate_dataset, BinaryDataset, ModelSpec};
use crate::par::{self, Execution};
use crate::sampler::{run_chain_indexed, PosteriorDraws};
use crate::streams::{derive, Purpose};
use crate::{Error, Result};

/// Dataset of replica `r`.
pub fn replica_dataset(spec: &StudySpec, r: usize) -> Result<BinaryDataset> {
    let fam = spec.truth_family()?;
    let mut rng = derive(spec.seed, Purpose::Dataset, r as u64);
    Ok(simulate_dataset(&spec.beta, spec.delta, &fam, spec.n, &mut rng)?.data)
}

/// Fit replica `r` under `model` on the replica's chain stream.
pub(crate) fn replica_fit(spec: &StudySpec, model: &ModelSpec, data: &BinaryDataset, r: usize) -> Result<PosteriorDraws> {
    let mut cfg = spec.chain_config();
    cfg.keep_latents = false;
    Ok(run_chain_indexed(data, model, &cfg, r as u64)?)
}

/// A replica that did not produce estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exclusion {
    pub replica: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryRow {
    pub parameter: String,
    pub truth: f64,
    pub statistic: Statistic,
    pub stats: RecoveryStats,
    /// Point estimate of every successful replica, in replica order.
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub spec: StudySpec,
    pub rows: Vec<RecoveryRow>,
    /// Indices of the replicas that contributed.
    pub replicas: Vec<usize>,
    pub excluded: Vec<Exclusion>,
    pub runtime: Duration,
}

impl RecoveryReport {
    pub fn row(&self, parameter: &str) -> Option<&RecoveryRow> {
        self.rows.iter().find(|r| r.parameter == parameter)
    }

    /// Table with columns Parameter, Real, Est, SD, Rel Bias, MSE.
    pub fn write_table<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        for e in &self.excluded {
            writeln!(out, "# excluded replica {}: {}", e.replica, e.reason)?;
        }
        writeln!(out, "Parameter,Real,Est,SD,Rel Bias,MSE")?;
        for r in &self.rows {
            let s = &r.stats;
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6}",
                r.parameter, r.truth, s.est, s.sd, s.rel_bias, s.mse
            )?;
        }
        Ok(())
    }
}

/// Point estimates of every truth-bearing parameter of one replica.
fn replica_estimates(spec: &StudySpec, names: &[String], r: usize) -> Result<Vec<f64>> {
    let data = replica_dataset(spec, r)?;
    let draws = replica_fit(spec, &spec.model_spec(), &data, r)?;
    names
        .iter()
        .map(|name| {
            let col = draws
                .column(name)
                .ok_or_else(|| Error::Config(format!("fitted model has no parameter `{name}`")))?;
            spec.statistic(name).apply(&col)
        })
        .collect()
}

/// Simulate, fit and summarize every replica. Failed replicas are recorded
/// and skipped; at least two must succeed.
pub fn run_recovery_study(spec: &StudySpec, exec: Execution) -> Result<RecoveryReport> {
    spec.validate()?;
    let start = Instant::now();
    let names = spec.parameter_names();
    let results = par::map_indices(spec.replicas, exec, |r| replica_estimates(spec, &names, r));
    let mut replicas = Vec::new();
    let mut excluded = Vec::new();
    let mut table: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(est) => {
                replicas.push(r);
                for (col, v) in table.iter_mut().zip(est) {
                    col.push(v);
                }
            }
            Err(e) => {
                log::warn!("replica {r} excluded: {e}");
                excluded.push(Exclusion {
                    replica: r,
                    reason: e.to_string(),
                });
            }
        }
    }
    if replicas.len() < 2 {
        return Err(Error::Config(format!(
            "only {} of {} replicas succeeded",
            replicas.len(),
            spec.replicas
        )));
    }
    let rows = names
        .iter()
        .zip(spec.truths())
        .zip(table)
        .map(|((name, truth), estimates)| {
            Ok(RecoveryRow {
                parameter: name.clone(),
                truth,
                statistic: spec.statistic(name),
                stats: recovery_stats(&estimates, truth)?,
                estimates,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RecoveryReport {
        spec: spec.clone(),
        rows,
        replicas,
        excluded,
        runtime: start.elapsed(),
    })
}
