use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::recovery::{replica_dataset, Exclusion};
use super::spec::StudySpec;
use crate::diagnostics::{select_delta_sign_indexed, Statistic};
use crate::par::{self, Execution};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SignStudyReport {
    pub spec: StudySpec,
    /// Sign of the true δ (+1 at zero).
    pub truth_sign: i32,
    /// Selected sign per successful replica and statistic, in
    /// `Statistic::ALL` order.
    pub selections: Vec<(usize, [i32; 3])>,
    pub excluded: Vec<Exclusion>,
    pub runtime: Duration,
}

impl SignStudyReport {
    /// Replicas whose selection under `statistic` equals the true sign.
    pub fn correct(&self, statistic: Statistic) -> usize {
        let j = Statistic::ALL.iter().position(|s| *s == statistic).expect("known statistic");
        self.selections.iter().filter(|(_, s)| s[j] == self.truth_sign).count()
    }

    /// Replicas for which `statistic` selected +1.
    pub fn positive(&self, statistic: Statistic) -> usize {
        let j = Statistic::ALL.iter().position(|s| *s == statistic).expect("known statistic");
        self.selections.iter().filter(|(_, s)| s[j] == 1).count()
    }

    pub fn write_table<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        for e in &self.excluded {
            writeln!(out, "# excluded replica {}: {}", e.replica, e.reason)?;
        }
        writeln!(out, "Statistic,Delta,Correct,Replicas")?;
        for s in Statistic::ALL {
            writeln!(out, "{},{},{},{}", s.name(), self.spec.delta, self.correct(s), self.selections.len())?;
        }
        Ok(())
    }
}

/// Run the skewness-sign scheme on every replica and tabulate, per
/// statistic, how often it recovers the sign of the true δ. Each replica's
/// probit pre-fit runs on stream `r` of the sign-fit purpose.
pub fn run_sign_study(spec: &StudySpec, exec: Execution) -> Result<SignStudyReport> {
    spec.validate()?;
    let start = Instant::now();
    let cfg = spec.chain_config();
    let results = par::map_indices(spec.replicas, exec, |r| -> Result<[i32; 3]> {
        let data = replica_dataset(spec, r)?;
        let rep = select_delta_sign_indexed(&data, &cfg, Statistic::Mean, r as u64)?;
        Ok([
            rep.sign,
            rep.sign_under(Statistic::Median)?,
            rep.sign_under(Statistic::Mode)?,
        ])
    });
    let mut selections = Vec::new();
    let mut excluded = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(s) => selections.push((r, s)),
            Err(e) => {
                log::warn!("replica {r} excluded: {e}");
                excluded.push(Exclusion {
                    replica: r,
                    reason: e.to_string(),
                })
            }
        }
    }
    if selections.is_empty() {
        return Err(Error::Config("no replica of the sign study succeeded".into()));
    }
    Ok(SignStudyReport {
        spec: spec.clone(),
        truth_sign: if spec.delta < 0.0 { -1 } else { 1 },
        selections,
        excluded,
        runtime: start.elapsed(),
    })
}
