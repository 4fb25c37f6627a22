//! Replica simulation studies: parameter recovery, the sign-selection study
//! and the coefficient-prior comparison.
//!
//! Replica `r` of a study with master seed `s` draws its dataset from
//! `derive(s, Dataset, r)`, its chain from `derive(s, Chain, r)` and, in the
//! sign study, its probit pre-fit from `derive(s, SignFit, r)`. Replicas run
//! concurrently and are reduced in index order.

mod prior_study;
mod recovery;
mod sign_study;
mod spec;
mod stats;

pub use prior_study::{compared_priors, run_prior_study, PriorRow, PriorStudyReport};
pub use recovery::{replica_dataset, run_recovery_study, Exclusion, RecoveryReport, RecoveryRow};
pub use sign_study::{run_sign_study, SignStudyReport};
pub use spec::{Preset, StudySpec};
pub use stats::{recovery_stats, RecoveryStats};
