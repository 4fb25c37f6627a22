//! Replica studies end to end on small, fast configurations.

use smcsn_link::diagnostics::Statistic;
use smcsn_link::model::{BetaPrior, PriorSpec};
use smcsn_link::par::Execution;
use smcsn_link::simharness::{replica_dataset, run_recovery_study, run_sign_study, StudySpec};
use smcsn_link::smcsn::MixingFamily;

fn probit_study(n: usize, seed: u64) -> StudySpec {
    let mut spec = StudySpec::new(MixingFamily::Normal, vec![0.5, 1.0], 0.0, n, 10, seed);
    spec.iterations = Some(2000);
    spec.burn_in = Some(1000);
    spec.thin = Some(2);
    spec
}

#[test]
fn probit_coefficients_are_recovered() {
    let report = run_recovery_study(&probit_study(250, 11), Execution::available()).unwrap();
    assert!(report.excluded.is_empty());
    assert_eq!(report.replicas, (0..10).collect::<Vec<_>>());
    for name in ["beta0", "beta1"] {
        let row = report.row(name).unwrap();
        assert_eq!(row.statistic, Statistic::Median);
        assert!(row.stats.relative);
        assert!(row.stats.rel_bias <= 0.1, "{name}: {:?}", row.stats);
        assert!(row.stats.sd > 0.0);
    }
    assert!(report.row("delta").is_none());
}

#[test]
fn same_seed_same_report_regardless_of_execution() {
    let spec = probit_study(80, 5);
    let a = run_recovery_study(&spec, Execution::Sequential).unwrap();
    let b = run_recovery_study(&spec, Execution::available()).unwrap();
    assert_eq!(a.rows, b.rows);
    let mut ta = Vec::new();
    let mut tb = Vec::new();
    a.write_table(&mut ta, &[]).unwrap();
    b.write_table(&mut tb, &[]).unwrap();
    assert_eq!(ta, tb);
}

#[test]
fn equivalent_priors_agree() {
    // N(0, 10⁶) written two ways: directly, and as a fixed-g prior with
    // g·σ_b = 10⁶.
    let mut normal = probit_study(150, 21);
    normal.prior = PriorSpec {
        beta: BetaPrior::Normal { variance: 1e6 },
    };
    let mut fixed = normal.clone();
    fixed.prior = PriorSpec {
        beta: BetaPrior::FixedG { g: 2e6, sigma_b: 0.5 },
    };
    let a = run_recovery_study(&normal, Execution::available()).unwrap();
    let b = run_recovery_study(&fixed, Execution::available()).unwrap();
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        let tol = 0.25 * ra.stats.sd;
        assert!((ra.stats.est - rb.stats.est).abs() < tol, "{}: {:?} vs {:?}", ra.parameter, ra.stats, rb.stats);
    }
}

#[test]
fn prior_swap_keeps_the_data() {
    let spec = probit_study(60, 8);
    let mut other = spec.clone();
    other.prior = PriorSpec {
        beta: BetaPrior::Normal { variance: 1000.0 },
    };
    for r in 0..3 {
        let a = replica_dataset(&spec, r).unwrap();
        let b = replica_dataset(&other, r).unwrap();
        assert_eq!(a.y(), b.y());
        assert_eq!(a.x(), b.x());
    }
    assert_ne!(replica_dataset(&spec, 0).unwrap().y(), replica_dataset(&spec, 1).unwrap().y());
}

#[test]
fn error_shrinks_with_sample_size() {
    let small = run_recovery_study(&probit_study(100, 31), Execution::available()).unwrap();
    let large = run_recovery_study(&probit_study(250, 31), Execution::available()).unwrap();
    let total = |r: &smcsn_link::simharness::RecoveryReport| r.rows.iter().map(|x| x.stats.mse).sum::<f64>();
    assert!(total(&large) <= 1.1 * total(&small), "{} vs {}", total(&large), total(&small));
}

#[test]
fn negative_skewness_selects_negative_sign() {
    let mut spec = StudySpec::new(MixingFamily::Csn, vec![1.0, 2.0], -0.99, 200, 20, 17);
    spec.iterations = Some(1500);
    spec.burn_in = Some(1000);
    spec.thin = Some(2);
    let report = run_sign_study(&spec, Execution::available()).unwrap();
    assert_eq!(report.truth_sign, -1);
    assert_eq!(report.selections.len() + report.excluded.len(), 20);
    assert!(report.correct(Statistic::Mean) >= 15, "{}", report.correct(Statistic::Mean));
    for s in Statistic::ALL {
        assert_eq!(report.correct(s) + report.positive(s), report.selections.len());
    }
}

#[test]
fn invalid_studies_are_rejected() {
    let mut spec = probit_study(100, 1);
    spec.replicas = 1;
    assert!(run_recovery_study(&spec, Execution::Sequential).is_err());
    let mut spec = probit_study(100, 1);
    spec.delta = 0.5;
    assert!(spec.validate().is_err());
    assert!(StudySpec::from_toml("family = \"csn\"\nbeta = [1.0]\ndelta = 0.5\nn = 50\nreplicas = 2\nseed = 1\nbogus = 3\n").is_err());
}

#[test]
fn study_file_with_prior_and_statistics() {
    let spec = StudySpec::from_toml(
        r#"
family = "cst"
beta = [1.0, 2.0]
delta = 0.99
shape = [3.0]
n = 250
replicas = 10
seed = 42
preset = "desk"

[statistics]
nu = "mode"

[prior.beta]
kind = "normal"
variance = 1000.0
"#,
    )
    .unwrap();
    assert_eq!(spec.prior.beta, BetaPrior::Normal { variance: 1000.0 });
    assert_eq!(spec.statistic("nu"), Statistic::Mode);
    assert_eq!(spec.parameter_names(), ["beta0", "beta1", "delta", "nu"]);
    assert_eq!(StudySpec::from_toml(&spec.to_toml()).unwrap(), spec);
}
