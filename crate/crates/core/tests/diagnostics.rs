//! Residuals, envelopes, sign selection, summaries and link curves on real
//! chains.

mod common;

use rand::seq::SliceRandom;
use rand::Rng;
use smcsn_link::diagnostics::{
    latent_residuals, link_curve, normal_envelope, select_delta_sign, summarize, ResidualDraws, Statistic,
};
use smcsn_link::model::{simulate_dataset, BinaryDataset, LatentState, LinkSpec, ModelSpec, PriorSpec, SignRegion};
use smcsn_link::numerics::{ln_std_normal_cdf, std_normal_sf};
use smcsn_link::par::Execution;
use smcsn_link::sampler::{run_chain, ChainConfig, PosteriorDraws};
use smcsn_link::smcsn::{smcsn_sample, CenteredParams, FamilyKind, MixingFamily};
use smcsn_link::streams::{derive, Purpose};

fn csn_data(delta: f64, n: usize, index: u64) -> BinaryDataset {
    let mut rng = derive(300, Purpose::Dataset, index);
    simulate_dataset(&[1.0, 2.0], delta, &MixingFamily::Csn, n, &mut rng).unwrap().data
}

fn csn_fit(data: &BinaryDataset, cfg: &ChainConfig) -> PosteriorDraws {
    let spec = ModelSpec::new(LinkSpec::new(FamilyKind::Csn, SignRegion::Positive), PriorSpec::default());
    run_chain(data, &spec, cfg).unwrap()
}

/// Anderson–Darling statistic against the fully specified N(0, 1).
fn anderson_darling(v: &[f64]) -> f64 {
    let mut x = v.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let s: f64 = (0..n)
        .map(|i| (2 * i + 1) as f64 * (ln_std_normal_cdf(x[i]) + std_normal_sf(x[n - 1 - i]).ln()))
        .sum();
    -(n as f64) - s / n as f64
}

#[test]
fn residual_draws_are_standard_normal() {
    // One retained draw from each of four independent fits, pooled.
    let mut pooled = Vec::new();
    for r in 0..4 {
        let data = csn_data(0.99, 250, r);
        let draws = csn_fit(&data, &ChainConfig::new(2500, 1500, 5, r));
        let res = latent_residuals(&draws, &data).unwrap();
        assert_eq!(res.draws(), draws.len());
        assert_eq!(res.observations(), 250);
        pooled.extend_from_slice(res.values.last().unwrap());
    }
    let a2 = anderson_darling(&pooled);
    // 1% critical value of the case-0 statistic.
    assert!(a2 < 3.857, "A² = {a2}");
}

#[test]
fn envelope_contains_well_specified_residuals() {
    let data = csn_data(0.99, 250, 10);
    let draws = csn_fit(&data, &ChainConfig::new(2500, 1500, 5, 3));
    let res = latent_residuals(&draws, &data).unwrap();
    let band = normal_envelope(&res, 200, 0.95, &mut derive(3, Purpose::Envelope, 0)).unwrap();
    assert!(band.fraction_inside() >= 0.9, "{}", band.fraction_inside());
}

#[test]
fn residuals_follow_a_relabeling() {
    let data = csn_data(0.9, 80, 11);
    let draws = csn_fit(&data, &ChainConfig::new(900, 500, 4, 5));
    let res = latent_residuals(&draws, &data).unwrap();
    let mut perm: Vec<usize> = (0..80).collect();
    perm.shuffle(&mut derive(5, Purpose::Oracle, 0));
    let mut permuted = draws.clone();
    for lat in permuted.latents.as_mut().unwrap() {
        let pick = |v: &[f64]| perm.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        *lat = LatentState {
            z: pick(&lat.z),
            h: pick(&lat.h),
            u: pick(&lat.u),
        };
    }
    let moved = latent_residuals(&permuted, &data.permuted(&perm)).unwrap();
    for (a, b) in res.values.iter().zip(&moved.values) {
        for (i, &j) in perm.iter().enumerate() {
            assert!((b[i] - a[j]).abs() < 1e-12);
        }
    }
}

#[test]
fn residuals_need_latents() {
    let data = csn_data(0.9, 60, 12);
    let mut cfg = ChainConfig::new(600, 300, 3, 1);
    cfg.keep_latents = false;
    let draws = csn_fit(&data, &cfg);
    let err = latent_residuals(&draws, &data).unwrap_err();
    assert!(err.to_string().contains("keep_latents"), "{err}");
}

#[test]
fn sign_is_unbiased_without_skewness() {
    let cfg = ChainConfig::new(1500, 1000, 2, 0);
    let positive = (0..50)
        .filter(|&r| {
            let data = csn_data(0.0, 200, 100 + r);
            let mut cfg = cfg;
            cfg.seed = r;
            select_delta_sign(&data, &cfg, Statistic::Mean).unwrap().sign == 1
        })
        .count();
    // Two-sided 1% acceptance region of Binomial(50, 1/2).
    assert!((16..=34).contains(&positive), "{positive} of 50 positive");
}

#[test]
fn sign_under_each_statistic_at_strong_skewness() {
    let mut correct = [0usize; 3];
    for r in 0..50 {
        let data = csn_data(0.99, 200, 200 + r);
        let rep = select_delta_sign(&data, &ChainConfig::desk(r), Statistic::Mode).unwrap();
        assert_eq!(rep.skewness.len(), 1000);
        assert_eq!(rep.sign, rep.sign_under(Statistic::Mode).unwrap());
        for (j, s) in Statistic::ALL.iter().enumerate() {
            correct[j] += usize::from(rep.sign_under(*s).unwrap() == 1);
        }
    }
    assert!(correct[0] >= 40, "mean: {correct:?}");
    assert!(correct[2] >= 35, "mode: {correct:?}");
}

#[test]
fn sign_survives_affine_rescaling() {
    let data = csn_data(-0.99, 200, 400);
    let cfg = ChainConfig::new(2000, 1000, 2, 8);
    let base = select_delta_sign(&data, &cfg, Statistic::Mean).unwrap();
    assert_eq!(base.sign, -1);
    let mut rng = derive(8, Purpose::Oracle, 1);
    for _ in 0..10 {
        let scale = rng.random_range(0.2..5.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let shift = rng.random_range(-3.0..3.0);
        let moved = data.with_rescaled_column(1, scale, shift);
        assert_eq!(select_delta_sign(&moved, &cfg, Statistic::Mean).unwrap().sign, base.sign);
    }
}

#[test]
fn summary_of_a_fitted_chain() {
    let data = csn_data(0.99, 150, 13);
    let draws = csn_fit(&data, &ChainConfig::new(2000, 1000, 2, 2));
    let s = summarize(&draws, 0.95).unwrap();
    let names: Vec<&str> = s.rows.iter().map(|r| r.parameter.as_str()).collect();
    assert_eq!(names, ["beta0", "beta1", "delta", "g"]);
    for r in &s.rows {
        let (lo, hi) = r.hpd.unwrap();
        assert!(lo <= r.median && r.median <= hi, "{r:?}");
        assert!(lo <= r.mode && r.mode <= hi, "{r:?}");
    }
    assert_eq!(s.row("delta").unwrap().recommended, Statistic::Mode);
    assert_eq!(s.row("beta1").unwrap().recommended, Statistic::Median);
    let mut buf = Vec::new();
    s.write_csv(&mut buf, &[]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("parameter,mean,median,mode,hpd_lower,hpd_upper,recommended,estimate\nbeta0,"));
}

#[test]
fn skew_t_curve_matches_monte_carlo() {
    let fam = MixingFamily::Cst { nu: 3.0 };
    let theta = smcsn_link::model::ModelParams::with_beta(vec![0.0], 0.95, fam);
    let grid = [-3.0, -1.5, -0.5, 0.0, 0.4, 1.0, 2.5];
    let curve = link_curve(&[theta], &grid, 0.95, Execution::Sequential).unwrap();
    let p = CenteredParams::standard(0.95).unwrap();
    let mut rng = derive(12, Purpose::Oracle, 0);
    let m = 1_000_000;
    let sample: Vec<f64> = (0..m).map(|_| smcsn_sample(&p, &fam, &mut rng)).collect();
    for (k, &eta) in grid.iter().enumerate() {
        let hat = sample.iter().filter(|&&x| x <= eta).count() as f64 / m as f64;
        let se = (hat * (1.0 - hat) / m as f64).sqrt();
        assert!((curve.mean[k] - hat).abs() < 4.0 * se, "η={eta}: {} vs {hat} ± {se}", curve.mean[k]);
    }
}

#[test]
fn residual_table_from_values_checks_shape() {
    assert!(ResidualDraws::from_values(vec![]).is_err());
    assert!(ResidualDraws::from_values(vec![vec![]]).is_err());
}
