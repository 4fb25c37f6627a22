use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use super::manifest::RunManifest;
use super::{
    ChainArgs, Command, CurveArgs, DataArgs, FitArgs, PredictArgs, ResidualArgs, SignSelectArgs, SimulateArgs,
    StudyArgs,
};
use crate::diagnostics::{
    eta_grid, latent_residuals, link_curve, predict, residual_envelope, select_delta_sign, summarize, SignReport,
    Statistic,
};
use crate::model::{
    read_dataset_path, simulate_dataset, write_dataset, BinaryDataset, CategoricalEncoding, CovariateKind,
    IngestOptions, LinkSpec, ModelSpec,
};
use crate::par::Execution;
use crate::sampler::{run_chain, ChainMeta, PosteriorDraws, SamplerError};
use crate::simharness::{run_prior_study, run_recovery_study, run_sign_study, StudySpec};
use crate::smcsn::MixingFamily;
use crate::streams::{derive, Purpose};
use crate::{Error, Result};

pub(super) fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Fit(a) => cmd_fit(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::SignSelect(a) => cmd_sign_select(&a),
        Command::Residuals(a) => cmd_residuals(&a),
        Command::Recover(a) => cmd_study(&a, "recover"),
        Command::SignStudy(a) => cmd_study(&a, "sign-study"),
        Command::PriorStudy(a) => cmd_study(&a, "prior-study"),
        Command::LinkCurve(a) => cmd_link_curve(&a),
        Command::Predict(a) => cmd_predict(&a),
    }
}

/// Size the global worker pool. Only the first call in a process takes effect.
fn configure_workers(workers: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        if rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().is_err() {
            log::debug!("worker pool already initialized");
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
}

fn ingest_options(a: &DataArgs, standardize: bool) -> Result<IngestOptions> {
    if !a.delimiter.is_ascii() {
        return Err(Error::Config(format!("delimiter `{}` is not ASCII", a.delimiter)));
    }
    let mut opts = IngestOptions::new(a.response.clone());
    opts.categorical = a.categorical.clone();
    opts.ignore = a.ignore.clone();
    opts.standardize = standardize;
    opts.delimiter = a.delimiter as u8;
    Ok(opts)
}

fn load_data(a: &DataArgs, manifest: &mut RunManifest) -> Result<BinaryDataset> {
    manifest.add_input(&a.data).map_err(|e| match e {
        Error::Io(io) => Error::Data(crate::model::DataError::Io(format!("{}: {io}", a.data.display()))),
        other => other,
    })?;
    manifest.set(
        "data",
        json!({
            "response": a.response,
            "categorical": a.categorical,
            "ignore": a.ignore,
            "standardize": a.standardize,
            "delimiter": a.delimiter.to_string(),
        }),
    );
    let data = read_dataset_path(&a.data, &ingest_options(a, a.standardize)?)?;
    for w in data.warnings() {
        log::warn!("{w}");
    }
    Ok(data)
}

fn set_chain(manifest: &mut RunManifest, a: &ChainArgs) {
    let cfg = a.config();
    manifest.set("chain", cfg);
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), bytes)?;
    Ok(())
}

fn write_table<F>(dir: &Path, name: &str, f: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    write_file(dir, name, &buf)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    write_file(dir, name, text.as_bytes())
}

/// Save the chain state of a non-finite failure next to the outputs.
fn with_state_dump<T>(dir: &Path, res: std::result::Result<T, SamplerError>) -> Result<T> {
    match res {
        Ok(v) => Ok(v),
        Err(e) => {
            if let SamplerError::NonFinite { state, .. } = &e {
                let path = dir.join("failure_state.json");
                if fs::create_dir_all(dir).and_then(|_| fs::write(&path, state)).is_ok() {
                    eprintln!("chain state at failure written to {}", path.display());
                }
            }
            Err(e.into())
        }
    }
}

/// Result of the shared fitting path of `fit`, `residuals`, `link-curve`
/// and `predict`.
struct Fitted {
    data: BinaryDataset,
    draws: PosteriorDraws,
    sign: Option<SignReport>,
    manifest: RunManifest,
}

fn fit_model(a: &FitArgs, command: &str) -> Result<Fitted> {
    configure_workers(a.chain.workers);
    let cfg = a.chain.config();
    let mut manifest = RunManifest::new(command, cfg.seed, &a.out.out);
    let data = load_data(&a.data, &mut manifest)?;
    set_chain(&mut manifest, &a.chain);
    let prior = a.model.prior();
    prior.beta.validate()?;
    manifest.set("family", a.model.family.name());
    manifest.set("prior", prior);
    let (region, sign) = match a.model.fixed_region() {
        Some(r) => {
            manifest.set("sign", r.name());
            (r, None)
        }
        None => {
            let statistic = Statistic::from(a.model.sign_statistic);
            manifest.set("sign", format!("auto:{}", statistic.name()));
            let rep = with_state_dump(&a.out.out, select_delta_sign(&data, &cfg, statistic).map_err(sampler_error))?;
            log::info!("selected sign region {}", rep.region().name());
            (rep.region(), Some(rep))
        }
    };
    let link = if a.model.family.is_skewed() {
        LinkSpec::new(a.model.family, region)
    } else {
        LinkSpec::probit()
    };
    let spec = ModelSpec::new(link, prior);
    let draws = with_state_dump(&a.out.out, run_chain(&data, &spec, &cfg))?;
    Ok(Fitted {
        data,
        draws,
        sign,
        manifest,
    })
}

/// Sign selection returns crate errors; keep sampler failures recognizable
/// for the state dump.
fn sampler_error(e: Error) -> SamplerError {
    match e {
        Error::Sampler(s) => s,
        other => SamplerError::Numerics(other.to_string()),
    }
}

#[derive(Serialize)]
struct FitMeta<'a> {
    manifest: &'a RunManifest,
    manifest_sha256: String,
    chain: ChainMeta,
    sign_region: &'static str,
    sign_selection: Option<SignSummary>,
    covariates: &'a [crate::model::Covariate],
    categorical: Vec<CategoricalEncoding>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct SignSummary {
    statistic: Statistic,
    value: f64,
    sign: i32,
    by_statistic: Vec<(Statistic, i32)>,
}

fn sign_summary(rep: &SignReport) -> Result<SignSummary> {
    Ok(SignSummary {
        statistic: rep.statistic,
        value: rep.value,
        sign: rep.sign,
        by_statistic: Statistic::ALL
            .iter()
            .map(|s| Ok((*s, rep.sign_under(*s)?)))
            .collect::<Result<Vec<_>>>()?,
    })
}

fn write_meta(f: &Fitted, dir: &Path) -> Result<()> {
    let meta = FitMeta {
        manifest: &f.manifest,
        manifest_sha256: f.manifest.digest(),
        chain: f.draws.meta(),
        sign_region: f.draws.spec.link.sign_region.name(),
        sign_selection: f.sign.as_ref().map(sign_summary).transpose()?,
        covariates: f.data.covariates(),
        categorical: CategoricalEncoding::from_dataset(&f.data),
        warnings: f.data.warnings().iter().map(|w| w.to_string()).collect(),
    };
    write_json(dir, "meta.json", &meta)
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let f = fit_model(a, "fit")?;
    let dir = &a.out.out;
    let header = f.manifest.header();
    write_table(dir, "draws.csv", |b| f.draws.write_csv(b, &header))?;
    let summary = summarize(&f.draws, a.hpd)?;
    write_table(dir, "summary.csv", |b| summary.write_csv(b, &header))?;
    write_meta(&f, dir)?;
    for r in &summary.rows {
        println!("{:>8} {:>12.6} ({})", r.parameter, r.estimate(), r.recommended.name());
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let fam = MixingFamily::from_shape(a.family, &a.shape)?;
    let mut manifest = RunManifest::new("simulate", a.seed, &a.out.out);
    manifest.set("n", a.n);
    manifest.set("beta", &a.beta);
    manifest.set("delta", a.delta);
    manifest.set("family", fam);
    let mut rng = derive(a.seed, Purpose::Dataset, 0);
    let sim = simulate_dataset(&a.beta, a.delta, &fam, a.n, &mut rng)?;
    let header = manifest.header();
    write_table(&a.out.out, "data.csv", |b| write_dataset(b, &sim.data, &header))?;
    let truth = json!({
        "manifest_sha256": manifest.digest(),
        "seed": a.seed,
        "n": a.n,
        "beta": a.beta,
        "delta": a.delta,
        "family": fam.kind().name(),
        "shape": fam.shape(),
        "shape_names": fam.kind().shape_names(),
    });
    write_json(&a.out.out, "truth.json", &truth)
}

fn cmd_sign_select(a: &SignSelectArgs) -> Result<()> {
    configure_workers(a.chain.workers);
    let cfg = a.chain.config();
    let mut manifest = RunManifest::new("sign-select", cfg.seed, &a.out.out);
    let data = load_data(&a.data, &mut manifest)?;
    set_chain(&mut manifest, &a.chain);
    let statistic = Statistic::from(a.statistic);
    manifest.set("statistic", statistic);
    let rep = with_state_dump(&a.out.out, select_delta_sign(&data, &cfg, statistic).map_err(sampler_error))?;
    let header = manifest.header();
    write_table(&a.out.out, "skewness.csv", |b| {
        use std::io::Write;
        for c in &header {
            writeln!(b, "# {c}")?;
        }
        writeln!(b, "draw,skewness")?;
        for (k, s) in rep.skewness.iter().enumerate() {
            writeln!(b, "{k},{s}")?;
        }
        Ok(())
    })?;
    let report = json!({
        "manifest_sha256": manifest.digest(),
        "manifest": manifest,
        "selection": sign_summary(&rep)?,
        "region": rep.region().name(),
        "warnings": rep.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
    });
    write_json(&a.out.out, "sign.json", &report)?;
    println!("sign {:+} ({} skewness {:.6})", rep.sign, statistic.name(), rep.value);
    Ok(())
}

fn cmd_residuals(a: &ResidualArgs) -> Result<()> {
    let mut f = fit_model(&a.fit, "residuals")?;
    f.manifest.set("envelope", json!({"replicates": a.replicates, "band": a.band, "series": format!("{:?}", a.series)}));
    let res = latent_residuals(&f.draws, &f.data)?;
    let mut rng = derive(f.draws.config.seed, Purpose::Envelope, 0);
    let band = residual_envelope(&res, a.series.into(), a.replicates, a.band, &mut rng)?;
    let header = f.manifest.header();
    write_table(&a.fit.out.out, "envelope.csv", |b| band.write_csv(b, &header))?;
    write_meta(&f, &a.fit.out.out)?;
    println!("{:.1}% of points inside the {:.0}% band", 100.0 * band.fraction_inside(), 100.0 * a.band);
    Ok(())
}

fn cmd_link_curve(a: &CurveArgs) -> Result<()> {
    if a.points == 0 || !(a.eta_min < a.eta_max) {
        return Err(Error::Config("curve grid needs --points ≥ 1 and --eta-min < --eta-max".into()));
    }
    let mut f = fit_model(&a.fit, "link-curve")?;
    f.manifest.set("grid", json!({"min": a.eta_min, "max": a.eta_max, "points": a.points, "band": a.band}));
    let grid = eta_grid(a.eta_min, a.eta_max, a.points);
    let curve = link_curve(&f.draws.params, &grid, a.band, Execution::available())?;
    let header = f.manifest.header();
    write_table(&a.fit.out.out, "curve.csv", |b| curve.write_csv(b, &header))?;
    write_meta(&f, &a.fit.out.out)
}

/// Read prediction rows and encode them like the fitted data.
fn load_newdata(path: &Path, a: &DataArgs, fitted: &BinaryDataset, manifest: &mut RunManifest) -> Result<BinaryDataset> {
    manifest.add_input(path)?;
    let mut data = read_dataset_path(path, &ingest_options(a, false)?)?;
    if data.covariate_names() != fitted.covariate_names() {
        return Err(Error::Config(format!(
            "prediction columns {:?} differ from the fitted design {:?}",
            data.covariate_names(),
            fitted.covariate_names()
        )));
    }
    for (j, c) in fitted.covariates().iter().enumerate() {
        if let CovariateKind::Continuous {
            standardization: Some((m, s)),
        } = c.kind
        {
            data = data.with_rescaled_column(j, 1.0 / s, -m / s);
        }
    }
    Ok(data)
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let mut f = fit_model(&a.fit, "predict")?;
    f.manifest.set("band", a.band);
    let target = match &a.newdata {
        Some(p) => load_newdata(p, &a.fit.data, &f.data, &mut f.manifest)?,
        None => f.data.clone(),
    };
    let pred = predict(&f.draws.params, &target, a.band, Execution::available())?;
    let header = f.manifest.header();
    write_table(&a.fit.out.out, "predictions.csv", |b| pred.write_csv(b, &header))?;
    write_meta(&f, &a.fit.out.out)
}

fn cmd_study(a: &StudyArgs, command: &str) -> Result<()> {
    configure_workers(a.workers);
    let spec = StudySpec::from_path(&a.study).map_err(|e| match e {
        Error::Io(io) => Error::Data(crate::model::DataError::Io(format!("{}: {io}", a.study.display()))),
        other => other,
    })?;
    let mut manifest = RunManifest::new(command, spec.seed, &a.out.out);
    manifest.add_input(&a.study)?;
    manifest.set("study", &spec);
    let header = manifest.header();
    let exec = Execution::available();
    let dir = &a.out.out;
    match command {
        "recover" => {
            let rep = run_recovery_study(&spec, exec)?;
            write_table(dir, "recovery.csv", |b| rep.write_table(b, &header))?;
            rep.write_table(std::io::stdout(), &[])?;
            eprintln!("{} replicas in {:.1?}", rep.replicas.len(), rep.runtime);
        }
        "sign-study" => {
            let rep = run_sign_study(&spec, exec)?;
            write_table(dir, "sign_study.csv", |b| rep.write_table(b, &header))?;
            rep.write_table(std::io::stdout(), &[])?;
            eprintln!("{} replicas in {:.1?}", rep.selections.len(), rep.runtime);
        }
        _ => {
            let rep = run_prior_study(&spec, exec)?;
            write_table(dir, "prior_study.csv", |b| rep.write_table(b, &header))?;
            rep.write_table(std::io::stdout(), &[])?;
            eprintln!("{} replicas in {:.1?}", rep.replicas.len(), rep.runtime);
        }
    }
    Ok(())
}
