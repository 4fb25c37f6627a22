//! `smcsn` command-line interface.
//!
//! Exit codes: 0 success, 2 unreadable or unparsable input, 3 sampler
//! failure, 4 invalid configuration or arguments.

mod commands;
mod manifest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostics::{ResidualSeries, Statistic};
use crate::model::{BetaPrior, PriorSpec, SignRegion};
use crate::sampler::{ChainConfig, SamplerError};
use crate::smcsn::FamilyKind;
use crate::Error;

pub use manifest::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SAMPLER: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "smcsn", version, about = "Binary regression with scale mixtures of centered skew-normal links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model; writes draws.csv, summary.csv and meta.json.
    Fit(FitArgs),
    /// Simulate a dataset from the model; writes data.csv and truth.json.
    Simulate(SimulateArgs),
    /// Choose the sign of δ from a probit pre-fit; writes sign.json and skewness.csv.
    SignSelect(SignSelectArgs),
    /// Fit, then write the simulated normal envelope of the residuals to envelope.csv.
    Residuals(ResidualArgs),
    /// Parameter-recovery study from a study file; writes recovery.csv.
    Recover(StudyArgs),
    /// Sign-selection study; writes sign_study.csv.
    SignStudy(StudyArgs),
    /// Coefficient-prior comparison study; writes prior_study.csv.
    PriorStudy(StudyArgs),
    /// Fit, then write the posterior success-probability curve to curve.csv.
    LinkCurve(CurveArgs),
    /// Fit, then write per-row posterior success probabilities to predictions.csv.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Delimited text file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the 0/1 response column.
    #[arg(long, default_value = "y")]
    pub response: String,
    /// Columns expanded into indicators (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Columns to drop (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub ignore: Vec<String>,
    /// Center and scale continuous covariates.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Total iterations (default 60000, or 6000 with --desk-scale).
    #[arg(long)]
    pub iters: Option<usize>,
    /// Burn-in iterations (default 40000, or 4000 with --desk-scale).
    #[arg(long)]
    pub burnin: Option<usize>,
    /// Thinning interval (default 20, or 2 with --desk-scale).
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Use the short 6000/4000/2 chain profile.
    #[arg(long)]
    pub desk_scale: bool,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

impl ChainArgs {
    pub fn config(&self) -> ChainConfig {
        let base = if self.desk_scale {
            ChainConfig::desk(self.seed)
        } else {
            ChainConfig::full(self.seed)
        };
        ChainConfig::new(
            self.iters.unwrap_or(base.iterations),
            self.burnin.unwrap_or(base.burn_in),
            self.thin.unwrap_or(base.thin),
            self.seed,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignChoice {
    Pos,
    Neg,
    /// Select from the skewness of probit latent residuals.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorChoice {
    /// β | g ~ N(0, g/2·I) with π(g) ∝ (1+g)^{−α/2}, α from --alpha.
    HyperG,
    /// Hyper-g with α ~ U(2, 4).
    HyperGUniform,
    /// β ~ N(0, v·I), v from --prior-variance.
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    Mean,
    Median,
    Mode,
}

impl From<StatisticArg> for Statistic {
    fn from(s: StatisticArg) -> Self {
        match s {
            StatisticArg::Mean => Statistic::Mean,
            StatisticArg::Median => Statistic::Median,
            StatisticArg::Mode => Statistic::Mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesArg {
    OrderedMean,
    PosteriorMean,
}

impl From<SeriesArg> for ResidualSeries {
    fn from(s: SeriesArg) -> Self {
        match s {
            SeriesArg::OrderedMean => ResidualSeries::OrderedMean,
            SeriesArg::PosteriorMean => ResidualSeries::PosteriorMean,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// probit, csn, cst, css or cscn.
    #[arg(long, default_value = "csn", value_parser = parse_family)]
    pub family: FamilyKind,
    #[arg(long, value_enum, default_value_t = SignChoice::Auto)]
    pub sign: SignChoice,
    /// Statistic of the sign scheme under --sign auto.
    #[arg(long, value_enum, default_value_t = StatisticArg::Mean)]
    pub sign_statistic: StatisticArg,
    #[arg(long, value_enum, default_value_t = PriorChoice::HyperG)]
    pub prior: PriorChoice,
    #[arg(long, default_value_t = 4.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub prior_variance: f64,
}

impl ModelArgs {
    pub fn prior(&self) -> PriorSpec {
        let beta = match self.prior {
            PriorChoice::HyperG => BetaPrior::hyper_g(self.alpha),
            PriorChoice::HyperGUniform => BetaPrior::hyper_g_uniform(2.0, 4.0),
            PriorChoice::Normal => BetaPrior::Normal {
                variance: self.prior_variance,
            },
        };
        PriorSpec { beta }
    }

    /// Fixed sign region, or `None` when it must be selected from the data.
    pub fn fixed_region(&self) -> Option<SignRegion> {
        match self.sign {
            SignChoice::Pos => Some(SignRegion::Positive),
            SignChoice::Neg => Some(SignRegion::Negative),
            SignChoice::Auto if !self.family.is_skewed() => Some(SignRegion::Positive),
            SignChoice::Auto => None,
        }
    }
}

fn parse_family(s: &str) -> Result<FamilyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Mass of the HPD intervals in summary.csv.
    #[arg(long, default_value_t = 0.95)]
    pub hpd: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    /// True coefficients, intercept first (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,2")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value = "csn", value_parser = parse_family)]
    pub family: FamilyKind,
    /// Shape parameters: ν for cst/css, ν₁,ν₂ for cscn.
    #[arg(long, value_delimiter = ',')]
    pub shape: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SignSelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value_t = StatisticArg::Mean)]
    pub statistic: StatisticArg,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = 200)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0.95)]
    pub band: f64,
    /// Observed series compared with the envelope.
    #[arg(long, value_enum, default_value_t = SeriesArg::OrderedMean)]
    pub series: SeriesArg,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    /// TOML study specification.
    #[arg(long)]
    pub study: PathBuf,
    /// Worker threads for replicas (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    pub eta_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 81)]
    pub points: usize,
    #[arg(long, default_value_t = 0.95)]
    pub band: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Rows to predict (same columns as --data); defaults to the fitted data.
    #[arg(long)]
    pub newdata: Option<PathBuf>,
    #[arg(long, default_value_t = 0.95)]
    pub band: f64,
}

/// Exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Data(_) => EXIT_PARSE,
        Error::Sampler(SamplerError::Config(_)) => EXIT_CONFIG,
        Error::Sampler(_) | Error::NonConvergence { .. } => EXIT_SAMPLER,
        Error::Config(_) | Error::Domain(_) | Error::Io(_) => EXIT_CONFIG,
    }
}

/// Parse `args` (program name first), run the command and return the exit
/// status. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    run(std::env::args_os())
}
