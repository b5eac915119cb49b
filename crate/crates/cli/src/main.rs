//! `gpr`: simulation study, volatility series, tail datasets, fitting and
//! tail-risk reports from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gpr_core::pipeline::{CsvSchema, DateFormat, Standardization};
use gpr_core::PriorFamily;

#[derive(Parser)]
#[command(name = "gpr", version, about = "Generalised Pareto regression for tail losses")]
struct Cli {
    /// Worker threads for replications and folds (default: all cores).
    #[arg(long, global = true, env = "GPR_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo comparison of the prior families on simulated data.
    Simulate(SimulateArgs),
    /// Annualised EWMA or Garman-Klass volatility of an OHLC file.
    Volatility(VolatilityArgs),
    /// Aligns OHLC files and keeps the target's large-loss days.
    BuildDataset(BuildArgs),
    /// Fits one prior family to a dataset dump.
    Fit(FitArgs),
    /// Fits every prior family on one split and tabulates RMSE, AIC and BIC.
    Compare(CompareArgs),
    /// Crash-probability curve and fitted-vs-observed table from a fit file.
    Report(ReportArgs),
}

fn parse_family(s: &str) -> Result<PriorFamily, String> {
    s.parse().map_err(|e: gpr_core::GprError| e.to_string())
}

fn parse_standardization(s: &str) -> Result<Standardization, String> {
    s.parse().map_err(|e: gpr_core::GprError| e.to_string())
}

fn parse_date_format(s: &str) -> Result<DateFormat, String> {
    s.parse().map_err(|e: gpr_core::GprError| e.to_string())
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Observations per replication.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Covariates (no intercept).
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, default_value_t = 2.0)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated families, reported in this order.
    #[arg(long, value_delimiter = ',', value_parser = parse_family, default_value = "cauchy,lasso,ridge,gprior")]
    priors: Vec<PriorFamily>,
    #[arg(long, default_value_t = 5)]
    cv_folds: usize,
    #[arg(long, default_value_t = 0.8)]
    train_frac: f64,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    xi_min: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    xi_max: f64,
    /// Receives summary.csv and raw.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SchemaArgs {
    #[arg(long, default_value = "date")]
    date_col: String,
    #[arg(long, default_value = "open")]
    open_col: String,
    #[arg(long, default_value = "high")]
    high_col: String,
    #[arg(long, default_value = "low")]
    low_col: String,
    #[arg(long, default_value = "close")]
    close_col: String,
    /// `iso`, `dayfirst` or a strftime pattern such as `%m/%d/%Y`.
    #[arg(long, value_parser = parse_date_format, default_value = "iso")]
    date_format: DateFormat,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

impl SchemaArgs {
    fn schema(&self) -> anyhow::Result<CsvSchema> {
        anyhow::ensure!(self.delimiter.is_ascii(), "delimiter must be a single ASCII character");
        Ok(CsvSchema {
            date: self.date_col.clone(),
            open: self.open_col.clone(),
            high: self.high_col.clone(),
            low: self.low_col.clone(),
            close: self.close_col.clone(),
            date_format: self.date_format.clone(),
            delimiter: self.delimiter as u8,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VolMethod {
    Ewma,
    Gk,
}

#[derive(Args)]
struct VolatilityArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "ewma")]
    method: VolMethod,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 21)]
    window: usize,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    schema: SchemaArgs,
}

#[derive(Args)]
struct BuildArgs {
    /// `name=path` for each asset; repeat the flag.
    #[arg(long = "asset", required = true)]
    assets: Vec<String>,
    /// Asset whose losses are modelled (default: the first).
    #[arg(long)]
    target: Option<String>,
    /// Frame columns such as `idx_ewma`; default is every asset's `_ewma`.
    #[arg(long, value_delimiter = ',')]
    covariates: Vec<String>,
    /// Loss threshold in percent.
    #[arg(long, default_value_t = 2.0)]
    threshold: f64,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 21)]
    window: usize,
    /// Use the previous day's volatilities.
    #[arg(long)]
    lag: bool,
    /// Take logs of the covariates.
    #[arg(long)]
    log_covariates: bool,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
}

#[derive(Args)]
struct SplitArgs {
    /// Dataset dump written by `build-dataset`.
    #[arg(long)]
    data: PathBuf,
    /// Refit at a higher threshold than the dump's, dropping rows at or below it.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    cv_folds: usize,
    #[arg(long, default_value_t = 0.8)]
    train_frac: f64,
    /// `none`, `train` (moments from the training rows) or `full`.
    #[arg(long, value_parser = parse_standardization, default_value = "train")]
    standardize: Standardization,
    /// Let the prior shrink the intercept too.
    #[arg(long)]
    shrink_intercept: bool,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long, value_parser = parse_family, default_value = "cauchy")]
    prior: PriorFamily,
    /// Fixed hyperparameter; skips cross-validation.
    #[arg(long)]
    hyper: Option<f64>,
    /// Loss level whose exceedance probability is printed at median covariates.
    #[arg(long)]
    crash_level: Option<f64>,
    /// Fit file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    split: SplitArgs,
    #[arg(long, value_delimiter = ',', value_parser = parse_family, default_value = "cauchy,lasso,ridge,gprior")]
    priors: Vec<PriorFamily>,
    /// Comparison CSV to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    fit: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Covariate to sweep.
    #[arg(long)]
    sweep: String,
    /// Loss level for the exceedance probability.
    #[arg(long)]
    y0: f64,
    /// Quantile at which the other covariates are held.
    #[arg(long, default_value_t = 0.5)]
    pin_quantile: f64,
    /// Receives crash_curve.csv and fitted.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = commands::init_threads(cli.threads).and_then(|()| match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Volatility(a) => commands::volatility(a),
        Command::BuildDataset(a) => commands::build_dataset(a),
        Command::Fit(a) => commands::fit(a),
        Command::Compare(a) => commands::compare(a),
        Command::Report(a) => commands::report(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", one_line(&e));
            ExitCode::FAILURE
        }
    }
}

/// The error chain on one line, skipping causes already quoted by their parent.
fn one_line(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let c = cause.to_string();
        if !msg.contains(&c) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&c);
        }
    }
    msg.replace('\n', " ")
}
