//! Tune-then-fit for a prior family, and side-by-side comparison of families
//! on one train/test split.

use std::io::Write;

use crate::clock::Stopwatch;
use crate::cv::{cross_validate, default_grid, CvConfig, CvResult};
use crate::error::Result;
use crate::fit::{evaluate, fit_map, FitOptions, FitResult};
use crate::model::ExceedanceDataset;
use crate::priors::{PriorFamily, PriorSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOptions {
    pub n_folds: usize,
    /// Replaces the default grid of every tuned family.
    pub grid: Option<Vec<f64>>,
    pub seed: u64,
    pub shrink_intercept: bool,
    pub fit: FitOptions,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self { n_folds: 5, grid: None, seed: 0, shrink_intercept: false, fit: FitOptions::default() }
    }
}

impl TuneOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.fit.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunedFit {
    pub fit: FitResult,
    pub cv: Option<CvResult>,
    /// Seconds spent in cross-validation plus the final fit.
    pub total_time: f64,
}

/// Cross-validates the hyperparameter when the family has one, then fits on all of `train`.
pub fn tune_and_fit(train: &ExceedanceDataset, family: PriorFamily, opts: &TuneOptions) -> Result<TunedFit> {
    let clock = Stopwatch::start();
    let cv = if family.is_tunable() {
        let cfg = CvConfig {
            n_folds: opts.n_folds,
            grid: match &opts.grid {
                Some(g) => g.clone(),
                None => default_grid(family)?,
            },
            seed: opts.seed,
            shrink_intercept: opts.shrink_intercept,
            fit: opts.fit.clone(),
        };
        Some(cross_validate(train, family, &cfg)?)
    } else {
        None
    };
    let spec = PriorSpec::from_family(family, cv.as_ref().map(|c| c.selected))?
        .with_shrink_intercept(opts.shrink_intercept);
    let fit = fit_map(train, &spec, &opts.fit)?;
    Ok(TunedFit { fit, cv, total_time: clock.seconds() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub family: PriorFamily,
    pub hyperparameter: Option<f64>,
    /// Test-set RMSE.
    pub rmse: f64,
    pub aic: f64,
    pub bic: f64,
    pub df: usize,
    pub converged: bool,
    pub time_sec: f64,
    pub fit: FitResult,
}

/// One row per family, in the order given.
pub fn compare_priors(
    train: &ExceedanceDataset,
    test: &ExceedanceDataset,
    families: &[PriorFamily],
    opts: &TuneOptions,
) -> Result<Vec<ComparisonRow>> {
    families
        .iter()
        .map(|&family| {
            let tuned = tune_and_fit(train, family, opts)?;
            let m = evaluate(&tuned.fit, test)?;
            Ok(ComparisonRow {
                family,
                hyperparameter: tuned.fit.prior.hyperparameter(),
                rmse: m.rmse,
                aic: m.aic,
                bic: m.bic,
                df: tuned.fit.df,
                converged: tuned.fit.converged,
                time_sec: tuned.total_time,
                fit: tuned.fit,
            })
        })
        .collect()
}

/// `prior,hyperparameter,rmse,aic,bic,df,converged` with one line per row.
pub fn write_comparison_csv<W: Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["prior", "hyperparameter", "rmse", "aic", "bic", "df", "converged"])?;
    for r in rows {
        w.write_record([
            r.family.name().to_string(),
            r.hyperparameter.map_or_else(String::new, |v| v.to_string()),
            r.rmse.to_string(),
            r.aic.to_string(),
            r.bic.to_string(),
            r.df.to_string(),
            r.converged.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Aligned text table in the same column order as the CSV.
pub fn render_comparison(rows: &[ComparisonRow]) -> String {
    let mut s = format!("{:<10} {:>12} {:>10} {:>10} {:>10} {:>4}\n", "Prior", "Hyper", "RMSE", "AIC", "BIC", "df");
    for r in rows {
        let hyper = r.hyperparameter.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        s.push_str(&format!(
            "{:<10} {:>12} {:>10.4} {:>10.2} {:>10.2} {:>4}\n",
            r.family.label(),
            hyper,
            r.rmse,
            r.aic,
            r.bic,
            r.df
        ));
    }
    s
}
