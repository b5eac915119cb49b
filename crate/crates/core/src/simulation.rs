//! Replicated simulation study comparing prior families on synthetic data.
//!
//! Each replication draws `X ~ N(0, I)` (no intercept), `beta ~ N(0, 1)`,
//! `xi ~ U(xi_range)` and `y ~ GPD(mu, exp(X beta), xi)`, splits the rows into
//! train and test, tunes and fits every family on train and scores it on test.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::compare::{tune_and_fit, TuneOptions};
use crate::error::{GprError, Result};
use crate::fit::{evaluate, rmse, FitOptions};
use crate::gpd::GpdParams;
use crate::model::{ExceedanceDataset, GprParams};
use crate::priors::PriorFamily;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_reps: usize,
    pub n_obs: usize,
    pub p: usize,
    pub mu: f64,
    pub xi_range: (f64, f64),
    pub train_frac: f64,
    pub seed: u64,
    pub priors: Vec<PriorFamily>,
    pub n_folds: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_reps: 100,
            n_obs: 100,
            p: 5,
            mu: 2.0,
            xi_range: (-0.5, 0.5),
            train_frac: 0.8,
            seed: 0,
            priors: PriorFamily::STUDY.to_vec(),
            n_folds: 5,
        }
    }
}

impl SimConfig {
    pub fn n_train(&self) -> usize {
        (self.n_obs as f64 * self.train_frac).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GprError::config(m));
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return bad(format!("train fraction must lie in (0, 1), got {}", self.train_frac));
        }
        let (lo, hi) = self.xi_range;
        if !(lo > -1.0 && hi < 1.0 && lo < hi) {
            return bad(format!("shape range ({lo}, {hi}) must be an interval inside (-1, 1)"));
        }
        if self.p == 0 || self.n_reps == 0 {
            return bad("need at least one covariate and one replication".into());
        }
        let (train, test) = (self.n_train(), self.n_obs - self.n_train().min(self.n_obs));
        if train < self.p + 2 || test < self.p + 2 {
            return bad(format!(
                "{} observations split {train}/{test}; both parts need at least p + 2 = {}",
                self.n_obs,
                self.p + 2
            ));
        }
        if !self.mu.is_finite() {
            return bad("threshold must be finite".into());
        }
        if self.priors.is_empty() {
            return bad("no prior families selected".into());
        }
        Ok(())
    }

    fn rng(&self, rep: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(rep as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub train: ExceedanceDataset,
    pub test: ExceedanceDataset,
    pub truth: GprParams,
    /// Seed for the tuning and fitting of this replication.
    pub fit_seed: u64,
}

pub fn generate_replication(cfg: &SimConfig, rep: usize) -> Result<Replication> {
    cfg.validate()?;
    let mut rng = cfg.rng(rep);
    let p = cfg.p;
    let beta: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
    let (lo, hi) = cfg.xi_range;
    let xi = Uniform::new(lo, hi).map_err(|e| GprError::config(e.to_string()))?.sample(&mut rng);

    let mut x = Vec::with_capacity(cfg.n_obs * p);
    let mut y = Vec::with_capacity(cfg.n_obs);
    for _ in 0..cfg.n_obs {
        let row: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        let eta: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
        y.push(GpdParams::new(cfg.mu, eta.exp(), xi)?.sample(&mut rng));
        x.extend(row);
    }
    let names: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    let labels = (0..cfg.n_obs).map(|i| i.to_string()).collect();
    let full = ExceedanceDataset::from_flat(x, y, cfg.mu, names, false)?.with_labels(labels)?;

    let mut order: Vec<usize> = (0..cfg.n_obs).collect();
    order.shuffle(&mut rng);
    let (train_idx, test_idx) = order.split_at(cfg.n_train());
    Ok(Replication {
        train: full.subset(train_idx)?,
        test: full.subset(test_idx)?,
        truth: GprParams { beta, xi },
        fit_seed: rng.next_u64(),
    })
}

/// One family fitted on one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub rep: usize,
    pub family: PriorFamily,
    pub xi_true: f64,
    pub outcome: std::result::Result<RepMetrics, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepMetrics {
    pub rmse_y: f64,
    pub rmse_beta: f64,
    /// `|xi_hat - xi_true|`.
    pub rmse_xi: f64,
    pub aic: f64,
    pub bic: f64,
    /// Cross-validation plus final fit.
    pub time_sec: f64,
    pub xi_hat: f64,
    pub hyperparameter: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub family: PriorFamily,
    pub n_ok: usize,
    pub n_failed: usize,
    pub rmse_y: f64,
    pub rmse_beta: f64,
    pub rmse_xi: f64,
    pub aic: f64,
    pub bic: f64,
    pub time_sec: f64,
    pub time_relative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub summary: Vec<SummaryRow>,
    /// Ordered by replication, then by family as configured.
    pub raw: Vec<RawRow>,
}

fn run_replication(cfg: &SimConfig, rep: usize) -> Result<Vec<RawRow>> {
    let r = generate_replication(cfg, rep)?;
    let opts = TuneOptions {
        n_folds: cfg.n_folds,
        grid: None,
        seed: r.fit_seed,
        shrink_intercept: false,
        fit: FitOptions::default().with_seed(r.fit_seed),
    };
    Ok(cfg
        .priors
        .iter()
        .map(|&family| {
            let outcome = tune_and_fit(&r.train, family, &opts)
                .and_then(|t| {
                    let m = evaluate(&t.fit, &r.test)?;
                    Ok(RepMetrics {
                        rmse_y: m.rmse,
                        rmse_beta: rmse(&t.fit.params.beta, &r.truth.beta),
                        rmse_xi: (t.fit.params.xi - r.truth.xi).abs(),
                        aic: m.aic,
                        bic: m.bic,
                        time_sec: t.total_time,
                        xi_hat: t.fit.params.xi,
                        hyperparameter: t.fit.prior.hyperparameter(),
                        converged: t.fit.converged,
                    })
                })
                .map_err(|e| e.to_string());
            RawRow { rep, family, xi_true: r.truth.xi, outcome }
        })
        .collect())
}

pub fn run_study(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    let per_rep: Vec<Result<Vec<RawRow>>> = {
        use rayon::prelude::*;
        (0..cfg.n_reps).into_par_iter().map(|rep| run_replication(cfg, rep)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_rep: Vec<Result<Vec<RawRow>>> = (0..cfg.n_reps).map(|rep| run_replication(cfg, rep)).collect();

    let mut raw = Vec::with_capacity(cfg.n_reps * cfg.priors.len());
    for rows in per_rep {
        raw.extend(rows?);
    }
    for row in &raw {
        if let Err(e) = &row.outcome {
            log::warn!("replication {} ({}) failed: {e}", row.rep, row.family);
        }
    }
    Ok(SimReport { summary: summarize(&raw, &cfg.priors), raw })
}

/// Median of the finite values; NaN if there are none.
pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Per-family medians over successful replications. Times are relative to the
/// Cauchy row, or to the first family when Cauchy was not run.
pub fn summarize(raw: &[RawRow], families: &[PriorFamily]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = families
        .iter()
        .map(|&family| {
            let ok: Vec<RepMetrics> = raw
                .iter()
                .filter(|r| r.family == family)
                .filter_map(|r| r.outcome.as_ref().ok().copied())
                .collect();
            let n_failed = raw.iter().filter(|r| r.family == family && r.outcome.is_err()).count();
            let col = |f: fn(&RepMetrics) -> f64| median(&ok.iter().map(f).collect::<Vec<_>>());
            SummaryRow {
                family,
                n_ok: ok.len(),
                n_failed,
                rmse_y: col(|m| m.rmse_y),
                rmse_beta: col(|m| m.rmse_beta),
                rmse_xi: col(|m| m.rmse_xi),
                aic: col(|m| m.aic),
                bic: col(|m| m.bic),
                time_sec: col(|m| m.time_sec),
                time_relative: f64::NAN,
            }
        })
        .collect();
    let base_idx = rows.iter().position(|r| r.family == PriorFamily::Cauchy).unwrap_or(0);
    let base = rows.get(base_idx).map_or(f64::NAN, |r| r.time_sec);
    for (i, r) in rows.iter_mut().enumerate() {
        r.time_relative = if i == base_idx { 1.0 } else { r.time_sec / base };
    }
    rows
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "prior", "n_ok", "n_failed", "rmse_y", "rmse_beta", "rmse_xi", "aic", "bic", "time_sec", "time_relative",
    ])?;
    for r in rows {
        w.write_record([
            r.family.name().to_string(),
            r.n_ok.to_string(),
            r.n_failed.to_string(),
            r.rmse_y.to_string(),
            r.rmse_beta.to_string(),
            r.rmse_xi.to_string(),
            r.aic.to_string(),
            r.bic.to_string(),
            r.time_sec.to_string(),
            r.time_relative.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_raw_csv<W: Write>(rows: &[RawRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "rep", "prior", "ok", "rmse_y", "rmse_beta", "rmse_xi", "aic", "bic", "time_sec", "xi_true", "xi_hat",
        "hyperparameter", "converged", "error",
    ])?;
    for r in rows {
        let mut rec = vec![r.rep.to_string(), r.family.name().to_string()];
        match &r.outcome {
            Ok(m) => rec.extend([
                "true".to_string(),
                m.rmse_y.to_string(),
                m.rmse_beta.to_string(),
                m.rmse_xi.to_string(),
                m.aic.to_string(),
                m.bic.to_string(),
                m.time_sec.to_string(),
                r.xi_true.to_string(),
                m.xi_hat.to_string(),
                opt(m.hyperparameter),
                m.converged.to_string(),
                String::new(),
            ]),
            Err(e) => {
                rec.push("false".to_string());
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push(r.xi_true.to_string());
                rec.extend(std::iter::repeat_n(String::new(), 3));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Metrics as rows, families as columns.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut s = format!("{:<16}", "Metric");
    for r in rows {
        s.push_str(&format!(" {:>10}", r.family.label()));
    }
    s.push('\n');
    let lines: [(&str, fn(&SummaryRow) -> f64, usize); 7] = [
        ("RMSE (y)", |r| r.rmse_y, 2),
        ("RMSE (beta)", |r| r.rmse_beta, 2),
        ("RMSE (xi)", |r| r.rmse_xi, 2),
        ("AIC", |r| r.aic, 2),
        ("BIC", |r| r.bic, 2),
        ("Time (sec)", |r| r.time_sec, 6),
        ("Time (relative)", |r| r.time_relative, 2),
    ];
    for (name, f, prec) in lines {
        s.push_str(&format!("{name:<16}"));
        for r in rows {
            s.push_str(&format!(" {:>10.prec$}", f(r)));
        }
        s.push('\n');
    }
    let failed: usize = rows.iter().map(|r| r.n_failed).sum();
    if failed > 0 {
        s.push_str(&format!("({failed} failed fits excluded from medians)\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_split_sizes() {
        let r = generate_replication(&SimConfig::default(), 0).unwrap();
        assert_eq!((r.train.n(), r.test.n()), (80, 20));
        assert!(r.train.y().iter().chain(r.test.y()).all(|&y| y > 2.0));
        assert!(!r.train.has_intercept());
        assert!(r.truth.xi > -0.5 && r.truth.xi < 0.5);
    }

    #[test]
    fn replication_is_deterministic_and_partitions() {
        let cfg = SimConfig { seed: 11, ..SimConfig::default() };
        let a = generate_replication(&cfg, 3).unwrap();
        assert_eq!(a, generate_replication(&cfg, 3).unwrap());
        assert_ne!(a.truth, generate_replication(&cfg, 4).unwrap().truth);
        let mut labels: Vec<usize> =
            a.train.labels().iter().chain(a.test.labels()).map(|l| l.parse().unwrap()).collect();
        labels.sort_unstable();
        assert_eq!(labels, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn single_rep_single_prior_reports_that_fit() {
        let cfg = SimConfig { n_reps: 1, priors: vec![PriorFamily::Cauchy], seed: 5, ..SimConfig::default() };
        let report = run_study(&cfg).unwrap();
        assert_eq!(report.summary.len(), 1);
        let m = report.raw[0].outcome.clone().unwrap();
        let s = &report.summary[0];
        assert_eq!((s.rmse_y, s.rmse_beta, s.rmse_xi, s.aic, s.bic), (m.rmse_y, m.rmse_beta, m.rmse_xi, m.aic, m.bic));
        assert_eq!(s.time_relative, 1.0);
        assert!(render_table(&report.summary).contains("Time (relative)"));
    }

    #[test]
    fn invalid_configs_rejected() {
        for cfg in [
            SimConfig { train_frac: 1.0, ..SimConfig::default() },
            SimConfig { xi_range: (-1.5, 0.5), ..SimConfig::default() },
            SimConfig { n_obs: 10, ..SimConfig::default() },
            SimConfig { priors: vec![], ..SimConfig::default() },
        ] {
            assert!(matches!(cfg.validate(), Err(GprError::InvalidConfig(_))), "{cfg:?}");
        }
    }
}
