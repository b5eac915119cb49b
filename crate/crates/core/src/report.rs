//! Tail-risk tables from a fitted model: crash probability and expected loss
//! along one covariate, and fitted against observed losses.

use std::io::{Read, Write};

use crate::error::{check_dim, GprError, Result};
use crate::fit::{predict, FitResult};
use crate::gpd;
use crate::model::{clamped_eta, mean_from_scale, ExceedanceDataset, Moment};
use crate::pipeline::Standardizer;

/// Linear-interpolation quantile (`q` in `[0, 1]`) of unsorted values.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveOptions {
    /// Covariate that is swept.
    pub sweep: String,
    /// Loss level whose conditional exceedance probability is reported.
    pub y0: f64,
    /// Percentiles (0-100) of the sweep column.
    pub percentiles: Vec<f64>,
    /// Quantile (0-1) at which the other covariates are held.
    pub pin_quantile: f64,
}

impl CurveOptions {
    /// Fifth to 95th percentile in steps of 5, other covariates at their medians.
    pub fn new(sweep: &str, y0: f64) -> Self {
        Self {
            sweep: sweep.into(),
            y0,
            percentiles: (1..=19).map(|k| 5.0 * k as f64).collect(),
            pin_quantile: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub percentile: f64,
    /// Sweep covariate in model units.
    pub value: f64,
    /// `P(Y > y0 | Y > mu, x)`.
    pub prob: f64,
    /// `E[Y | Y > mu, x]`, infinite when `xi >= 1`.
    pub expected_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrashCurve {
    pub sweep: String,
    pub y0: f64,
    /// The covariate row used, with the sweep entry varying.
    pub pinned: Vec<f64>,
    pub points: Vec<CurvePoint>,
}

/// Evaluates the fitted model along percentiles of `opts.sweep` in `data`,
/// the other covariates held at their `pin_quantile` quantile.
pub fn crash_curve(fit: &FitResult, data: &ExceedanceDataset, opts: &CurveOptions) -> Result<CrashCurve> {
    check_dim(fit.params.beta.len(), data.p())?;
    let j = data
        .feature_index(&opts.sweep)
        .filter(|&j| !(data.has_intercept() && j == 0))
        .ok_or_else(|| GprError::invalid(format!("`{}` is not a fitted covariate", opts.sweep)))?;
    if !(opts.y0 >= fit.mu) {
        return Err(GprError::invalid(format!("y0 = {} must not be below the threshold {}", opts.y0, fit.mu)));
    }
    if let Some(p) = opts.percentiles.iter().find(|p| !(0.0..=100.0).contains(*p)) {
        return Err(GprError::invalid(format!("percentile {p} outside [0, 100]")));
    }
    let mut pinned: Vec<f64> = (0..data.p()).map(|k| quantile(&data.column(k), opts.pin_quantile)).collect();
    if data.has_intercept() {
        pinned[0] = 1.0;
    }
    let sweep_col = data.column(j);
    let xi = fit.params.xi;
    let points = opts
        .percentiles
        .iter()
        .map(|&pct| {
            let value = quantile(&sweep_col, pct / 100.0);
            let mut row = pinned.clone();
            row[j] = value;
            let sigma = clamped_eta(&row, &fit.params.beta).0.exp();
            let prob = gpd::survival_unchecked(opts.y0, fit.mu, sigma, xi);
            let expected_loss = match mean_from_scale(sigma, xi, fit.mu) {
                Moment::Finite(m) => m,
                Moment::Infinite => f64::INFINITY,
            };
            CurvePoint { percentile: pct, value, prob, expected_loss }
        })
        .collect();
    Ok(CrashCurve { sweep: opts.sweep.clone(), y0: opts.y0, pinned, points })
}

impl CrashCurve {
    /// `percentile,value[,raw_value],prob,expected_loss`; `raw_value` undoes
    /// the standardisation when one is given.
    pub fn write_csv<W: Write>(&self, standardizer: Option<&Standardizer>, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let raw = standardizer.filter(|s| s.invert_value(&self.sweep, 0.0).is_some());
        let mut header = vec!["percentile", "value"];
        if raw.is_some() {
            header.push("raw_value");
        }
        header.extend(["prob", "expected_loss"]);
        w.write_record(&header)?;
        for p in &self.points {
            let mut rec = vec![p.percentile.to_string(), p.value.to_string()];
            if let Some(s) = raw {
                rec.push(s.invert_value(&self.sweep, p.value).unwrap_or(f64::NAN).to_string());
            }
            rec.extend([p.prob.to_string(), p.expected_loss.to_string()]);
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedRow {
    pub label: String,
    pub observed: f64,
    pub fitted: f64,
    pub covariates: Vec<f64>,
}

impl FittedRow {
    pub fn log_observed(&self) -> f64 {
        self.observed.ln()
    }

    pub fn log_fitted(&self) -> f64 {
        self.fitted.ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedTable {
    pub covariate_names: Vec<String>,
    pub rows: Vec<FittedRow>,
}

/// One row per observation with the model's point prediction.
pub fn fitted_vs_observed(fit: &FitResult, data: &ExceedanceDataset) -> Result<FittedTable> {
    let pred = predict(data, fit)?;
    let first = usize::from(data.has_intercept());
    let rows = (0..data.n())
        .map(|i| FittedRow {
            label: data.labels().get(i).cloned().unwrap_or_else(|| i.to_string()),
            observed: data.y()[i],
            fitted: pred.values[i],
            covariates: data.row(i)[first..].to_vec(),
        })
        .collect();
    Ok(FittedTable { covariate_names: data.feature_names()[first..].to_vec(), rows })
}

const FITTED_FIXED: [&str; 5] = ["label", "observed", "fitted", "log_observed", "log_fitted"];

impl FittedTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = FITTED_FIXED.iter().map(|s| s.to_string()).collect();
        header.extend(self.covariate_names.iter().cloned());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                r.label.clone(),
                r.observed.to_string(),
                r.fitted.to_string(),
                r.log_observed().to_string(),
                r.log_fitted().to_string(),
            ];
            rec.extend(r.covariates.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, origin: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.len() < FITTED_FIXED.len() || headers.iter().zip(FITTED_FIXED).any(|(a, b)| a != b) {
            return Err(GprError::Parse {
                path: origin.into(),
                line: 1,
                message: format!("expected header starting `{}`", FITTED_FIXED.join(",")),
            });
        }
        let covariate_names = headers.iter().skip(FITTED_FIXED.len()).map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let nums: Vec<f64> = rec
                .iter()
                .skip(1)
                .map(|v| {
                    v.parse::<f64>().map_err(|_| GprError::Parse {
                        path: origin.into(),
                        line,
                        message: format!("unparseable number `{v}`"),
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(FittedRow {
                label: rec[0].to_string(),
                observed: nums[0],
                fitted: nums[1],
                covariates: nums[4..].to_vec(),
            });
        }
        Ok(Self { covariate_names, rows })
    }
}
