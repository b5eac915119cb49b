//! MAP estimation of `(beta, xi)` and the metrics reported for a fit.
//!
//! The negative log-posterior is minimised by BFGS from five starts: `beta = 0`
//! with `xi` in `{-0.2, 0.1, 0.4}`, plus two seeded draws of `beta` around
//! zero. Under the Lasso prior small coefficients that satisfy the optimality
//! condition at zero are set exactly to zero and the rest re-optimised.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::clock::Stopwatch;
use crate::error::{check_dim, GprError, Result};
use crate::kv::KvDoc;
use crate::model::{self, clamped_eta, loglik_with_grad, ExceedanceDataset, GprParams, Moment};
use crate::optim::{self, BfgsOptions};
use crate::priors::{self, BetaPrior, GramMatrix, PreparedPrior, PriorFamily, PriorSpec};

/// Coefficients below this magnitude count as zero for the Lasso degrees of freedom.
pub const LASSO_ZERO_TOL: f64 = 1e-4;

/// Predictions switch to the conditional median once `xi` reaches this value.
pub const MEDIAN_FALLBACK_XI: f64 = 0.999;

/// The optimiser stays above this shape; below it the likelihood is unbounded.
pub const XI_LOWER_BOUND: f64 = -1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub seed: u64,
    pub max_iter: usize,
    pub grad_tol: f64,
    /// Shapes of the `beta = 0` starts.
    pub xi_starts: Vec<f64>,
    pub n_random_starts: usize,
    /// Standard deviation of the random `beta` starts.
    pub start_spread: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iter: 500,
            grad_tol: 1e-6,
            xi_starts: vec![-0.2, 0.1, 0.4],
            n_random_starts: 2,
            start_spread: 0.1,
        }
    }
}

impl FitOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: GprParams,
    pub prior: PriorSpec,
    pub feature_names: Vec<String>,
    pub intercept: bool,
    pub mu: f64,
    pub n_obs: usize,
    /// Negative log-likelihood at `params`, prior excluded.
    pub neg_log_lik: f64,
    pub neg_log_posterior: f64,
    pub aic: f64,
    pub bic: f64,
    pub df: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub n_iter: usize,
    pub n_restarts_used: usize,
    /// Seconds.
    pub wall_time: f64,
    /// Training rows whose linear predictor is clamped at `params`.
    pub clamp_events: usize,
}

pub fn aic(neg_log_lik: f64, df: usize) -> f64 {
    2.0 * neg_log_lik + 2.0 * df as f64
}

pub fn bic(neg_log_lik: f64, df: usize, n: usize) -> f64 {
    2.0 * neg_log_lik + df as f64 * (n as f64).ln()
}

/// Effective parameter count: `p + 1`, except under the Lasso where only
/// shrunk coefficients above [`LASSO_ZERO_TOL`] count, plus an exempt
/// intercept and the shape.
pub fn degrees_of_freedom(beta: &[f64], prior: &PriorSpec, has_intercept: bool) -> usize {
    match prior.beta {
        BetaPrior::Lasso { .. } => {
            let first = usize::from(prior.exempts_first(has_intercept));
            first + beta[first..].iter().filter(|b| b.abs() > LASSO_ZERO_TOL).count() + 1
        }
        _ => beta.len() + 1,
    }
}

/// `-[log p(D | theta) + log p(theta)]`; `+inf` off the support or for `xi >= 1`.
pub fn neg_log_posterior(
    data: &ExceedanceDataset,
    params: &GprParams,
    spec: &PriorSpec,
    gram: Option<&GramMatrix>,
) -> Result<f64> {
    check_dim(data.p(), params.beta.len())?;
    let prior = PreparedPrior::new(*spec, data.p(), data.has_intercept(), gram)?;
    Ok(posterior_value(data, &prior, &params.beta, params.xi))
}

fn posterior_value(data: &ExceedanceDataset, prior: &PreparedPrior, beta: &[f64], xi: f64) -> f64 {
    if xi >= 1.0 {
        return f64::INFINITY;
    }
    let ll = model::log_likelihood_raw(data, beta, xi);
    if ll == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let lp_xi = if prior.spec().has_xi_prior() { priors::log_prior_xi_unchecked(xi) } else { 0.0 };
    -(ll + prior.log_prior_beta_unchecked(beta) + lp_xi)
}

/// The objective seen by the optimiser, over `theta = (beta, xi)`.
struct Objective<'a> {
    data: &'a ExceedanceDataset,
    prior: PreparedPrior,
    p: usize,
}

impl Objective<'_> {
    fn lasso_lambda(&self) -> Option<f64> {
        match self.prior.spec().beta {
            BetaPrior::Lasso { lambda } => Some(lambda),
            _ => None,
        }
    }

    fn feasible_xi(xi: f64) -> bool {
        xi > XI_LOWER_BOUND && xi < 1.0
    }

    /// Full negative log-posterior and its (sub)gradient.
    fn full(&self, theta: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (beta, xi) = (&theta[..self.p], theta[self.p]);
        if !Self::feasible_xi(xi) {
            return None;
        }
        let lik = loglik_with_grad(self.data, beta, xi)?;
        let mut grad = lik.grad_beta;
        self.prior.add_grad_beta(beta, &mut grad);
        let mut value = lik.value + self.prior.log_prior_beta_unchecked(beta);
        let mut gxi = lik.grad_xi;
        if self.prior.spec().has_xi_prior() {
            value += priors::log_prior_xi_unchecked(xi);
            gxi += priors::grad_log_prior_xi(xi);
        }
        grad.push(gxi);
        grad.iter_mut().for_each(|g| *g = -*g);
        Some((-value, grad))
    }

    /// Negative log-posterior without the `lambda * |beta|` part of a Lasso prior.
    fn smooth(&self, theta: &[f64], lambda: f64) -> Option<(f64, Vec<f64>)> {
        let (mut f, mut g) = self.full(theta)?;
        let first = self.prior.first_shrunk();
        for j in first..self.p {
            let b = theta[j];
            f -= lambda * b.abs();
            if b != 0.0 {
                g[j] -= lambda * b.signum();
            }
        }
        Some((f, g))
    }

    fn l1(&self, theta: &[f64], lambda: f64) -> f64 {
        lambda * theta[self.prior.first_shrunk()..self.p].iter().map(|b| b.abs()).sum::<f64>()
    }

    /// Norm of the minimum-norm element of the subdifferential.
    fn stationarity(&self, theta: &[f64]) -> Option<f64> {
        match self.lasso_lambda() {
            None => self.full(theta).map(|(_, g)| norm(&g)),
            Some(lambda) => {
                let (_, g) = self.smooth(theta, lambda)?;
                let first = self.prior.first_shrunk();
                let r: Vec<f64> = g
                    .iter()
                    .enumerate()
                    .map(|(j, &gj)| {
                        if j < first || j >= self.p {
                            gj
                        } else if theta[j] != 0.0 {
                            gj + lambda * theta[j].signum()
                        } else {
                            gj.signum() * (gj.abs() - lambda).max(0.0)
                        }
                    })
                    .collect();
                Some(norm(&r))
            }
        }
    }

    fn value(&self, theta: &[f64]) -> f64 {
        match self.lasso_lambda() {
            None => self.full(theta).map_or(f64::INFINITY, |(f, _)| f),
            Some(lambda) => self.smooth(theta, lambda).map_or(f64::INFINITY, |(f, _)| f + self.l1(theta, lambda)),
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Moves a `xi < 0` start inside the support implied by its `beta`.
fn repair_start(data: &ExceedanceDataset, theta: &mut [f64]) {
    let p = data.p();
    let xi = theta[p];
    if xi >= 0.0 {
        return;
    }
    let max_z = data
        .rows()
        .zip(data.y())
        .map(|(row, &y)| (y - data.mu()) * (-clamped_eta(row, &theta[..p]).0).exp())
        .fold(0.0, f64::max);
    if xi * max_z <= -0.5 {
        theta[p] = (-0.5 / max_z).max(XI_LOWER_BOUND * 0.5);
    }
}

struct Candidate {
    theta: Vec<f64>,
    value: f64,
    iters: usize,
}

/// BFGS over the coordinates in `free`, the rest held at their values in `theta`.
fn polish(obj: &Objective<'_>, theta: &[f64], free: &[usize], opts: &BfgsOptions) -> Option<(Vec<f64>, usize)> {
    let expand = |sub: &[f64]| {
        let mut t = theta.to_vec();
        for (k, &j) in free.iter().enumerate() {
            t[j] = sub[k];
        }
        t
    };
    let sub0: Vec<f64> = free.iter().map(|&j| theta[j]).collect();
    let out = optim::minimize(
        |sub| obj.full(&expand(sub)).map(|(f, g)| (f, free.iter().map(|&j| g[j]).collect())),
        sub0,
        opts,
    )?;
    Some((expand(&out.x), out.iters))
}

/// Small shrunk coefficients are candidates for an exact zero. A candidate
/// stays at zero when the smooth part of the gradient there is within
/// `lambda` (the optimality condition at a kink); the remaining coordinates
/// are then re-optimised. Repeats until the zero set settles.
fn lasso_active_set(obj: &Objective<'_>, theta: Vec<f64>, lambda: f64, opts: &BfgsOptions) -> (Vec<f64>, usize) {
    const CANDIDATE: f64 = 1e-2;
    let first = obj.prior.first_shrunk();
    let mut best_val = obj.value(&theta);
    let mut best = theta;
    let mut iters = 0;
    let mut zeros: Vec<usize> = Vec::new();
    for _ in 0..10 {
        let mut trial = best.clone();
        let mut cand: Vec<usize> = (first..obj.p).filter(|&j| best[j].abs() < CANDIDATE).collect();
        for &j in &cand {
            trial[j] = 0.0;
        }
        let Some((_, g)) = obj.smooth(&trial, lambda) else { break };
        cand.retain(|&j| g[j].abs() <= lambda);
        if cand == zeros && zeros.iter().all(|&j| best[j] == 0.0) {
            break;
        }
        zeros = cand;
        let mut trial = best.clone();
        for &j in &zeros {
            trial[j] = 0.0;
        }
        let free: Vec<usize> = (0..trial.len()).filter(|j| !zeros.contains(j)).collect();
        let Some((cand_theta, n)) = polish(obj, &trial, &free, opts) else { break };
        iters += n;
        let v = obj.value(&cand_theta);
        if v <= best_val {
            best_val = v;
            best = cand_theta;
        } else {
            break;
        }
    }
    (best, iters)
}

fn run_start(obj: &Objective<'_>, start: Vec<f64>, opts: &FitOptions) -> Option<Candidate> {
    let bopts = BfgsOptions { max_iter: opts.max_iter, grad_tol: opts.grad_tol, ..BfgsOptions::default() };
    let out = optim::minimize(|t| obj.full(t), start, &bopts)?;
    let mut iters = out.iters;
    let mut theta = out.x;

    if let Some(lambda) = obj.lasso_lambda() {
        let (refined, n) = lasso_active_set(obj, theta, lambda, &bopts);
        theta = refined;
        iters += n;
    }

    let value = obj.value(&theta);
    value.is_finite().then_some(Candidate { theta, value, iters })
}

/// MAP fit of `spec` on `data`.
pub fn fit_map(data: &ExceedanceDataset, spec: &PriorSpec, opts: &FitOptions) -> Result<FitResult> {
    let clock = Stopwatch::start();
    data.ensure_fittable()?;
    let p = data.p();
    let gram = match spec.beta {
        BetaPrior::GPrior { .. } => Some(GramMatrix::from_design(data.x_flat(), p)?),
        _ => None,
    };
    let prior = PreparedPrior::new(*spec, p, data.has_intercept(), gram.as_ref())?;
    let obj = Objective { data, prior, p };

    let mut starts: Vec<Vec<f64>> = opts
        .xi_starts
        .iter()
        .map(|&xi| {
            let mut t = vec![0.0; p + 1];
            t[p] = xi;
            t
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let spread = Normal::new(0.0, opts.start_spread)
        .map_err(|e| GprError::config(format!("start spread: {e}")))?;
    for _ in 0..opts.n_random_starts {
        let mut t: Vec<f64> = (0..p).map(|_| spread.sample(&mut rng)).collect();
        t.push(0.1);
        starts.push(t);
    }

    let n_starts = starts.len();
    let mut best: Option<Candidate> = None;
    let mut used = 0;
    let mut total_iters = 0;
    for mut start in starts {
        repair_start(data, &mut start);
        if let Some(c) = run_start(&obj, start, opts) {
            used += 1;
            total_iters += c.iters;
            if best.as_ref().is_none_or(|b| c.value < b.value) {
                best = Some(c);
            }
        }
    }
    let best = best.ok_or_else(|| GprError::FitFailure {
        restarts: n_starts,
        reason: "no start reached a finite posterior value".into(),
    })?;

    let beta = best.theta[..p].to_vec();
    let xi = best.theta[p];
    let ll = model::log_likelihood_raw(data, &beta, xi);
    let grad_norm = obj.stationarity(&best.theta).unwrap_or(f64::INFINITY);
    let clamp_events = loglik_with_grad(data, &beta, xi).map_or(0, |e| e.clamped_rows);
    let df = degrees_of_freedom(&beta, spec, data.has_intercept());
    let neg_log_lik = -ll;
    Ok(FitResult {
        params: GprParams { beta, xi },
        prior: *spec,
        feature_names: data.feature_names().to_vec(),
        intercept: data.has_intercept(),
        mu: data.mu(),
        n_obs: data.n(),
        neg_log_lik,
        neg_log_posterior: best.value,
        aic: aic(neg_log_lik, df),
        bic: bic(neg_log_lik, df, data.n()),
        df,
        converged: grad_norm < opts.grad_tol && ll.is_finite(),
        grad_norm,
        n_iter: total_iters,
        n_restarts_used: used,
        wall_time: clock.seconds(),
        clamp_events,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub values: Vec<f64>,
    /// Conditional medians were used because `xi` is too close to 1.
    pub median_fallback: bool,
}

/// Point forecast per row: the conditional mean, or the conditional median
/// `mu + sigma (2^xi - 1) / xi` when `xi >= MEDIAN_FALLBACK_XI`.
pub fn predict(data: &ExceedanceDataset, fit: &FitResult) -> Result<Prediction> {
    check_dim(fit.params.beta.len(), data.p())?;
    let xi = fit.params.xi;
    let median_fallback = xi >= MEDIAN_FALLBACK_XI;
    let values = data
        .rows()
        .map(|row| {
            let sigma = clamped_eta(row, &fit.params.beta).0.exp();
            if median_fallback {
                fit.mu + sigma * (xi * std::f64::consts::LN_2).exp_m1() / xi
            } else {
                match model::mean_from_scale(sigma, xi, fit.mu) {
                    Moment::Finite(v) => v,
                    Moment::Infinite => f64::INFINITY,
                }
            }
        })
        .collect();
    Ok(Prediction { values, median_fallback })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub rmse: f64,
    pub aic: f64,
    pub bic: f64,
}

pub fn rmse(observed: &[f64], predicted: &[f64]) -> f64 {
    let n = observed.len().max(1) as f64;
    (observed.iter().zip(predicted).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n).sqrt()
}

/// Test-set RMSE; AIC and BIC are the training values stored in `fit`.
pub fn evaluate(fit: &FitResult, test: &ExceedanceDataset) -> Result<Metrics> {
    let pred = predict(test, fit)?;
    Ok(Metrics { rmse: rmse(test.y(), &pred.values), aic: fit.aic, bic: fit.bic })
}

const FIT_FORMAT: &str = "gpr-fit/1";

impl FitResult {
    pub fn family(&self) -> PriorFamily {
        self.prior.family()
    }

    pub fn to_kv(&self) -> KvDoc {
        let mut doc = KvDoc::new();
        doc.push("format", FIT_FORMAT);
        doc.push("prior", self.prior.family());
        if let (Some(name), Some(v)) = (self.family().hyper_name(), self.prior.hyperparameter()) {
            doc.push(name, v);
        }
        doc.push("shrink_intercept", self.prior.shrink_intercept);
        doc.push("intercept", self.intercept);
        doc.push("mu", self.mu);
        doc.push("n_obs", self.n_obs);
        for (name, b) in self.feature_names.iter().zip(&self.params.beta) {
            doc.push(format!("beta.{name}"), b);
        }
        doc.push("xi", self.params.xi);
        doc.push("neg_log_lik", self.neg_log_lik);
        doc.push("neg_log_posterior", self.neg_log_posterior);
        doc.push("df", self.df);
        doc.push("aic", self.aic);
        doc.push("bic", self.bic);
        doc.push("converged", self.converged);
        doc.push("grad_norm", self.grad_norm);
        doc.push("n_iter", self.n_iter);
        doc.push("n_restarts_used", self.n_restarts_used);
        doc.push("wall_time_sec", self.wall_time);
        doc.push("clamp_events", self.clamp_events);
        doc
    }

    pub fn from_kv(doc: &KvDoc) -> Result<Self> {
        let format = doc.require("format")?;
        if format != FIT_FORMAT {
            return Err(GprError::invalid(format!("unsupported fit format `{format}`")));
        }
        let family: PriorFamily = doc.require("prior")?.parse()?;
        let hyper = match family.hyper_name() {
            Some(name) => Some(doc.parse_value::<f64>(name)?),
            None => None,
        };
        let prior = PriorSpec::from_family(family, hyper)?.with_shrink_intercept(doc.parse_value("shrink_intercept")?);
        let mut feature_names = Vec::new();
        let mut beta = Vec::new();
        for (name, v) in doc.with_prefix("beta.") {
            feature_names.push(name.to_string());
            beta.push(v.parse::<f64>().map_err(|_| GprError::invalid(format!("bad coefficient `{v}`")))?);
        }
        if beta.is_empty() {
            return Err(GprError::invalid("fit file has no coefficients"));
        }
        Ok(Self {
            params: GprParams::new(beta, doc.parse_value("xi")?)?,
            prior,
            feature_names,
            intercept: doc.parse_value("intercept")?,
            mu: doc.parse_value("mu")?,
            n_obs: doc.parse_value("n_obs")?,
            neg_log_lik: doc.parse_value("neg_log_lik")?,
            neg_log_posterior: doc.parse_value("neg_log_posterior")?,
            aic: doc.parse_value("aic")?,
            bic: doc.parse_value("bic")?,
            df: doc.parse_value("df")?,
            converged: doc.parse_value("converged")?,
            grad_norm: doc.parse_value("grad_norm")?,
            n_iter: doc.parse_value("n_iter")?,
            n_restarts_used: doc.parse_value("n_restarts_used")?,
            wall_time: doc.parse_value("wall_time_sec")?,
            clamp_events: doc.parse_value("clamp_events")?,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        self.to_kv().write(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_kv(&KvDoc::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::testkit::synthetic;

    #[test]
    fn flat_prior_posterior_is_negative_likelihood() {
        let (data, truth) = synthetic(200, &[0.2, -0.4], 0.1, 1);
        let nlp = neg_log_posterior(&data, &truth, &PriorSpec::flat(), None).unwrap();
        let ll = model::log_likelihood(&data, &truth).unwrap();
        assert_eq!(nlp, -ll);
    }

    #[test]
    fn posterior_recomposes_from_parts() {
        let (data, truth) = synthetic(150, &[0.1, 0.5, -0.2], 0.2, 2);
        let gram = GramMatrix::from_design(data.x_flat(), data.p()).unwrap();
        for spec in [
            PriorSpec::cauchy(),
            PriorSpec::lasso(0.7).unwrap(),
            PriorSpec::ridge(2.0).unwrap(),
            PriorSpec::g_prior(5.0).unwrap(),
        ] {
            let nlp = neg_log_posterior(&data, &truth, &spec, Some(&gram)).unwrap();
            let parts = -model::log_likelihood(&data, &truth).unwrap()
                - priors::log_prior_beta(&truth.beta, &spec, Some(&gram), true).unwrap()
                - priors::log_prior_xi(truth.xi).unwrap();
            assert!((nlp - parts).abs() <= 1e-12 * nlp.abs().max(1.0), "{spec:?}: {nlp} vs {parts}");
        }
    }

    #[test]
    fn posterior_infinite_beyond_truncation() {
        let (data, _) = synthetic(50, &[0.0, 0.3], 0.1, 3);
        let p = GprParams { beta: vec![0.0, 0.3], xi: 1.2 };
        assert_eq!(neg_log_posterior(&data, &p, &PriorSpec::cauchy(), None).unwrap(), f64::INFINITY);
    }

    #[test]
    fn aic_bic_recompute_from_fields() {
        let (data, _) = synthetic(300, &[0.3, 0.5], 0.15, 4);
        let fit = fit_map(&data, &PriorSpec::cauchy(), &FitOptions::default()).unwrap();
        assert_eq!(fit.aic, 2.0 * fit.neg_log_lik + 2.0 * fit.df as f64);
        assert_eq!(fit.bic, 2.0 * fit.neg_log_lik + fit.df as f64 * (fit.n_obs as f64).ln());
        assert_eq!(fit.df, 3);
        let ll = model::log_likelihood(&data, &fit.params).unwrap();
        assert!((fit.neg_log_lik + ll).abs() <= 1e-10);
        assert!(fit.converged, "{fit:?}");
        assert_eq!(fit.n_restarts_used, 5);
    }

    #[test]
    fn exponential_data_matches_closed_form() {
        // intercept-only, xi = 0: MLE of sigma is the mean excess
        let (data, _) = synthetic(4000, &[0.4], 0.0, 5);
        let fit = fit_map(&data, &PriorSpec::flat(), &FitOptions::default()).unwrap();
        let mean_excess = data.y().iter().map(|y| y - data.mu()).sum::<f64>() / data.n() as f64;
        assert!(fit.params.xi.abs() < 0.05, "xi = {}", fit.params.xi);
        let sigma = fit.params.beta[0].exp();
        assert!((sigma / mean_excess - 1.0).abs() < 0.05, "{sigma} vs {mean_excess}");
    }

    #[test]
    fn huge_ridge_precision_pins_coefficients() {
        let (data, _) = synthetic(400, &[0.2, 0.8, -0.5], 0.1, 6);
        let fit = fit_map(&data, &PriorSpec::ridge(1e8).unwrap(), &FitOptions::default()).unwrap();
        assert!(fit.params.beta[1..].iter().all(|b| b.abs() < 1e-3), "{:?}", fit.params.beta);
    }

    #[test]
    fn ridge_shrinkage_is_monotone() {
        let (data, _) = synthetic(120, &[0.1, 0.9, -0.7, 0.4], 0.1, 7);
        let mut last = f64::INFINITY;
        for tau in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let fit = fit_map(&data, &PriorSpec::ridge(tau).unwrap(), &FitOptions::default()).unwrap();
            let n = norm(&fit.params.beta[1..]);
            assert!(n <= last + 1e-9, "tau {tau}: {n} > {last}");
            last = n;
        }
    }

    #[test]
    fn lasso_produces_exact_zeros_and_adjusts_df() {
        let (data, _) = synthetic(200, &[0.3, 0.0, 0.0, 0.9], 0.1, 8);
        let fit = fit_map(&data, &PriorSpec::lasso(25.0).unwrap(), &FitOptions::default()).unwrap();
        let zeros = fit.params.beta[1..].iter().filter(|b| **b == 0.0).count();
        assert!(zeros >= 1, "{:?}", fit.params.beta);
        assert_eq!(fit.df, degrees_of_freedom(&fit.params.beta, &fit.prior, true));
        assert!(fit.df < 5);
        assert!(fit.converged, "grad {}", fit.grad_norm);
    }

    #[test]
    fn optimum_beats_truth_and_starts() {
        let (data, truth) = synthetic(250, &[0.2, 0.6, -0.3], -0.1, 9);
        for spec in [PriorSpec::cauchy(), PriorSpec::lasso(1.0).unwrap(), PriorSpec::ridge(1.0).unwrap()] {
            let fit = fit_map(&data, &spec, &FitOptions::default()).unwrap();
            let at_truth = neg_log_posterior(&data, &truth, &spec, None).unwrap();
            assert!(fit.neg_log_posterior <= at_truth + 1e-9);
            for xi in [0.1, 0.4] {
                let start = GprParams { beta: vec![0.0; 3], xi };
                assert!(fit.neg_log_posterior <= neg_log_posterior(&data, &start, &spec, None).unwrap());
            }
        }
    }

    #[test]
    fn predictions_delegate_to_conditional_mean() {
        let (data, _) = synthetic(100, &[0.2, 0.4], 0.2, 10);
        let fit = fit_map(&data, &PriorSpec::cauchy(), &FitOptions::default()).unwrap();
        let pred = predict(&data, &fit).unwrap();
        assert!(!pred.median_fallback);
        for (row, v) in data.rows().zip(&pred.values) {
            let m = model::conditional_mean(row, &fit.params, data.mu()).unwrap().value();
            assert!((m - v).abs() <= 1e-12 * m.abs());
        }
    }

    #[test]
    fn zero_params_predict_threshold_plus_one() {
        let (data, _) = synthetic(20, &[0.0], 0.0, 11);
        let mut fit = fit_map(&data, &PriorSpec::cauchy(), &FitOptions::default()).unwrap();
        fit.params = GprParams { beta: vec![0.0], xi: 0.0 };
        let pred = predict(&data, &fit).unwrap();
        assert!(pred.values.iter().all(|&v| v == data.mu() + 1.0));
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_relative_eq!(rmse(&[4.0, 2.0], &[3.0, 3.0]), 1.0);
        let (data, _) = synthetic(60, &[0.1, 0.2], 0.1, 12);
        let fit = fit_map(&data, &PriorSpec::cauchy(), &FitOptions::default()).unwrap();
        let m = evaluate(&fit, &data).unwrap();
        assert_eq!((m.aic, m.bic), (fit.aic, fit.bic));
        let pred = predict(&data, &fit).unwrap();
        assert_eq!(m.rmse, rmse(data.y(), &pred.values));
    }

    #[test]
    fn heavy_tail_fit_triggers_median_fallback() {
        // Pareto-type data with xi = 3 pushes the estimate onto the xi < 1 bound
        let (data, _) = synthetic(400, &[0.0], 3.0, 13);
        let fit = fit_map(&data, &PriorSpec::flat(), &FitOptions::default()).unwrap();
        assert!(fit.params.xi >= MEDIAN_FALLBACK_XI, "xi = {}", fit.params.xi);
        let pred = predict(&data, &fit).unwrap();
        assert!(pred.median_fallback);
        let sigma = fit.params.beta[0].exp();
        let xi = fit.params.xi;
        let median = data.mu() + sigma * (2f64.powf(xi) - 1.0) / xi;
        assert_relative_eq!(pred.values[0], median, max_relative = 1e-12);
    }

    #[test]
    fn fit_file_round_trip() {
        let (data, _) = synthetic(80, &[0.1, 0.3], 0.1, 14);
        let fit = fit_map(&data, &PriorSpec::lasso(0.5).unwrap(), &FitOptions::default()).unwrap();
        let back = FitResult::from_kv(&KvDoc::parse(&fit.to_kv().to_string(), "mem").unwrap()).unwrap();
        assert_eq!(back, fit);
    }
}
