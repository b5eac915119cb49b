//! Generalised Pareto regression: `y_i ~ GPD(mu, exp(x_i' beta), xi)`.

use crate::error::{check_dim, check_finite, GprError, Result};
use crate::gpd::{self, XI_LIMIT_TOL};

/// Linear predictors are clamped to this magnitude before exponentiation.
pub const ETA_CLAMP: f64 = 50.0;

/// Exceedances with their design. Rows are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceDataset {
    x: Vec<f64>,
    y: Vec<f64>,
    n: usize,
    p: usize,
    mu: f64,
    feature_names: Vec<String>,
    intercept: bool,
    labels: Vec<String>,
}

impl ExceedanceDataset {
    /// `intercept` declares that column 0 is the all-ones intercept.
    pub fn new(
        rows: Vec<Vec<f64>>,
        y: Vec<f64>,
        mu: f64,
        feature_names: Vec<String>,
        intercept: bool,
    ) -> Result<Self> {
        let p = feature_names.len();
        let mut x = Vec::with_capacity(rows.len() * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(GprError::invalid(format!(
                    "row {i} has {} columns, expected {p}",
                    row.len()
                )));
            }
            x.extend_from_slice(row);
        }
        Self::from_flat(x, y, mu, feature_names, intercept)
    }

    pub fn from_flat(x: Vec<f64>, y: Vec<f64>, mu: f64, feature_names: Vec<String>, intercept: bool) -> Result<Self> {
        let p = feature_names.len();
        if p == 0 {
            return Err(GprError::invalid("design needs at least one column"));
        }
        check_finite("mu", mu)?;
        let n = y.len();
        check_dim(n * p, x.len())?;
        if n == 0 {
            return Err(GprError::invalid("dataset has no rows"));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(GprError::invalid(format!("non-finite design entry in row {}", i / p)));
        }
        if let Some(i) = y.iter().position(|&v| !(v.is_finite() && v > mu)) {
            return Err(GprError::invalid(format!(
                "response {i} = {} does not exceed the threshold {mu}",
                y[i]
            )));
        }
        if intercept && (0..n).any(|i| x[i * p] != 1.0) {
            return Err(GprError::invalid("intercept column must be all ones"));
        }
        Ok(Self {
            x,
            y,
            n,
            p,
            mu,
            feature_names,
            intercept,
            labels: Vec::new(),
        })
    }

    /// Fitting needs `n >= p + 2`; held-out sets may be smaller.
    pub fn ensure_fittable(&self) -> Result<()> {
        if self.n < self.p + 2 {
            return Err(GprError::invalid(format!(
                "need at least p + 2 = {} observations to fit, got {}",
                self.p + 2,
                self.n
            )));
        }
        Ok(())
    }

    /// Attaches one label (typically a date) per row.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        check_dim(self.n, labels.len())?;
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_flat(&self) -> &[f64] {
        &self.x
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.p)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Rows `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let mut x = Vec::with_capacity(idx.len() * self.p);
        let mut y = Vec::with_capacity(idx.len());
        for &i in idx {
            if i >= self.n {
                return Err(GprError::invalid(format!("row index {i} out of range")));
            }
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        let out = Self::from_flat(x, y, self.mu, self.feature_names.clone(), self.intercept)?;
        if self.labels.is_empty() {
            Ok(out)
        } else {
            out.with_labels(idx.iter().map(|&i| self.labels[i].clone()).collect())
        }
    }

    /// Same rows with a replaced design (column count and names may change).
    pub fn with_design(&self, x: Vec<f64>, feature_names: Vec<String>, intercept: bool) -> Result<Self> {
        let out = Self::from_flat(x, self.y.clone(), self.mu, feature_names, intercept)?;
        if self.labels.is_empty() {
            Ok(out)
        } else {
            out.with_labels(self.labels.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GprParams {
    pub beta: Vec<f64>,
    pub xi: f64,
}

impl GprParams {
    pub fn new(beta: Vec<f64>, xi: f64) -> Result<Self> {
        check_finite("xi", xi)?;
        if xi >= 1.0 {
            return Err(GprError::invalid(format!("xi must be below 1, got {xi}")));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(GprError::invalid("beta must be finite"));
        }
        Ok(Self { beta, xi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub value: f64,
    /// The linear predictor hit the `±ETA_CLAMP` guard.
    pub clamped: bool,
}

/// Either a finite moment or a marker that it does not exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn value(self) -> f64 {
        match self {
            Moment::Finite(v) => v,
            Moment::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Moment::Finite(_))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn clamped_eta(row: &[f64], beta: &[f64]) -> (f64, bool) {
    let eta = dot(row, beta);
    if eta > ETA_CLAMP {
        (ETA_CLAMP, true)
    } else if eta < -ETA_CLAMP {
        (-ETA_CLAMP, true)
    } else {
        (eta, false)
    }
}

/// `exp(x' beta)` with the linear predictor clamped to `±ETA_CLAMP`.
pub fn scale_at(x_row: &[f64], beta: &[f64]) -> Result<Scale> {
    check_dim(beta.len(), x_row.len())?;
    let (eta, clamped) = clamped_eta(x_row, beta);
    Ok(Scale { value: eta.exp(), clamped })
}

/// Sum of GPD log-densities; `-inf` as soon as one response leaves the support.
pub fn log_likelihood(data: &ExceedanceDataset, params: &GprParams) -> Result<f64> {
    check_dim(data.p(), params.beta.len())?;
    Ok(log_likelihood_raw(data, &params.beta, params.xi))
}

pub(crate) fn log_likelihood_raw(data: &ExceedanceDataset, beta: &[f64], xi: f64) -> f64 {
    let mut total = 0.0;
    for (row, &y) in data.rows().zip(data.y()) {
        let (eta, _) = clamped_eta(row, beta);
        let l = gpd::log_density_unchecked(y, data.mu, eta.exp(), xi);
        if l == f64::NEG_INFINITY {
            return l;
        }
        total += l;
    }
    total
}

/// Log-likelihood value and gradient in `(beta, xi)`, or `None` outside the support.
#[derive(Debug, Clone)]
pub(crate) struct LikEval {
    pub value: f64,
    pub grad_beta: Vec<f64>,
    pub grad_xi: f64,
    pub clamped_rows: usize,
}

pub(crate) fn loglik_with_grad(data: &ExceedanceDataset, beta: &[f64], xi: f64) -> Option<LikEval> {
    let p = data.p();
    let mut value = 0.0;
    let mut grad_beta = vec![0.0; p];
    let mut grad_xi = 0.0;
    let mut clamped_rows = 0;
    let exponential = xi.abs() < XI_LIMIT_TOL;
    let series = xi.abs() < 1e-6;
    for (row, &y) in data.rows().zip(data.y()) {
        let (eta, clamped) = clamped_eta(row, beta);
        let z = (y - data.mu) * (-eta).exp();
        let (l, d_eta, d_xi);
        if exponential {
            l = -eta - z;
            d_eta = z - 1.0;
        } else {
            let a = xi * z;
            if a <= -1.0 {
                return None;
            }
            let t = 1.0 + a;
            let log_t = a.ln_1p();
            l = -eta - (1.0 / xi + 1.0) * log_t;
            d_eta = (1.0 + xi) * z / t - 1.0;
        }
        if series {
            // expansion of log(t)/xi^2 - (1/xi + 1) z/t around xi = 0
            d_xi = 0.5 * z * z - z + xi * (z * z - 2.0 * z * z * z / 3.0);
        } else {
            let a = xi * z;
            d_xi = a.ln_1p() / (xi * xi) - (1.0 / xi + 1.0) * z / (1.0 + a);
        }
        value += l;
        grad_xi += d_xi;
        if clamped {
            clamped_rows += 1;
        } else {
            for (g, x) in grad_beta.iter_mut().zip(row) {
                *g += d_eta * x;
            }
        }
    }
    Some(LikEval { value, grad_beta, grad_xi, clamped_rows })
}

/// Analytic gradient `(d/d beta, d/d xi)` of the log-likelihood.
pub fn grad_log_likelihood(data: &ExceedanceDataset, params: &GprParams) -> Result<(Vec<f64>, f64)> {
    check_dim(data.p(), params.beta.len())?;
    let eval = loglik_with_grad(data, &params.beta, params.xi)
        .ok_or_else(|| GprError::invalid("gradient undefined: a response lies outside the support"))?;
    Ok((eval.grad_beta, eval.grad_xi))
}

/// `E[Y | Y > mu, x] = mu + exp(x' beta) / (1 - xi)` for `xi < 1`.
pub fn conditional_mean(x_row: &[f64], params: &GprParams, mu: f64) -> Result<Moment> {
    let s = scale_at(x_row, &params.beta)?;
    Ok(mean_from_scale(s.value, params.xi, mu))
}

pub(crate) fn mean_from_scale(sigma: f64, xi: f64, mu: f64) -> Moment {
    if xi >= 1.0 {
        Moment::Infinite
    } else {
        Moment::Finite(mu + sigma / (1.0 - xi))
    }
}

/// `Var[Y | Y > mu, x] = exp(2 x' beta) / ((1 - xi)^2 (1 - 2 xi))` for `xi < 1/2`.
pub fn conditional_variance(x_row: &[f64], params: &GprParams) -> Result<Moment> {
    let s = scale_at(x_row, &params.beta)?;
    let xi = params.xi;
    if xi >= 0.5 {
        return Ok(Moment::Infinite);
    }
    Ok(Moment::Finite(s.value * s.value / ((1.0 - xi).powi(2) * (1.0 - 2.0 * xi))))
}

/// `P(Y > y0 | Y > mu, x)`.
pub fn exceedance_prob(x_row: &[f64], params: &GprParams, mu: f64, y0: f64) -> Result<f64> {
    check_finite("y0", y0)?;
    check_finite("mu", mu)?;
    if y0 < mu {
        return Err(GprError::invalid(format!("y0 = {y0} lies below the threshold {mu}")));
    }
    let s = scale_at(x_row, &params.beta)?;
    Ok(gpd::survival_unchecked(y0, mu, s.value, params.xi))
}
