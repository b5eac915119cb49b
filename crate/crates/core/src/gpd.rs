//! Generalised Pareto primitives for a single `(mu, sigma, xi)` triple.
//!
//! Density `f(y) = (1/sigma) (1 + xi (y - mu)/sigma)^(-1/xi - 1)` on the set
//! where `1 + xi (y - mu)/sigma > 0` and `y >= mu`. For `|xi| < XI_LIMIT_TOL`
//! every function switches to the exponential law with mean `sigma`.

use rand::Rng;

use crate::error::{check_finite, GprError, Result};

/// Below this magnitude the shape is treated as exactly zero.
pub const XI_LIMIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpdParams {
    mu: f64,
    sigma: f64,
    xi: f64,
}

impl GpdParams {
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self> {
        check_finite("mu", mu)?;
        check_finite("sigma", sigma)?;
        check_finite("xi", xi)?;
        if sigma <= 0.0 {
            return Err(GprError::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { mu, sigma, xi })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    fn is_exponential(&self) -> bool {
        self.xi.abs() < XI_LIMIT_TOL
    }

    /// Largest point of the support: `mu - sigma/xi` for `xi < 0`, `+inf` otherwise.
    pub fn upper_endpoint(&self) -> f64 {
        if self.xi < 0.0 && !self.is_exponential() {
            self.mu - self.sigma / self.xi
        } else {
            f64::INFINITY
        }
    }

    /// `log f(y)`; `-inf` outside the support.
    pub fn log_density(&self, y: f64) -> Result<f64> {
        check_finite("y", y)?;
        Ok(log_density_unchecked(y, self.mu, self.sigma, self.xi))
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        check_finite("y", y)?;
        let z = (y - self.mu) / self.sigma;
        if z <= 0.0 {
            return Ok(0.0);
        }
        if self.is_exponential() {
            return Ok(-(-z).exp_m1());
        }
        let t = self.xi * z;
        if t <= -1.0 {
            return Ok(1.0);
        }
        Ok(-(-t.ln_1p() / self.xi).exp_m1())
    }

    /// `P(Y > y)`, evaluated directly rather than as `1 - cdf`.
    pub fn survival(&self, y: f64) -> Result<f64> {
        check_finite("y", y)?;
        Ok(survival_unchecked(y, self.mu, self.sigma, self.xi))
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&q) {
            return Err(GprError::invalid(format!("quantile level must lie in [0, 1), got {q}")));
        }
        Ok(self.quantile_unchecked(q))
    }

    fn quantile_unchecked(&self, q: f64) -> f64 {
        // log(1 - q), accurate for small q
        let log_surv = (-q).ln_1p();
        if self.is_exponential() {
            self.mu - self.sigma * log_surv
        } else {
            self.mu + self.sigma * (-self.xi * log_surv).exp_m1() / self.xi
        }
    }

    /// One inverse-transform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile_unchecked(u)
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

pub(crate) fn log_density_unchecked(y: f64, mu: f64, sigma: f64, xi: f64) -> f64 {
    let z = (y - mu) / sigma;
    if z < 0.0 {
        return f64::NEG_INFINITY;
    }
    if xi.abs() < XI_LIMIT_TOL {
        return -sigma.ln() - z;
    }
    let t = xi * z;
    if t <= -1.0 {
        return f64::NEG_INFINITY;
    }
    -sigma.ln() - (1.0 / xi + 1.0) * t.ln_1p()
}

pub(crate) fn survival_unchecked(y: f64, mu: f64, sigma: f64, xi: f64) -> f64 {
    let z = (y - mu) / sigma;
    if z <= 0.0 {
        return 1.0;
    }
    if xi.abs() < XI_LIMIT_TOL {
        return (-z).exp();
    }
    let t = xi * z;
    if t <= -1.0 {
        return 0.0;
    }
    (-t.ln_1p() / xi).exp()
}
