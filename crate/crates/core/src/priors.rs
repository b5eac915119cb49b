//! Log-priors on the shape `xi` and the regression coefficients `beta`.
//!
//! Every density keeps its exact normalising constant. The shape prior is a
//! standard Cauchy truncated to `xi < 1`, which has mass `3/4` below one, so
//! its density is `4 / (3 pi (1 + xi^2))`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, check_finite, GprError, Result};

/// `log(4 / (3 pi))`.
pub const LOG_TRUNC_CAUCHY_CONST: f64 = -0.857_047_813_397_619_2;

/// Which family of prior sits on `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PriorFamily {
    /// No prior on either `beta` or `xi` (maximum likelihood).
    Flat,
    Cauchy,
    Lasso,
    Ridge,
    GPrior,
}

impl PriorFamily {
    /// The four regularising families, in reporting order.
    pub const STUDY: [PriorFamily; 4] = [
        PriorFamily::Cauchy,
        PriorFamily::Lasso,
        PriorFamily::Ridge,
        PriorFamily::GPrior,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PriorFamily::Flat => "flat",
            PriorFamily::Cauchy => "cauchy",
            PriorFamily::Lasso => "lasso",
            PriorFamily::Ridge => "ridge",
            PriorFamily::GPrior => "gprior",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PriorFamily::Flat => "Flat",
            PriorFamily::Cauchy => "Cauchy",
            PriorFamily::Lasso => "Lasso",
            PriorFamily::Ridge => "Ridge",
            PriorFamily::GPrior => "g-prior",
        }
    }

    pub fn is_tunable(self) -> bool {
        matches!(self, PriorFamily::Lasso | PriorFamily::Ridge | PriorFamily::GPrior)
    }

    /// Name of the hyperparameter, if the family has one.
    pub fn hyper_name(self) -> Option<&'static str> {
        match self {
            PriorFamily::Lasso => Some("lambda"),
            PriorFamily::Ridge => Some("tau"),
            PriorFamily::GPrior => Some("g"),
            PriorFamily::Flat | PriorFamily::Cauchy => None,
        }
    }
}

impl fmt::Display for PriorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PriorFamily {
    type Err = GprError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "flat" | "mle" => Ok(PriorFamily::Flat),
            "cauchy" => Ok(PriorFamily::Cauchy),
            "lasso" | "laplace" => Ok(PriorFamily::Lasso),
            "ridge" | "gaussian" => Ok(PriorFamily::Ridge),
            "gprior" | "g-prior" | "zellner" => Ok(PriorFamily::GPrior),
            other => Err(GprError::invalid(format!("unknown prior family `{other}`"))),
        }
    }
}

/// Prior family with its hyperparameter. The enum shape guarantees exactly
/// the matching hyperparameter is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaPrior {
    Flat,
    Cauchy,
    Lasso { lambda: f64 },
    Ridge { tau: f64 },
    GPrior { g: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub beta: BetaPrior,
    /// Whether a leading intercept coefficient is shrunk too. When false the
    /// intercept gets a flat prior.
    pub shrink_intercept: bool,
}

impl PriorSpec {
    pub fn flat() -> Self {
        Self { beta: BetaPrior::Flat, shrink_intercept: false }
    }

    pub fn cauchy() -> Self {
        Self { beta: BetaPrior::Cauchy, shrink_intercept: false }
    }

    pub fn lasso(lambda: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        Ok(Self { beta: BetaPrior::Lasso { lambda }, shrink_intercept: false })
    }

    pub fn ridge(tau: f64) -> Result<Self> {
        positive("tau", tau)?;
        Ok(Self { beta: BetaPrior::Ridge { tau }, shrink_intercept: false })
    }

    pub fn g_prior(g: f64) -> Result<Self> {
        positive("g", g)?;
        Ok(Self { beta: BetaPrior::GPrior { g }, shrink_intercept: false })
    }

    /// Builds the spec for `family`; `hyper` is required iff the family is tunable.
    pub fn from_family(family: PriorFamily, hyper: Option<f64>) -> Result<Self> {
        match (family, hyper) {
            (PriorFamily::Flat, None) => Ok(Self::flat()),
            (PriorFamily::Cauchy, None) => Ok(Self::cauchy()),
            (PriorFamily::Lasso, Some(v)) => Self::lasso(v),
            (PriorFamily::Ridge, Some(v)) => Self::ridge(v),
            (PriorFamily::GPrior, Some(v)) => Self::g_prior(v),
            (f, Some(_)) => Err(GprError::invalid(format!("{f} prior takes no hyperparameter"))),
            (f, None) => Err(GprError::invalid(format!("{f} prior needs a hyperparameter"))),
        }
    }

    pub fn with_shrink_intercept(mut self, shrink: bool) -> Self {
        self.shrink_intercept = shrink;
        self
    }

    pub fn family(&self) -> PriorFamily {
        match self.beta {
            BetaPrior::Flat => PriorFamily::Flat,
            BetaPrior::Cauchy => PriorFamily::Cauchy,
            BetaPrior::Lasso { .. } => PriorFamily::Lasso,
            BetaPrior::Ridge { .. } => PriorFamily::Ridge,
            BetaPrior::GPrior { .. } => PriorFamily::GPrior,
        }
    }

    pub fn hyperparameter(&self) -> Option<f64> {
        match self.beta {
            BetaPrior::Lasso { lambda } => Some(lambda),
            BetaPrior::Ridge { tau } => Some(tau),
            BetaPrior::GPrior { g } => Some(g),
            BetaPrior::Flat | BetaPrior::Cauchy => None,
        }
    }

    /// Whether the truncated Cauchy prior on `xi` is active.
    pub fn has_xi_prior(&self) -> bool {
        !matches!(self.beta, BetaPrior::Flat)
    }

    /// Whether coefficient 0 is exempt from shrinkage for a design that does
    /// (or does not) carry an intercept column.
    pub fn exempts_first(&self, has_intercept: bool) -> bool {
        has_intercept && !self.shrink_intercept
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(GprError::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `(X'X)^-1` of a training design.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    xtx_inverse: DMatrix<f64>,
}

impl GramMatrix {
    pub fn new(xtx_inverse: DMatrix<f64>) -> Result<Self> {
        if !xtx_inverse.is_square() {
            return Err(GprError::invalid("gram matrix must be square"));
        }
        let n = xtx_inverse.nrows();
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (xtx_inverse[(i, j)], xtx_inverse[(j, i)]);
                if (a - b).abs() > 1e-10 * (1.0 + a.abs().max(b.abs())) {
                    return Err(GprError::invalid(format!(
                        "gram matrix not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        if xtx_inverse.iter().any(|v| !v.is_finite()) {
            return Err(GprError::invalid("gram matrix has non-finite entries"));
        }
        if xtx_inverse.clone().cholesky().is_none() {
            return Err(GprError::invalid("gram matrix is not positive definite"));
        }
        Ok(Self { xtx_inverse })
    }

    /// Inverts `X'X` for a row-major `n x p` design.
    pub fn from_design(rows: &[f64], p: usize) -> Result<Self> {
        if p == 0 || rows.len() % p != 0 {
            return Err(GprError::invalid("design length is not a multiple of p"));
        }
        let n = rows.len() / p;
        let x = DMatrix::from_row_slice(n, p, rows);
        let xtx = x.transpose() * &x;
        let chol = xtx
            .cholesky()
            .ok_or_else(|| GprError::invalid("X'X is singular; design columns are collinear"))?;
        let mut inv = chol.inverse();
        // exact symmetry
        for i in 0..p {
            for j in 0..i {
                let m = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = m;
                inv[(j, i)] = m;
            }
        }
        Self::new(inv)
    }

    pub fn dim(&self) -> usize {
        self.xtx_inverse.nrows()
    }

    pub fn xtx_inverse(&self) -> &DMatrix<f64> {
        &self.xtx_inverse
    }
}

/// Truncated Cauchy log-density of `xi`; `-inf` for `xi >= 1`.
pub fn log_prior_xi(xi: f64) -> Result<f64> {
    check_finite("xi", xi)?;
    Ok(log_prior_xi_unchecked(xi))
}

pub(crate) fn log_prior_xi_unchecked(xi: f64) -> f64 {
    if xi >= 1.0 {
        f64::NEG_INFINITY
    } else {
        LOG_TRUNC_CAUCHY_CONST - xi.mul_add(xi, 1.0).ln()
    }
}

pub(crate) fn grad_log_prior_xi(xi: f64) -> f64 {
    -2.0 * xi / xi.mul_add(xi, 1.0)
}

/// A prior resolved against one design: shrinkage set fixed and, for the
/// g-prior, the covariance factorised once.
#[derive(Debug, Clone)]
pub struct PreparedPrior {
    spec: PriorSpec,
    p: usize,
    first_shrunk: usize,
    gprior: Option<GPriorCache>,
}

#[derive(Debug, Clone)]
struct GPriorCache {
    /// Inverse of `g [(X'X)^-1]_SS` over the shrunk block.
    precision: DMatrix<f64>,
    log_norm: f64,
}

impl PreparedPrior {
    pub fn new(spec: PriorSpec, p: usize, has_intercept: bool, gram: Option<&GramMatrix>) -> Result<Self> {
        let first_shrunk = usize::from(spec.exempts_first(has_intercept));
        let gprior = match spec.beta {
            BetaPrior::GPrior { g } => {
                let gram = gram.ok_or_else(|| GprError::invalid("g-prior requires a gram matrix"))?;
                check_dim(p, gram.dim())?;
                let k = p - first_shrunk;
                if k == 0 {
                    None
                } else {
                    let cov = gram
                        .xtx_inverse
                        .view((first_shrunk, first_shrunk), (k, k))
                        .clone_owned()
                        * g;
                    let chol = cov
                        .cholesky()
                        .ok_or_else(|| GprError::invalid("g-prior covariance is not positive definite"))?;
                    let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
                    let log_norm = -0.5 * (k as f64) * (2.0 * PI).ln() - 0.5 * log_det;
                    Some(GPriorCache { precision: chol.inverse(), log_norm })
                }
            }
            _ => None,
        };
        Ok(Self { spec, p, first_shrunk, gprior })
    }

    pub fn spec(&self) -> &PriorSpec {
        &self.spec
    }

    /// Index of the first coefficient that is shrunk (0 or 1).
    pub fn first_shrunk(&self) -> usize {
        self.first_shrunk
    }

    pub fn log_prior_beta(&self, beta: &[f64]) -> Result<f64> {
        check_dim(self.p, beta.len())?;
        Ok(self.log_prior_beta_unchecked(beta))
    }

    pub(crate) fn log_prior_beta_unchecked(&self, beta: &[f64]) -> f64 {
        let shrunk = &beta[self.first_shrunk..];
        match self.spec.beta {
            BetaPrior::Flat => 0.0,
            BetaPrior::Cauchy => shrunk.iter().map(|b| -PI.ln() - b.mul_add(*b, 1.0).ln()).sum(),
            BetaPrior::Lasso { lambda } => {
                let c = (0.5 * lambda).ln();
                shrunk.iter().map(|b| c - lambda * b.abs()).sum()
            }
            BetaPrior::Ridge { tau } => {
                let c = 0.5 * (tau / (2.0 * PI)).ln();
                shrunk.iter().map(|b| c - 0.5 * tau * b * b).sum()
            }
            BetaPrior::GPrior { .. } => match &self.gprior {
                None => 0.0,
                Some(cache) => {
                    let v = DVector::from_column_slice(shrunk);
                    cache.log_norm - 0.5 * (v.transpose() * &cache.precision * &v)[(0, 0)]
                }
            },
        }
    }

    /// Adds `d log p(beta) / d beta` into `grad`. The Lasso term uses
    /// subgradient 0 at exactly zero.
    pub(crate) fn add_grad_beta(&self, beta: &[f64], grad: &mut [f64]) {
        let off = self.first_shrunk;
        match self.spec.beta {
            BetaPrior::Flat => {}
            BetaPrior::Cauchy => {
                for j in off..self.p {
                    let b = beta[j];
                    grad[j] += -2.0 * b / b.mul_add(b, 1.0);
                }
            }
            BetaPrior::Lasso { lambda } => {
                for j in off..self.p {
                    let b = beta[j];
                    if b != 0.0 {
                        grad[j] -= lambda * b.signum();
                    }
                }
            }
            BetaPrior::Ridge { tau } => {
                for j in off..self.p {
                    grad[j] -= tau * beta[j];
                }
            }
            BetaPrior::GPrior { .. } => {
                if let Some(cache) = &self.gprior {
                    let v = DVector::from_column_slice(&beta[off..]);
                    let pv = &cache.precision * v;
                    for (k, j) in (off..self.p).enumerate() {
                        grad[j] -= pv[k];
                    }
                }
            }
        }
    }

    pub fn grad_log_prior(&self, beta: &[f64], xi: f64) -> Result<(Vec<f64>, f64)> {
        check_dim(self.p, beta.len())?;
        check_finite("xi", xi)?;
        let mut g = vec![0.0; self.p];
        self.add_grad_beta(beta, &mut g);
        let gx = if self.spec.has_xi_prior() { grad_log_prior_xi(xi) } else { 0.0 };
        Ok((g, gx))
    }
}

/// Log-prior of `beta`. `exempt_first` marks a leading intercept that gets a
/// flat prior; with a [`PriorSpec`] use [`PriorSpec::exempts_first`].
pub fn log_prior_beta(beta: &[f64], spec: &PriorSpec, gram: Option<&GramMatrix>, has_intercept: bool) -> Result<f64> {
    PreparedPrior::new(*spec, beta.len(), has_intercept, gram)?.log_prior_beta(beta)
}

/// Gradient of `(log p(beta), log p(xi))`.
pub fn grad_log_prior(
    beta: &[f64],
    xi: f64,
    spec: &PriorSpec,
    gram: Option<&GramMatrix>,
    has_intercept: bool,
) -> Result<(Vec<f64>, f64)> {
    PreparedPrior::new(*spec, beta.len(), has_intercept, gram)?.grad_log_prior(beta, xi)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;

    fn shrink_all(spec: PriorSpec) -> PriorSpec {
        spec.with_shrink_intercept(true)
    }

    #[test]
    fn xi_prior_constant() {
        assert_relative_eq!(LOG_TRUNC_CAUCHY_CONST, (4.0 / (3.0 * PI)).ln(), epsilon = 1e-15);
        assert_relative_eq!(log_prior_xi(0.0).unwrap(), -0.857048, epsilon = 1e-6);
        assert_eq!(log_prior_xi(1.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_prior_xi(3.0).unwrap(), f64::NEG_INFINITY);
        assert!(log_prior_xi(f64::NAN).is_err());
    }

    #[test]
    fn beta_prior_examples() {
        let c = log_prior_beta(&[0.0, 0.0], &shrink_all(PriorSpec::cauchy()), None, true).unwrap();
        assert_relative_eq!(c, 2.0 * (1.0 / PI).ln(), epsilon = 1e-14);
        assert_relative_eq!(c, -2.2895, epsilon = 1e-4);

        let l = log_prior_beta(&[0.5], &PriorSpec::lasso(2.0).unwrap(), None, false).unwrap();
        assert_relative_eq!(l, -1.0, epsilon = 1e-15);

        let gram = GramMatrix::new(DMatrix::identity(2, 2)).unwrap();
        let g = log_prior_beta(&[0.0, 0.0], &PriorSpec::g_prior(1.0).unwrap(), Some(&gram), false).unwrap();
        assert_relative_eq!(g, -(2.0 * PI).ln(), epsilon = 1e-14);
    }

    #[test]
    fn intercept_is_exempt_by_default() {
        let spec = PriorSpec::ridge(3.0).unwrap();
        let a = log_prior_beta(&[100.0, 0.2], &spec, None, true).unwrap();
        let b = log_prior_beta(&[-4.0, 0.2], &spec, None, true).unwrap();
        assert_eq!(a, b);
        let (g, _) = grad_log_prior(&[100.0, 0.2], 0.0, &spec, None, true).unwrap();
        assert_eq!(g[0], 0.0);
        // without an intercept column every coefficient is shrunk
        let c = log_prior_beta(&[100.0, 0.2], &spec, None, false).unwrap();
        assert!(c < a);
    }

    #[test]
    fn gradient_examples() {
        let (g, _) = grad_log_prior(&[1.0], 0.0, &PriorSpec::cauchy(), None, false).unwrap();
        assert_relative_eq!(g[0], -1.0);
        let (g, _) = grad_log_prior(&[0.5], 0.0, &PriorSpec::ridge(2.0).unwrap(), None, false).unwrap();
        assert_relative_eq!(g[0], -1.0);
        let (g, _) = grad_log_prior(&[0.0, -2.0], 0.3, &PriorSpec::lasso(1.5).unwrap(), None, false).unwrap();
        assert_eq!(g, vec![0.0, 1.5]);
    }

    #[test]
    fn gprior_requires_gram_and_matching_dim() {
        let spec = PriorSpec::g_prior(1.0).unwrap();
        assert!(log_prior_beta(&[0.0], &spec, None, false).is_err());
        let gram = GramMatrix::new(DMatrix::identity(3, 3)).unwrap();
        assert!(log_prior_beta(&[0.0, 1.0], &spec, Some(&gram), false).is_err());
    }

    #[test]
    fn gram_validation() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(GramMatrix::new(asym).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(GramMatrix::new(indefinite).is_err());
        assert!(GramMatrix::from_design(&[1.0, 2.0, 1.0, 2.0, 1.0, 2.0], 2).is_err());
    }

    #[test]
    fn hyperparameters_must_be_positive() {
        assert!(PriorSpec::lasso(0.0).is_err());
        assert!(PriorSpec::ridge(-1.0).is_err());
        assert!(PriorSpec::g_prior(f64::NAN).is_err());
        assert!(PriorSpec::from_family(PriorFamily::Cauchy, Some(1.0)).is_err());
        assert!(PriorSpec::from_family(PriorFamily::Ridge, None).is_err());
    }

    #[test]
    fn tail_ordering_at_ten() {
        let beta = [10.0];
        let c = log_prior_beta(&beta, &PriorSpec::cauchy(), None, false).unwrap();
        let l = log_prior_beta(&beta, &PriorSpec::lasso(1.0).unwrap(), None, false).unwrap();
        let r = log_prior_beta(&beta, &PriorSpec::ridge(1.0).unwrap(), None, false).unwrap();
        assert!(c > l && l > r, "{c} {l} {r}");
    }

    #[test]
    fn gprior_with_identity_gram_is_ridge() {
        let gram = GramMatrix::new(DMatrix::identity(3, 3)).unwrap();
        for &g in &[0.1, 1.0, 7.5] {
            let beta = [0.3, -1.2, 2.0];
            let a = log_prior_beta(&beta, &PriorSpec::g_prior(g).unwrap(), Some(&gram), false).unwrap();
            let b = log_prior_beta(&beta, &PriorSpec::ridge(1.0 / g).unwrap(), None, false).unwrap();
            assert!((a - b).abs() < 1e-12, "g={g}: {a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn univariate_priors_symmetric_and_peaked(b in -50.0f64..50.0) {
            for spec in [PriorSpec::cauchy(), PriorSpec::lasso(0.7).unwrap(), PriorSpec::ridge(2.0).unwrap()] {
                let pos = log_prior_beta(&[b], &spec, None, false).unwrap();
                let neg = log_prior_beta(&[-b], &spec, None, false).unwrap();
                let zero = log_prior_beta(&[0.0], &spec, None, false).unwrap();
                prop_assert_eq!(pos, neg);
                prop_assert!(zero >= pos);
            }
            if b.abs() < 1.0 {
                prop_assert!(log_prior_xi(b).unwrap() <= log_prior_xi(0.0).unwrap());
                prop_assert_eq!(log_prior_xi(b).unwrap(), log_prior_xi(-b).unwrap());
            }
        }
    }
}
