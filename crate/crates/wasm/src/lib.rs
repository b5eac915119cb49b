//! Browser bindings for the demo page in `www/`: GPD shape explorer,
//! crash-probability curve of a fitted model, and simulate-then-fit.
//! Everything returns plain numbers or `Float64Array`s so the page needs no glue
//! beyond what `wasm-bindgen` generates.

use gpr_core::compare::{tune_and_fit, TuneOptions};
use gpr_core::fit::{evaluate, fit_map, FitOptions};
use gpr_core::model::ExceedanceDataset;
use gpr_core::report::{crash_curve, CurveOptions};
use gpr_core::{GpdParams, GprParams, PriorFamily, PriorSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Density and survival function on an even grid.
#[wasm_bindgen]
pub struct GpdCurve {
    y: Vec<f64>,
    density: Vec<f64>,
    survival: Vec<f64>,
    mean: f64,
}

#[wasm_bindgen]
impl GpdCurve {
    #[wasm_bindgen(getter)]
    pub fn y(&self) -> Vec<f64> {
        self.y.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn density(&self) -> Vec<f64> {
        self.density.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn survival(&self) -> Vec<f64> {
        self.survival.clone()
    }

    /// `NaN` when `xi >= 1`.
    #[wasm_bindgen(getter)]
    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// Evaluates the GPD on `points` values from `mu` to `mu + span` (clipped at a
/// finite upper endpoint).
#[wasm_bindgen(js_name = gpdCurve)]
pub fn gpd_curve(mu: f64, sigma: f64, xi: f64, span: f64, points: usize) -> Result<GpdCurve, JsError> {
    let d = GpdParams::new(mu, sigma, xi).map_err(js_err)?;
    if !(span > 0.0) || points < 2 {
        return Err(JsError::new("need a positive span and at least two points"));
    }
    let top = (mu + span).min(d.upper_endpoint());
    let y: Vec<f64> = (0..points).map(|i| mu + (top - mu) * i as f64 / (points - 1) as f64).collect();
    let density = y.iter().map(|&v| d.log_density(v).map_or(0.0, f64::exp)).collect();
    let survival = y.iter().map(|&v| d.survival(v).unwrap_or(0.0)).collect();
    let mean = if xi < 1.0 { mu + sigma / (1.0 - xi) } else { f64::NAN };
    Ok(GpdCurve { y, density, survival, mean })
}

/// Heavy-tailed losses above `mu` whose log-scale is linear in standard-normal covariates.
fn simulate(n: usize, beta: &[f64], xi: f64, mu: f64, intercept: bool, rng: &mut ChaCha8Rng) -> Result<ExceedanceDataset, JsError> {
    let p = beta.len();
    let first = usize::from(intercept);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = vec![1.0; first];
        row.extend((first..p).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let eta: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
        y.push(GpdParams::new(mu, eta.exp(), xi).map_err(js_err)?.sample(rng));
        rows.push(row);
    }
    let names = (0..p)
        .map(|j| if intercept && j == 0 { "intercept".to_string() } else { format!("x{}", j + 1 - first) })
        .collect();
    ExceedanceDataset::new(rows, y, mu, names, intercept).map_err(js_err)
}

/// Fitted against true crash probabilities along a swept volatility covariate.
#[wasm_bindgen]
pub struct CrashDemo {
    percentiles: Vec<f64>,
    fitted: Vec<f64>,
    truth: Vec<f64>,
    expected_loss: Vec<f64>,
    beta_hat: Vec<f64>,
    xi_hat: f64,
}

#[wasm_bindgen]
impl CrashDemo {
    #[wasm_bindgen(getter)]
    pub fn percentiles(&self) -> Vec<f64> {
        self.percentiles.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn fitted(&self) -> Vec<f64> {
        self.fitted.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }

    #[wasm_bindgen(getter, js_name = expectedLoss)]
    pub fn expected_loss(&self) -> Vec<f64> {
        self.expected_loss.clone()
    }

    #[wasm_bindgen(getter, js_name = betaHat)]
    pub fn beta_hat(&self) -> Vec<f64> {
        self.beta_hat.clone()
    }

    #[wasm_bindgen(getter, js_name = xiHat)]
    pub fn xi_hat(&self) -> f64 {
        self.xi_hat
    }
}

/// Simulates `n` loss days above a 2% threshold with scale
/// `exp(b0 + vol_effect * z)`, fits the Cauchy-prior model and sweeps `z`
/// from its 5th to 95th percentile.
#[wasm_bindgen(js_name = crashDemo)]
pub fn crash_demo(n: usize, vol_effect: f64, xi: f64, y0: f64, seed: u32) -> Result<CrashDemo, JsError> {
    let mu = 2.0;
    let beta = [0.0, vol_effect];
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(seed));
    let data = simulate(n, &beta, xi, mu, true, &mut rng)?;
    let fit = fit_map(&data, &PriorSpec::cauchy(), &FitOptions::default().with_seed(u64::from(seed))).map_err(js_err)?;
    let curve = crash_curve(&fit, &data, &CurveOptions::new("x1", y0)).map_err(js_err)?;
    let truth_params = GprParams { beta: beta.to_vec(), xi };
    let truth = curve
        .points
        .iter()
        .map(|p| {
            let row = [1.0, p.value];
            gpr_core::model::exceedance_prob(&row, &truth_params, mu, y0).unwrap_or(f64::NAN)
        })
        .collect();
    Ok(CrashDemo {
        percentiles: curve.points.iter().map(|p| p.percentile).collect(),
        fitted: curve.points.iter().map(|p| p.prob).collect(),
        truth,
        expected_loss: curve.points.iter().map(|p| p.expected_loss).collect(),
        beta_hat: fit.params.beta,
        xi_hat: fit.params.xi,
    })
}

/// One simulate-then-fit run.
#[wasm_bindgen]
pub struct FitDemo {
    beta_true: Vec<f64>,
    beta_hat: Vec<f64>,
    xi_true: f64,
    xi_hat: f64,
    hyperparameter: f64,
    test_rmse: f64,
    aic: f64,
    bic: f64,
    df: usize,
    converged: bool,
}

#[wasm_bindgen]
impl FitDemo {
    #[wasm_bindgen(getter, js_name = betaTrue)]
    pub fn beta_true(&self) -> Vec<f64> {
        self.beta_true.clone()
    }

    #[wasm_bindgen(getter, js_name = betaHat)]
    pub fn beta_hat(&self) -> Vec<f64> {
        self.beta_hat.clone()
    }

    #[wasm_bindgen(getter, js_name = xiTrue)]
    pub fn xi_true(&self) -> f64 {
        self.xi_true
    }

    #[wasm_bindgen(getter, js_name = xiHat)]
    pub fn xi_hat(&self) -> f64 {
        self.xi_hat
    }

    /// `NaN` for families without one.
    #[wasm_bindgen(getter)]
    pub fn hyperparameter(&self) -> f64 {
        self.hyperparameter
    }

    #[wasm_bindgen(getter, js_name = testRmse)]
    pub fn test_rmse(&self) -> f64 {
        self.test_rmse
    }

    #[wasm_bindgen(getter)]
    pub fn aic(&self) -> f64 {
        self.aic
    }

    #[wasm_bindgen(getter)]
    pub fn bic(&self) -> f64 {
        self.bic
    }

    #[wasm_bindgen(getter)]
    pub fn df(&self) -> usize {
        self.df
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }
}

/// Draws `beta ~ N(0, 1)` for `p` covariates, simulates `n` rows, fits
/// `prior` on 80% of them (cross-validating the hyperparameter when
/// `hyper <= 0`) and scores the rest.
#[wasm_bindgen(js_name = simulateAndFit)]
pub fn simulate_and_fit(n: usize, p: usize, xi: f64, prior: &str, hyper: f64, seed: u32) -> Result<FitDemo, JsError> {
    let family: PriorFamily = prior.parse().map_err(js_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(seed));
    let beta: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
    let data = simulate(n, &beta, xi, 2.0, false, &mut rng)?;
    let n_train = (n as f64 * 0.8).round() as usize;
    let (train, test) = (
        data.subset(&(0..n_train).collect::<Vec<_>>()).map_err(js_err)?,
        data.subset(&(n_train..n).collect::<Vec<_>>()).map_err(js_err)?,
    );
    let fit = if family.is_tunable() && hyper > 0.0 {
        let spec = PriorSpec::from_family(family, Some(hyper)).map_err(js_err)?;
        fit_map(&train, &spec, &FitOptions::default().with_seed(u64::from(seed))).map_err(js_err)?
    } else {
        tune_and_fit(&train, family, &TuneOptions::default().with_seed(u64::from(seed))).map_err(js_err)?.fit
    };
    let m = evaluate(&fit, &test).map_err(js_err)?;
    Ok(FitDemo {
        beta_true: beta,
        xi_true: xi,
        hyperparameter: fit.prior.hyperparameter().unwrap_or(f64::NAN),
        beta_hat: fit.params.beta.clone(),
        xi_hat: fit.params.xi,
        test_rmse: m.rmse,
        aic: m.aic,
        bic: m.bic,
        df: fit.df,
        converged: fit.converged,
    })
}
