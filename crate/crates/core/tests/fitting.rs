mod common;

use common::{nelder_mead, regression_data};
use gpr_core::cv::{cross_validate, CvConfig};
use gpr_core::fit::{fit_map, neg_log_posterior, predict, FitOptions, FitResult};
use gpr_core::model::{log_likelihood, ExceedanceDataset};
use gpr_core::priors::GramMatrix;
use gpr_core::{GprParams, PriorFamily, PriorSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn objective(data: &ExceedanceDataset, spec: PriorSpec) -> impl Fn(&[f64]) -> f64 + '_ {
    let gram = GramMatrix::from_design(data.x_flat(), data.p()).unwrap();
    move |t: &[f64]| {
        let p = t.len() - 1;
        let params = GprParams { beta: t[..p].to_vec(), xi: t[p] };
        neg_log_posterior(data, &params, &spec, Some(&gram)).unwrap_or(f64::INFINITY)
    }
}

fn theta(fit: &FitResult) -> Vec<f64> {
    let mut t = fit.params.beta.clone();
    t.push(fit.params.xi);
    t
}

#[test]
fn flat_prior_matches_derivative_free_optimum() {
    let (data, _) = regression_data(400, &[0.2, 0.5, -0.3], 0.15, 1.0, 11);
    let spec = PriorSpec::flat();
    let fit = fit_map(&data, &spec, &FitOptions::default()).unwrap();
    let f = objective(&data, spec);
    let nm = nelder_mead(&f, &[0.0, 0.0, 0.0, 0.1], 0.2, 1e-14);
    for (a, b) in theta(&fit).iter().zip(&nm) {
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
    assert!(fit.neg_log_posterior <= f(&nm) + 1e-8);
    assert!((fit.neg_log_lik + log_likelihood(&data, &fit.params).unwrap()).abs() < 1e-9);
}

#[test]
fn lasso_matches_derivative_free_optimum() {
    let (data, _) = regression_data(300, &[0.3, 0.6, 0.0, -0.4], 0.1, 1.0, 12);
    let spec = PriorSpec::lasso(5.0).unwrap();
    let fit = fit_map(&data, &spec, &FitOptions::default()).unwrap();
    let f = objective(&data, spec);
    let nm = nelder_mead(&f, &theta(&fit), 0.1, 1e-15);
    assert!(fit.neg_log_posterior <= f(&nm) + 1e-6, "{} vs {}", fit.neg_log_posterior, f(&nm));
}

#[test]
fn map_beats_random_perturbations() {
    let (data, _) = regression_data(200, &[0.1, 0.4, -0.2, 0.3], 0.2, 2.0, 13);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in [PriorSpec::cauchy(), PriorSpec::ridge(1.0).unwrap(), PriorSpec::g_prior(10.0).unwrap(), PriorSpec::lasso(1.0).unwrap()] {
        let fit = fit_map(&data, &spec, &FitOptions::default()).unwrap();
        let f = objective(&data, spec);
        let best = theta(&fit);
        for _ in 0..500 {
            let scale = 10f64.powf(rng.random_range(-4.0..-1.0));
            let t: Vec<f64> = best.iter().map(|v| v + scale * rng.random_range(-1.0..1.0)).collect();
            assert!(f(&t) >= fit.neg_log_posterior - 1e-9, "{spec:?}");
        }
    }
}

#[test]
fn large_sample_recovers_truth() {
    let truth = [0.3, 0.5, -0.4, 0.2];
    let (data, _) = regression_data(5000, &truth, 0.2, 1.0, 14);
    let fit = fit_map(&data, &PriorSpec::cauchy(), &FitOptions::default()).unwrap();
    assert!(fit.converged);
    for (b, t) in fit.params.beta.iter().zip(truth) {
        assert!((b - t).abs() < 0.08, "{b} vs {t}");
    }
    assert!((fit.params.xi - 0.2).abs() < 0.05);
}

#[test]
fn fits_are_deterministic_given_seed() {
    let (data, _) = regression_data(120, &[0.1, 0.4, -0.2], 0.1, 1.0, 15);
    let opts = FitOptions::default().with_seed(9);
    let a = fit_map(&data, &PriorSpec::ridge(0.5).unwrap(), &opts).unwrap();
    let b = fit_map(&data, &PriorSpec::ridge(0.5).unwrap(), &opts).unwrap();
    assert_eq!(a.params, b.params);
}

#[test]
fn cv_prefers_strong_shrinkage_on_pure_noise() {
    // covariates carry no signal, so heavy shrinkage should win most of the time
    let grid = vec![0.01, 0.1, 1.0, 10.0];
    let mut strongest = 0;
    for seed in 0..20 {
        let (data, _) = regression_data(120, &[0.3, 0.0, 0.0, 0.0, 0.0], 0.1, 1.0, 100 + seed);
        let cfg = CvConfig { grid: grid.clone(), ..CvConfig::for_family(PriorFamily::Lasso, seed).unwrap() };
        let r = cross_validate(&data, PriorFamily::Lasso, &cfg).unwrap();
        strongest += usize::from(r.selected == 10.0);
    }
    assert!(strongest > 10, "lambda = 10 chosen {strongest}/20 times");
}

#[test]
fn fit_file_round_trip() {
    let (data, _) = regression_data(150, &[0.1, 0.4, -0.2], 0.1, 1.0, 16);
    let fit = fit_map(&data, &PriorSpec::lasso(0.7).unwrap(), &FitOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.fit");
    fit.write(&path).unwrap();
    let back = FitResult::read(&path).unwrap();
    assert_eq!(back.params, fit.params);
    assert_eq!(back.prior, fit.prior);
    assert_eq!(predict(&data, &back).unwrap(), predict(&data, &fit).unwrap());
}
