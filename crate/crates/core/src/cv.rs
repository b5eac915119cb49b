//! k-fold cross-validation of the prior hyperparameter.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GprError, Result};
use crate::fit::{fit_map, predict, rmse, FitOptions};
use crate::model::ExceedanceDataset;
use crate::priors::{PriorFamily, PriorSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub n_folds: usize,
    /// Candidate hyperparameter values.
    pub grid: Vec<f64>,
    pub seed: u64,
    pub shrink_intercept: bool,
    pub fit: FitOptions,
}

impl CvConfig {
    /// Five folds over [`default_grid`] for `family`.
    pub fn for_family(family: PriorFamily, seed: u64) -> Result<Self> {
        Ok(Self {
            n_folds: 5,
            grid: default_grid(family)?,
            seed,
            shrink_intercept: false,
            fit: FitOptions::default().with_seed(seed),
        })
    }

    fn validate(&self) -> Result<()> {
        if self.n_folds < 2 {
            return Err(GprError::config(format!("need at least 2 folds, got {}", self.n_folds)));
        }
        if self.grid.is_empty() {
            return Err(GprError::config("hyperparameter grid is empty"));
        }
        if let Some(v) = self.grid.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(GprError::config(format!("grid values must be positive, got {v}")));
        }
        Ok(())
    }
}

/// `count` log-spaced values from `10^lo` to `10^hi`.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![10f64.powf(lo)];
    }
    (0..count)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Lasso `lambda` and Ridge `tau` span `1e-3..1e2`, g-prior `g` spans `1e-1..1e4`,
/// eleven points each.
pub fn default_grid(family: PriorFamily) -> Result<Vec<f64>> {
    match family {
        PriorFamily::Lasso | PriorFamily::Ridge => Ok(logspace(-3.0, 2.0, 11)),
        PriorFamily::GPrior => Ok(logspace(-1.0, 4.0, 11)),
        other => Err(GprError::config(format!("prior `{other}` has no hyperparameter to tune"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvPoint {
    pub value: f64,
    /// Out-of-fold RMSE per fold; `+inf` where the fold fit failed.
    pub fold_rmse: Vec<f64>,
    pub mean_rmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub family: PriorFamily,
    pub selected: f64,
    /// In the order of the configured grid.
    pub table: Vec<CvPoint>,
}

/// Fold label of each row: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, n_folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % n_folds;
    }
    fold
}

/// Regularisation strength increases with `lambda` and `tau` and decreases with `g`.
fn stronger(family: PriorFamily, a: f64, b: f64) -> bool {
    match family {
        PriorFamily::GPrior => a < b,
        _ => a > b,
    }
}

/// Picks the grid value with the smallest mean out-of-fold RMSE; ties go to
/// the more strongly regularising value.
pub fn cross_validate(data: &ExceedanceDataset, family: PriorFamily, cfg: &CvConfig) -> Result<CvResult> {
    cfg.validate()?;
    if !family.is_tunable() {
        return Err(GprError::config(format!("prior `{family}` has no hyperparameter to tune")));
    }
    let n = data.n();
    let folds = fold_assignment(n, cfg.n_folds, cfg.seed);
    let need = data.p() + 2;
    let mut splits = Vec::with_capacity(cfg.n_folds);
    for k in 0..cfg.n_folds {
        let (held, kept): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| folds[i] == k);
        if held.len() < need || kept.len() < need {
            return Err(GprError::config(format!(
                "fold {k} has {} held-out and {} training rows; both need at least p + 2 = {need}",
                held.len(),
                kept.len()
            )));
        }
        splits.push((data.subset(&kept)?, data.subset(&held)?));
    }

    let mut table = Vec::with_capacity(cfg.grid.len());
    for &value in &cfg.grid {
        let spec = PriorSpec::from_family(family, Some(value))?.with_shrink_intercept(cfg.shrink_intercept);
        let fold_rmse: Vec<f64> = splits
            .iter()
            .map(|(train, held)| {
                fit_map(train, &spec, &cfg.fit)
                    .and_then(|fit| predict(held, &fit))
                    .map_or(f64::INFINITY, |pred| rmse(held.y(), &pred.values))
            })
            .map(|r| if r.is_nan() { f64::INFINITY } else { r })
            .collect();
        let mean_rmse = fold_rmse.iter().sum::<f64>() / fold_rmse.len() as f64;
        table.push(CvPoint { value, fold_rmse, mean_rmse });
    }

    let mut order: Vec<usize> = (0..table.len()).collect();
    order.sort_by(|&a, &b| {
        let (va, vb) = (table[a].value, table[b].value);
        if stronger(family, va, vb) {
            std::cmp::Ordering::Less
        } else if stronger(family, vb, va) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    let mut best = order[0];
    for &i in &order[1..] {
        if table[i].mean_rmse < table[best].mean_rmse {
            best = i;
        }
    }
    Ok(CvResult { family, selected: table[best].value, table })
}
