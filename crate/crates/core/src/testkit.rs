use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::gpd::GpdParams;
use crate::model::{ExceedanceDataset, GprParams};

/// Intercept column plus `beta.len() - 1` standard-normal covariates, mu = 1.
pub(crate) fn synthetic(n: usize, beta: &[f64], xi: f64, seed: u64) -> (ExceedanceDataset, GprParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = beta.len();
    let mu = 1.0;
    let mut x = Vec::with_capacity(n * p);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let start = x.len();
        x.push(1.0);
        for _ in 1..p {
            x.push(StandardNormal.sample(&mut rng));
        }
        let eta: f64 = x[start..].iter().zip(beta).map(|(a, b)| a * b).sum();
        let gpd = GpdParams::new(mu, eta.exp(), xi).unwrap();
        y.push(gpd.sample(&mut rng));
    }
    let names = (0..p).map(|j| if j == 0 { "intercept".to_string() } else { format!("x{j}") }).collect();
    let data = ExceedanceDataset::from_flat(x, y, mu, names, true).unwrap();
    (data, GprParams { beta: beta.to_vec(), xi })
}
