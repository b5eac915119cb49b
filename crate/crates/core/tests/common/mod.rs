//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use gpr_core::model::ExceedanceDataset;
use gpr_core::GprParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Total mass of `density` on `(mu, mu + upper)`, integrating over `s` with
/// `y - mu = e^s` so that both the bulk and a heavy tail are resolved.
pub fn mass_above(density: impl Fn(f64) -> f64, mu: f64, upper: Option<f64>) -> f64 {
    let hi = upper.map_or(60.0, f64::ln);
    simpson(|s| density(mu + s.exp()) * s.exp(), -40.0, hi, 400_000)
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the two-sided KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Central-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let step = h * x[i].abs().max(1.0);
            p[i] = x[i] + step;
            let up = f(&p);
            p[i] = x[i] - step;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Plain Nelder-Mead; restarts the simplex around the best vertex until the
/// best value stops improving.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], scale: f64, tol: f64) -> Vec<f64> {
    let n = x0.len();
    let mut best = x0.to_vec();
    let mut best_f = f(&best);
    for _ in 0..20 {
        let mut simplex: Vec<Vec<f64>> = vec![best.clone()];
        for i in 0..n {
            let mut v = best.clone();
            v[i] += scale;
            simplex.push(v);
        }
        let mut vals: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
        for _ in 0..20_000 {
            let mut idx: Vec<usize> = (0..=n).collect();
            idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
            vals = idx.iter().map(|&i| vals[i]).collect();
            if (vals[n] - vals[0]).abs() <= tol * (1.0 + vals[0].abs()) {
                let spread = simplex.iter().map(|v| (0..n).map(|j| (v[j] - simplex[0][j]).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
                if spread < 1e-9 {
                    break;
                }
            }
            let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
            let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };
            let xr = along(-1.0);
            let fr = f(&xr);
            if fr < vals[0] {
                let xe = along(-2.0);
                let fe = f(&xe);
                if fe < fr {
                    simplex[n] = xe;
                    vals[n] = fe;
                } else {
                    simplex[n] = xr;
                    vals[n] = fr;
                }
            } else if fr < vals[n - 1] {
                simplex[n] = xr;
                vals[n] = fr;
            } else {
                let xc = if fr < vals[n] { along(-0.5) } else { along(0.5) };
                let fc = f(&xc);
                if fc < vals[n].min(fr) {
                    simplex[n] = xc;
                    vals[n] = fc;
                } else {
                    for i in 1..=n {
                        simplex[i] = (0..n).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
                        vals[i] = f(&simplex[i]);
                    }
                }
            }
        }
        let (i, &v) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let improved = v < best_f - tol * (1.0 + best_f.abs());
        best = simplex[i].clone();
        best_f = v;
        if !improved {
            break;
        }
    }
    best
}

/// GPD draw by inverting the survival function directly.
pub fn gpd_draw(rng: &mut impl Rng, mu: f64, sigma: f64, xi: f64) -> f64 {
    let u: f64 = rng.random();
    if xi == 0.0 {
        mu - sigma * (1.0 - u).ln()
    } else {
        mu + sigma * ((1.0 - u).powf(-xi) - 1.0) / xi
    }
}

/// Intercept plus `beta.len() - 1` standard-normal covariates.
pub fn regression_data(n: usize, beta: &[f64], xi: f64, mu: f64, seed: u64) -> (ExceedanceDataset, GprParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = beta.len();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = vec![1.0];
        row.extend((1..p).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let eta: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
        y.push(gpd_draw(&mut rng, mu, eta.exp(), xi));
        rows.push(row);
    }
    let names = (0..p).map(|j| if j == 0 { "intercept".to_string() } else { format!("x{j}") }).collect();
    let data = ExceedanceDataset::new(rows, y, mu, names, true).unwrap();
    (data, GprParams { beta: beta.to_vec(), xi })
}

/// `date,value` reference file; empty values read as `None`.
pub fn read_reference(name: &str) -> Vec<(String, Option<f64>)> {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let (d, v) = l.split_once(',').unwrap();
            (d.to_string(), if v.is_empty() { None } else { Some(v.parse().unwrap()) })
        })
        .collect()
}
