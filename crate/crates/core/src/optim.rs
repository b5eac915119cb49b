//! Dense BFGS with a backtracking Armijo line search.
//!
//! The objective returns `None` at infeasible points; the line search treats
//! those as `+inf` and keeps shrinking the step.

#[derive(Debug, Clone, Copy)]
pub(crate) struct BfgsOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
    /// Longest step (Euclidean) tried by the line search.
    pub max_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { max_iter: 500, grad_tol: 1e-6, max_step: 5.0 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BfgsOutcome {
    pub x: Vec<f64>,
    pub iters: usize,
    #[allow(dead_code)]
    pub converged: bool,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(n: usize, scale: f64) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = scale;
    }
    h
}

/// Minimises `objective` from `x0`. Returns `None` only if `x0` is infeasible.
pub(crate) fn minimize<F>(mut objective: F, x0: Vec<f64>, opts: &BfgsOptions) -> Option<BfgsOutcome>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let n = x0.len();
    let (mut f, mut g) = objective(&x0)?;
    if !f.is_finite() {
        return None;
    }
    let mut x = x0;
    let mut h = identity(n, 1.0);
    let mut h_is_identity = true;
    let mut first_update = true;
    let mut iters = 0;
    let mut trial = vec![0.0; n];
    let mut dir = vec![0.0; n];

    while iters < opts.max_iter {
        if norm(&g) < opts.grad_tol {
            return Some(BfgsOutcome { x, iters, converged: true });
        }
        iters += 1;

        for i in 0..n {
            dir[i] = -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>();
        }
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            h = identity(n, 1.0);
            h_is_identity = true;
            for i in 0..n {
                dir[i] = -g[i];
            }
            slope = -dot(&g, &g);
        }

        let dnorm = norm(&dir);
        let mut alpha = if dnorm > opts.max_step { opts.max_step / dnorm } else { 1.0 };
        // f is only known to a few ulps; accept changes inside that band
        let slack = 8.0 * f64::EPSILON * f.abs().max(1.0);
        let mut accepted: Option<(f64, Vec<f64>)> = None;
        for _ in 0..MAX_BACKTRACKS {
            for i in 0..n {
                trial[i] = x[i] + alpha * dir[i];
            }
            match objective(&trial) {
                Some((ft, gt)) if ft.is_finite() && ft <= f + ARMIJO_C1 * alpha * slope + slack => {
                    accepted = Some((ft, gt));
                    break;
                }
                Some((ft, _)) if ft.is_finite() => {
                    // safeguarded quadratic interpolation
                    let denom = 2.0 * (ft - f - slope * alpha);
                    let a_q = if denom > 0.0 { -slope * alpha * alpha / denom } else { 0.5 * alpha };
                    alpha = a_q.clamp(0.1 * alpha, 0.5 * alpha);
                }
                _ => alpha *= 0.5,
            }
        }

        let Some((f_new, g_new)) = accepted else {
            if h_is_identity {
                break;
            }
            h = identity(n, 1.0);
            h_is_identity = true;
            first_update = true;
            continue;
        };

        let s: Vec<f64> = (0..n).map(|i| trial[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy = dot(&s, &y);
        let stalled = f_new >= f && norm(&s) <= 1e-14 * (1.0 + norm(&x));
        x.copy_from_slice(&trial);
        f = f_new;
        g = g_new;
        if stalled {
            break;
        }

        if sy > 1e-12 * norm(&s) * norm(&y) {
            if first_update {
                let scale = sy / dot(&y, &y);
                h = identity(n, scale);
                first_update = false;
            }
            let rho = 1.0 / sy;
            // H <- (I - rho s y') H (I - rho y s') + rho s s'
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            h_is_identity = false;
        }
    }

    let converged = norm(&g) < opts.grad_tol;
    Some(BfgsOutcome { x, iters, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            Some((f, g))
        };
        let out = minimize(rosen, vec![-1.2, 1.0], &BfgsOptions::default()).unwrap();
        assert!(out.converged, "{out:?}");
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn backtracks_out_of_infeasible_region() {
        // -log(1 - x) + x^2 on x < 1, infeasible beyond
        let f = |x: &[f64]| {
            if x[0] >= 1.0 {
                None
            } else {
                Some((-(1.0 - x[0]).ln() + x[0] * x[0], vec![1.0 / (1.0 - x[0]) + 2.0 * x[0]]))
            }
        };
        let out = minimize(f, vec![0.9], &BfgsOptions::default()).unwrap();
        assert!(out.converged);
        // stationary point solves 2x^2 - 2x - 1 = 0 on x < 1
        let root = (2.0 - 12f64.sqrt()) / 4.0;
        assert!((out.x[0] - root).abs() < 1e-7);
    }

    #[test]
    fn infeasible_start_returns_none() {
        assert!(minimize(|_| None, vec![0.0], &BfgsOptions::default()).is_none());
    }
}
