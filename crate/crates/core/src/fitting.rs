//! Damped Gauss-Newton least squares with numerical Jacobians.
//!
//! Every model in this crate has at most four smooth parameters, so a
//! deterministic dense solver beats a general optimizer: no line searches,
//! no randomness, reproducible iterates. Box constraints are enforced by
//! projection; callers run multi-start and keep the best converged fit.

use crate::{Error, Result};

pub(crate) struct Problem<'a> {
    /// Model y(params, x).
    pub model: &'a dyn Fn(&[f64], f64) -> f64,
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// Optional weights w_i = 1/sigma_i^2.
    pub weights: Option<&'a [f64]>,
    pub lower: &'a [f64],
    pub upper: &'a [f64],
}

#[derive(Debug, Clone)]
pub(crate) struct FitOutcome {
    pub params: Vec<f64>,
    /// Weighted residual sum of squares.
    pub sse: f64,
    /// sqrt(SSE), reported to callers as the residual norm.
    pub residual_norm: f64,
    /// Parameter covariance, row-major p x p; empty when the normal matrix
    /// is singular (e.g. a parameter is unidentifiable at the solution).
    pub covariance: Vec<f64>,
    pub iterations: usize,
}

const MAX_OUTER: usize = 300;
const MAX_LAMBDA: f64 = 1e14;

pub(crate) fn fit(problem: &Problem, start: &[f64]) -> Result<FitOutcome> {
    let p = start.len();
    let m = problem.x.len();
    if m < p {
        return Err(Error::InvalidInput(format!(
            "{m} points cannot determine {p} parameters"
        )));
    }
    let clamp = |params: &mut [f64]| {
        for ((v, &lo), &hi) in params.iter_mut().zip(problem.lower).zip(problem.upper) {
            *v = v.clamp(lo, hi);
        }
    };
    let mut params = start.to_vec();
    clamp(&mut params);
    let mut sse = weighted_sse(problem, &params);
    if !sse.is_finite() {
        return Err(Error::FitDiverged("non-finite residuals at start".into()));
    }
    let mut lambda = 1e-3;
    let mut iterations = 0;
    for _ in 0..MAX_OUTER {
        iterations += 1;
        let jac = jacobian(problem, &params);
        let (jtj, jtr) = normal_system(problem, &params, &jac);
        let mut improved = false;
        for _ in 0..25 {
            // Marquardt scaling keeps the damping parameter dimensionless.
            let mut damped = jtj.clone();
            for i in 0..p {
                damped[i * p + i] += lambda * jtj[i * p + i].max(1e-30);
            }
            let Some(step) = solve(&damped, &jtr, p) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = params.iter().zip(&step).map(|(v, s)| v + s).collect();
            clamp(&mut trial);
            let trial_sse = weighted_sse(problem, &trial);
            if trial_sse.is_finite() && trial_sse <= sse {
                let gain = sse - trial_sse;
                params = trial;
                sse = trial_sse;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                if gain <= 1e-15 * (1.0 + sse) {
                    return Ok(finish(problem, params, sse, iterations));
                }
                break;
            }
            lambda *= 10.0;
            if lambda > MAX_LAMBDA {
                return Ok(finish(problem, params, sse, iterations));
            }
        }
        if !improved {
            return Ok(finish(problem, params, sse, iterations));
        }
    }
    Ok(finish(problem, params, sse, iterations))
}

fn finish(problem: &Problem, params: Vec<f64>, sse: f64, iterations: usize) -> FitOutcome {
    let p = params.len();
    let m = problem.x.len();
    let jac = jacobian(problem, &params);
    let (jtj, _) = normal_system(problem, &params, &jac);
    let dof = (m.saturating_sub(p)).max(1) as f64;
    let scale = sse / dof;
    let covariance = invert(&jtj, p)
        .map(|inv| inv.into_iter().map(|v| v * scale).collect())
        .unwrap_or_default();
    FitOutcome {
        residual_norm: sse.sqrt(),
        params,
        sse,
        covariance,
        iterations,
    }
}

fn weighted_sse(problem: &Problem, params: &[f64]) -> f64 {
    problem
        .x
        .iter()
        .zip(problem.y)
        .enumerate()
        .map(|(i, (&x, &y))| {
            let w = problem.weights.map_or(1.0, |w| w[i]);
            let r = (problem.model)(params, x) - y;
            w * r * r
        })
        .sum()
}

/// Central-difference Jacobian, m x p row-major.
fn jacobian(problem: &Problem, params: &[f64]) -> Vec<f64> {
    let p = params.len();
    let m = problem.x.len();
    let mut jac = vec![0.0; m * p];
    let mut work = params.to_vec();
    for j in 0..p {
        let h = 1e-6 * params[j].abs().max(1e-4);
        // Stay inside the box so the model never sees invalid parameters.
        let hi = (params[j] + h).min(problem.upper[j]);
        let lo = (params[j] - h).max(problem.lower[j]);
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for (i, &x) in problem.x.iter().enumerate() {
            work[j] = hi;
            let up = (problem.model)(&work, x);
            work[j] = lo;
            let down = (problem.model)(&work, x);
            jac[i * p + j] = (up - down) / span;
        }
        work[j] = params[j];
    }
    jac
}

fn normal_system(problem: &Problem, params: &[f64], jac: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = params.len();
    let m = problem.x.len();
    let mut jtj = vec![0.0; p * p];
    let mut jtr = vec![0.0; p];
    for i in 0..m {
        let w = problem.weights.map_or(1.0, |w| w[i]);
        let r = (problem.model)(params, problem.x[i]) - problem.y[i];
        for a in 0..p {
            let ja = jac[i * p + a];
            jtr[a] -= w * ja * r;
            for b in a..p {
                jtj[a * p + b] += w * ja * jac[i * p + b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            jtj[a * p + b] = jtj[b * p + a];
        }
    }
    (jtj, jtr)
}

/// Gaussian elimination with partial pivoting; None on singular systems.
fn solve(a: &[f64], b: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| {
            m[i * p + col]
                .abs()
                .partial_cmp(&m[j * p + col].abs())
                .unwrap()
        })?;
        if m[pivot * p + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..p {
                m.swap(col * p + k, pivot * p + k);
            }
            rhs.swap(col, pivot);
        }
        for row in (col + 1)..p {
            let f = m[row * p + col] / m[col * p + col];
            for k in col..p {
                m[row * p + k] -= f * m[col * p + k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; p];
    for row in (0..p).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..p {
            acc -= m[row * p + k] * x[k];
        }
        x[row] = acc / m[row * p + row];
    }
    Some(x)
}

fn invert(a: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut out = vec![0.0; p * p];
    for col in 0..p {
        let mut e = vec![0.0; p];
        e[col] = 1.0;
        let x = solve(a, &e, p)?;
        for row in 0..p {
            out[row * p + col] = x[row];
        }
    }
    Some(out)
}

/// Runs `fit` from several starts and keeps the lowest weighted SSE.
pub(crate) fn fit_multi_start(problem: &Problem, starts: &[Vec<f64>]) -> Result<FitOutcome> {
    let mut best: Option<FitOutcome> = None;
    for start in starts {
        if let Ok(out) = fit(problem, start) {
            let replace = best.as_ref().is_none_or(|b| out.sse < b.sse);
            if replace {
                best = Some(out);
            }
        }
    }
    best.ok_or_else(|| {
        Error::FitDiverged(format!(
            "no start out of {} converged to finite residuals",
            starts.len()
        ))
    })
}
