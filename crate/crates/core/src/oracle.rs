//! Brute-force minimizer of the Hilbert-Schmidt objective over the closed
//! cone `[-1, inf)^n`.
//!
//! Plain projected gradient with a fixed step. It never looks at the
//! Euler-Lagrange equations, so it serves as an independent check of the
//! linear solve and also locates the boundary minimizer when no metric
//! minimizes the distance.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::elsolve::{ElReport, Verdict};
use crate::error::{Error, Result};
use crate::metric_cone::{hs_gradient, hs_objective, GramMatrix};

/// Interior agreement required between the two minimizers.
pub const CROSSCHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// KKT residual at which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Step is `1 / (step_divisor * L)` with `L` the largest eigenvalue of `2G`.
    pub step_divisor: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1_000_000,
            step_divisor: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub alpha_star: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Indices with `alpha_n = -1`.
    pub active_set: Vec<usize>,
    pub kkt_residual: f64,
}

/// KKT residual of `alpha` for the box `alpha >= -1`.
pub fn kkt_residual(alpha: &[f64], grad: &DVector<f64>) -> f64 {
    alpha
        .iter()
        .zip(grad.iter())
        .map(|(&a, &g)| if a <= -1.0 { (-g).max(0.0) } else { g.abs() })
        .fold(0.0, f64::max)
}

pub fn minimize(g: &GramMatrix, opts: &OracleOptions) -> Result<OracleResult> {
    minimize_observed(g, opts, |_, _| {})
}

/// Like [`minimize`], calling `observe(iteration, objective)` after every step.
pub fn minimize_observed<F>(g: &GramMatrix, opts: &OracleOptions, mut observe: F) -> Result<OracleResult>
where
    F: FnMut(usize, f64),
{
    if !(opts.tol > 0.0) || !(opts.step_divisor >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "oracle tol {} / step divisor {}",
            opts.tol, opts.step_divisor
        )));
    }
    let n = g.dim();
    let lipschitz = 2.0 * g.max_eigenvalue();
    let step = 1.0 / (opts.step_divisor * lipschitz);

    let mut alpha = vec![0.0; n];
    let mut grad = hs_gradient(g, &alpha)?;
    let mut kkt = kkt_residual(&alpha, &grad);
    let mut iterations = 0;
    while kkt > opts.tol && iterations < opts.max_iter {
        for (a, d) in alpha.iter_mut().zip(grad.iter()) {
            *a = (*a - step * d).max(-1.0);
        }
        iterations += 1;
        grad = hs_gradient(g, &alpha)?;
        kkt = kkt_residual(&alpha, &grad);
        observe(iterations, hs_objective(g, &alpha)?);
    }
    if kkt > opts.tol {
        return Err(Error::NotConverged {
            iterations,
            kkt_residual: kkt,
        });
    }
    let active_set = alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a <= -1.0)
        .map(|(i, _)| i)
        .collect();
    Ok(OracleResult {
        objective_value: hs_objective(g, &alpha)?,
        alpha_star: alpha,
        iterations,
        converged: true,
        active_set,
        kkt_residual: kkt,
    })
}

/// Agreement between the Euler-Lagrange verdict and the oracle: the two
/// minimizers coincide when a metric exists, and the oracle sits on the
/// boundary when none does.
pub fn crosscheck(el: &ElReport, oracle: &OracleResult) -> bool {
    match el.verdict {
        Verdict::MetricExists => {
            el.alpha_el.len() == oracle.alpha_star.len()
                && el
                    .alpha_el
                    .iter()
                    .zip(&oracle.alpha_star)
                    .all(|(a, b)| (a - b).abs() <= CROSSCHECK_TOL)
        }
        Verdict::NoMinimalMetric => !oracle.active_set.is_empty(),
    }
}
