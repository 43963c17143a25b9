//! Euler-Lagrange system for the minimally anisotropic metric and the
//! existence verdict derived from it.
//!
//! The unconstrained stationary point of the (strictly convex) objective
//! solves `G alpha = -r` with `r_n = sum_{m != n} G[n][m]`. If it lies in the
//! open cone it is the minimally anisotropic metric. Otherwise the cone
//! minimizer sits on the boundary and no metric attains the infimum.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::biortho::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::metric_cone::{
    assemble_metric, gram, min_of, verify_metric, Classification, GramMatrix, MetricCandidate,
    MetricCheck, BOUNDARY_TOL,
};
use crate::oracle::{self, OracleOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    MetricExists,
    NoMinimalMetric,
}

/// Outcome of the sufficient condition `sum_{n != m} |<phi_n, phi_m>|^2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sufficiency {
    pub sum: f64,
    pub holds: bool,
}

/// Summary of the projected-gradient cross-check embedded in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub alpha_star: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub active_set: Vec<usize>,
    pub kkt_residual: f64,
    /// `||alpha_el - alpha_star||_inf`.
    pub max_alpha_diff: f64,
    pub agrees: bool,
}

/// The assembled minimal metric and its verification.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAssembly {
    pub theta: ComplexMatrix,
    pub check: MetricCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElReport {
    pub alpha_el: Vec<f64>,
    pub verdict: Verdict,
    /// `min(alpha_el)` lies within the boundary band around `-1`.
    pub marginal: bool,
    pub minimizer: MetricCandidate,
    /// `||G alpha_el + r||_inf`.
    pub el_residual: f64,
    pub sufficiency_sum: f64,
    pub sufficiency_holds: bool,
    pub oracle: OracleSummary,
    pub metric: Option<MetricAssembly>,
}

/// Solves `G alpha = -r`, by Cholesky with a fully pivoted LU fallback.
pub fn solve_el(g: &GramMatrix) -> Result<Vec<f64>> {
    let rhs = -g.off_diagonal_row_sums();
    let m = g.as_matrix();
    let solution = match m.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => m
            .clone()
            .full_piv_lu()
            .solve(&rhs)
            .ok_or(Error::SingularSystem)?,
    };
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(solution.iter().copied().collect())
}

/// `||G alpha + r||_inf`.
pub fn el_residual(g: &GramMatrix, alpha: &[f64]) -> Result<f64> {
    if alpha.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: alpha.len(),
        });
    }
    let a = DVector::from_column_slice(alpha);
    let res = g.as_matrix() * a + g.off_diagonal_row_sums();
    Ok(res.amax())
}

pub fn classify(alpha_el: &[f64]) -> Verdict {
    match Classification::of(alpha_el) {
        Classification::Interior => Verdict::MetricExists,
        Classification::Boundary => Verdict::NoMinimalMetric,
    }
}

/// True when `min(alpha_el)` is within the boundary band on either side of
/// `-1`, i.e. the verdict is numerically marginal.
pub fn is_marginal(alpha_el: &[f64]) -> bool {
    (min_of(alpha_el) + 1.0).abs() <= BOUNDARY_TOL
}

pub fn sufficiency_check(g: &GramMatrix) -> Sufficiency {
    let sum = g.off_diagonal_row_sums().sum();
    Sufficiency { sum, holds: sum < 1.0 }
}

/// EL solve, verdict, sufficiency and oracle cross-check from the Gram
/// matrix alone.
pub fn analyze_gram(g: &GramMatrix, opts: &OracleOptions) -> Result<ElReport> {
    let alpha_el = solve_el(g)?;
    let verdict = classify(&alpha_el);
    let sufficiency = sufficiency_check(g);
    let oracle = oracle::minimize(g, opts)?;

    let minimizer = match verdict {
        Verdict::MetricExists => MetricCandidate::new(g, alpha_el.clone())?,
        Verdict::NoMinimalMetric => MetricCandidate::new(g, oracle.alpha_star.clone())?,
    };
    let max_alpha_diff = alpha_el
        .iter()
        .zip(&oracle.alpha_star)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut report = ElReport {
        el_residual: el_residual(g, &alpha_el)?,
        marginal: is_marginal(&alpha_el),
        alpha_el,
        verdict,
        minimizer,
        sufficiency_sum: sufficiency.sum,
        sufficiency_holds: sufficiency.holds,
        oracle: OracleSummary {
            alpha_star: Vec::new(),
            objective_value: oracle.objective_value,
            iterations: oracle.iterations,
            active_set: Vec::new(),
            kkt_residual: oracle.kkt_residual,
            max_alpha_diff,
            agrees: false,
        },
        metric: None,
    };
    report.oracle.agrees = oracle::crosscheck(&report, &oracle);
    report.oracle.alpha_star = oracle.alpha_star;
    report.oracle.active_set = oracle.active_set;
    Ok(report)
}

/// Full pipeline for a finite system: [`analyze_gram`] plus, when the metric
/// exists, its dense assembly and intertwining check against `H`.
pub fn analyze(sys: &BiorthogonalSystem) -> Result<ElReport> {
    analyze_with(sys, &OracleOptions::default())
}

pub fn analyze_with(sys: &BiorthogonalSystem, opts: &OracleOptions) -> Result<ElReport> {
    let g = gram(sys)?;
    let mut report = analyze_gram(&g, opts)?;
    if report.verdict == Verdict::MetricExists {
        let theta = assemble_metric(sys, &report.alpha_el)?;
        let check = verify_metric(sys.hamiltonian(), &theta)?;
        report.metric = Some(MetricAssembly { theta, check });
    }
    Ok(report)
}
