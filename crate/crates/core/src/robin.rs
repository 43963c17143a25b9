//! PT-symmetric Robin Laplacian `-d²/dx²` on `(-π/2, π/2)` with boundary
//! conditions `ψ'(±π/2) + iβ ψ(±π/2) = 0`.
//!
//! Everything here is driven by the closed-form eigenfunctions
//!
//! ```text
//! ψ_0 = A_0 e^{-iβ(x+a)},   ψ_n = A_n [cos(n(x+a)) - (iβ/n) sin(n(x+a))]
//! φ_0 = B_0 e^{ iβ(x+a)},   φ_n = B_n [cos(n(x+a)) + (iβ/n) sin(n(x+a))]
//! ```
//!
//! with `a = π/2`, eigenvalues `λ_0 = β²`, `λ_n = n²`. The Gram coefficients
//! `a_nm = <φ_n, φ_m>` are known analytically, so truncated Euler-Lagrange
//! systems are assembled without discretizing the operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biortho::SystemResiduals;
use crate::elsolve::{analyze_gram, ElReport};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::metric_cone::GramMatrix;
use crate::oracle::OracleOptions;
use crate::quadrature::{CompositeRule, SplitSquareRule};

/// Half-width of the interval; also the shift inside the eigenfunctions.
pub const HALF_WIDTH: f64 = PI / 2.0;

/// Distance from a forbidden integer below which `β` is rejected.
pub const BETA_GUARD: f64 = 1e-8;

pub const DEFAULT_TRUNCATION: usize = 200;
pub const DEFAULT_QUAD_ORDER: usize = 64;

/// Number of Gram coefficients compared against quadrature in the report.
const CHECKED_BLOCK: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobinModel {
    beta: f64,
    truncation: usize,
    quad_order: usize,
}

/// Eigenvalue and normalization constants of one eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinEigendata {
    pub index: usize,
    pub lambda: f64,
    /// Normalization of `φ_n`, real and positive.
    pub b_norm: f64,
    /// Normalization of `ψ_n`; complex for `n = 0` unless `β = 0`.
    pub a_norm: Complex64,
}

impl RobinModel {
    pub fn new(beta: f64, truncation: usize) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta = {beta}")));
        }
        let nearest = beta.round();
        if nearest != 0.0 && (beta - nearest).abs() <= BETA_GUARD {
            return Err(Error::IntegerBeta(beta));
        }
        if truncation == 0 {
            return Err(Error::InvalidParameter("truncation order must be at least 1".into()));
        }
        Ok(Self {
            beta,
            truncation,
            quad_order: DEFAULT_QUAD_ORDER,
        })
    }

    pub fn with_quad_order(mut self, quad_order: usize) -> Result<Self> {
        if quad_order == 0 {
            return Err(Error::InvalidParameter("quadrature order must be positive".into()));
        }
        self.quad_order = quad_order;
        Ok(self)
    }

    pub fn with_truncation(self, truncation: usize) -> Result<Self> {
        Self::new(self.beta, truncation)?.with_quad_order(self.quad_order)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    /// Panels per axis for composite quadrature, growing with the highest
    /// frequency present in the truncation.
    pub fn panels(&self) -> usize {
        (self.truncation + 1).div_ceil(10).max(4)
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.truncation {
            return Err(Error::IndexOutOfTruncation {
                index: n,
                truncation: self.truncation,
            });
        }
        Ok(())
    }

    fn b_norm(&self, n: usize) -> f64 {
        if n == 0 {
            1.0 / PI.sqrt()
        } else {
            let nf = n as f64;
            (2.0 / PI).sqrt() * nf / (nf * nf + self.beta * self.beta).sqrt()
        }
    }

    fn a_norm(&self, n: usize) -> Complex64 {
        let b = self.beta;
        if n == 0 {
            // <ψ_0, φ_0> = conj(A_0) B_0 e^{iπβ} sin(πβ)/β
            let sinc = if b.abs() < 1e-12 { PI } else { (PI * b).sin() / b };
            Complex64::from_polar(1.0, PI * b) / (self.b_norm(0) * sinc)
        } else {
            let nf = n as f64;
            c(1.0 / (self.b_norm(n) * HALF_WIDTH * (1.0 - b * b / (nf * nf))), 0.0)
        }
    }

    pub fn eigendata(&self, n: usize) -> Result<RobinEigendata> {
        self.check_index(n)?;
        Ok(RobinEigendata {
            index: n,
            lambda: if n == 0 {
                self.beta * self.beta
            } else {
                (n * n) as f64
            },
            b_norm: self.b_norm(n),
            a_norm: self.a_norm(n),
        })
    }

    /// Unnormalized mode `cos(nt) + i s (β/n) sin(nt)` (or `e^{isβt}` for
    /// `n = 0`) and its first two derivatives in `t = x + a`.
    fn mode(&self, n: usize, x: f64, sign: f64) -> [Complex64; 3] {
        let t = x + HALF_WIDTH;
        let b = self.beta;
        if n == 0 {
            let k = sign * b;
            let e = Complex64::from_polar(1.0, k * t);
            [e, e * c(0.0, k), e * (-k * k)]
        } else {
            let nf = n as f64;
            let (s, co) = (nf * t).sin_cos();
            let r = sign * b / nf;
            let f = c(co, r * s);
            let df = c(-nf * s, r * nf * co);
            [f, df, f * (-nf * nf)]
        }
    }

    /// Unit eigenfunction `φ_n` of the adjoint at `x ∈ [-π/2, π/2]`.
    pub fn phi(&self, n: usize, x: f64) -> Result<Complex64> {
        self.check_index(n)?;
        Ok(self.mode(n, x, 1.0)[0] * self.b_norm(n))
    }

    /// Eigenfunction `ψ_n`, normalized so that `<ψ_n, φ_n> = 1`.
    pub fn psi(&self, n: usize, x: f64) -> Result<Complex64> {
        self.check_index(n)?;
        Ok(self.mode(n, x, -1.0)[0] * self.a_norm(n))
    }

    pub fn psi_derivative(&self, n: usize, x: f64) -> Result<Complex64> {
        self.check_index(n)?;
        Ok(self.mode(n, x, -1.0)[1] * self.a_norm(n))
    }

    pub fn psi_second_derivative(&self, n: usize, x: f64) -> Result<Complex64> {
        self.check_index(n)?;
        Ok(self.mode(n, x, -1.0)[2] * self.a_norm(n))
    }

    /// Analytic `a_nm = <φ_n, φ_m>`.
    pub fn gram_coefficient(&self, n: usize, m: usize) -> Result<Complex64> {
        self.check_index(n)?;
        self.check_index(m)?;
        Ok(self.coefficient(n, m))
    }

    fn coefficient(&self, n: usize, m: usize) -> Complex64 {
        let b = self.beta;
        let ib = c(0.0, b);
        match (n, m) {
            _ if n == m => c(1.0, 0.0),
            (0, _) => self.coefficient(m, 0).conj(),
            (_, 0) => {
                let nf = n as f64;
                let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
                let phase = Complex64::from_polar(parity, PI * b);
                ib * (c(1.0, 0.0) - phase) * (2.0 * self.b_norm(n) * self.b_norm(0) / (b * b - nf * nf))
            }
            _ => {
                if (n + m) % 2 == 0 {
                    return c(0.0, 0.0);
                }
                let (nf, mf) = (n as f64, m as f64);
                // 1 - e^{iπ(n+m)} = 2 for odd n + m
                ib * (4.0 * self.b_norm(n) * self.b_norm(m) / (mf * mf - nf * nf))
            }
        }
    }

    /// `G[n][m] = |a_nm|^2` for `0 <= n, m <= N`.
    pub fn gram_matrix(&self) -> Result<GramMatrix> {
        let size = self.truncation + 1;
        let g = nalgebra::DMatrix::from_fn(size, size, |i, j| self.coefficient(i, j).norm_sqr());
        GramMatrix::from_entries(g)
    }

    /// `sum_n sum_{m != n} |a_nm|^2` over the truncation. Rows are summed in
    /// parallel and combined in index order so the result is reproducible.
    pub fn offdiagonal_sum(&self) -> f64 {
        let size = self.truncation + 1;
        (0..size)
            .into_par_iter()
            .map(|n| {
                ((n + 1)..size)
                    .map(|m| 2.0 * self.coefficient(n, m).norm_sqr())
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    }

    fn line_rule(&self) -> Result<CompositeRule> {
        CompositeRule::new(-HALF_WIDTH, HALF_WIDTH, self.panels(), self.quad_order)
    }

    /// Quadrature check of the normalization and the eigen equations.
    ///
    /// `biortho` covers `<ψ_m, φ_n> - δ_nm` for `n, m <= 20` and the
    /// diagonal for every `n`; `eigen` is the larger of the boundary-condition
    /// residual and `|-ψ'' - λψ|` at sample points.
    pub fn normalization_residuals(&self) -> Result<SystemResiduals> {
        let rule = self.line_rule()?;
        let size = self.truncation + 1;
        let tab = |sign: f64| -> Vec<Vec<Complex64>> {
            (0..size)
                .into_par_iter()
                .map(|n| {
                    let scale = if sign > 0.0 { c(self.b_norm(n), 0.0) } else { self.a_norm(n) };
                    rule.points.iter().map(|&x| self.mode(n, x, sign)[0] * scale).collect()
                })
                .collect()
        };
        let phis = tab(1.0);
        let psis = tab(-1.0);
        let ip = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
            u.iter()
                .zip(v)
                .zip(&rule.weights)
                .map(|((a, b), w)| a.conj() * b * w)
                .sum()
        };

        let mut out = SystemResiduals::default();
        for n in 0..size {
            out.norm = out.norm.max((ip(&phis[n], &phis[n]).re.sqrt() - 1.0).abs());
            out.biortho = out.biortho.max((ip(&psis[n], &phis[n]) - 1.0).norm());
        }
        let block = size.min(CHECKED_BLOCK + 1);
        for n in 0..block {
            for m in 0..block {
                if n != m {
                    out.biortho = out.biortho.max(ip(&psis[m], &phis[n]).norm());
                }
            }
        }

        let ib = c(0.0, self.beta);
        let samples = [-HALF_WIDTH, -1.0, -0.25, 0.5, 1.3, HALF_WIDTH];
        for n in 0..size {
            let lambda = self.eigendata(n)?.lambda;
            let scale = self.a_norm(n).norm().max(1.0);
            for x in [-HALF_WIDTH, HALF_WIDTH] {
                let bc = self.psi_derivative(n, x)? + ib * self.psi(n, x)?;
                out.eigen = out.eigen.max(bc.norm() / scale);
            }
            for &x in &samples {
                let r = -self.psi_second_derivative(n, x)? - self.psi(n, x)? * lambda;
                out.eigen = out.eigen.max(r.norm() / (scale * lambda.max(1.0)));
            }
        }
        Ok(out)
    }
}

/// Closed-form upper bound `(64β²/π²)(2π² - 16 + π⁴/72)` on the
/// off-diagonal Gram sum, valid for `β ∈ (0, 1/2)`.
pub fn sufficiency_bound(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::BetaOutOfRange(beta));
    }
    let pi2 = PI * PI;
    Ok(64.0 * beta * beta / pi2 * (2.0 * pi2 - 16.0 + pi2 * pi2 / 72.0))
}

fn check_tan_pole(beta: f64) -> Result<()> {
    let nearest = beta.round();
    if nearest != 0.0 && (beta - nearest).abs() <= BETA_GUARD {
        let odd = (nearest as i64).rem_euclid(2) == 1;
        return Err(if odd {
            Error::TanPole(beta)
        } else {
            Error::IntegerBeta(beta)
        });
    }
    Ok(())
}

fn kernel_unchecked(beta: f64, tan: f64, x: f64, y: f64) -> Complex64 {
    let sign = if y > x {
        1.0
    } else if y < x {
        -1.0
    } else {
        0.0
    };
    Complex64::from_polar(beta, -beta * (y - x)) * c(tan, -sign)
}

/// Kernel of `Θ_C - I` for the charge-operator metric:
/// `β e^{-iβ(y-x)} [tan(πβ/2) - i sign(y-x)]`, with `sign(0) = 0`.
pub fn csym_kernel(beta: f64, x: f64, y: f64) -> Result<Complex64> {
    check_tan_pole(beta)?;
    Ok(kernel_unchecked(beta, (PI * beta / 2.0).tan(), x, y))
}

/// `2βπ tan(πβ/2)`, the derivative of `ε ↦ ||K_C + ε φ_0<φ_0,·>||_2²` at 0.
pub fn csym_f0_prime_closed_form(beta: f64) -> Result<f64> {
    check_tan_pole(beta)?;
    Ok(2.0 * beta * PI * (PI * beta / 2.0).tan())
}

/// Quadrature value of `2 ∬ k_C(x, y) conj(φ_0(x)) φ_0(y) dx dy` with the
/// square split along the diagonal.
pub fn csym_f0_prime(beta: f64, quad_order: usize) -> Result<f64> {
    csym_f0_prime_with_panels(beta, quad_order, 4)
}

pub fn csym_f0_prime_with_panels(beta: f64, quad_order: usize, panels: usize) -> Result<f64> {
    check_tan_pole(beta)?;
    let model = RobinModel::new(beta, 1)?.with_quad_order(quad_order)?;
    let rule = SplitSquareRule::new(-HALF_WIDTH, HALF_WIDTH, panels, quad_order)?;
    let tan = (PI * beta / 2.0).tan();
    let value = rule.integrate(|x, y| {
        kernel_unchecked(beta, tan, x, y) * model.mode(0, x, 1.0)[0].conj() * model.mode(0, y, 1.0)[0]
    });
    let b0 = model.b_norm(0);
    Ok(2.0 * b0 * b0 * value.re)
}

/// `α_n(Θ_C) = <φ_n, Θ_C ψ_n> - 1 = <φ_n, K_C ψ_n>` for `n <= N`.
pub fn csym_characteristic_vector(model: &RobinModel) -> Result<Vec<f64>> {
    check_tan_pole(model.beta)?;
    let rule = SplitSquareRule::new(-HALF_WIDTH, HALF_WIDTH, model.panels(), model.quad_order)?;
    let beta = model.beta;
    let tan = (PI * beta / 2.0).tan();
    let kernel = rule.tabulate(|x, y| kernel_unchecked(beta, tan, x, y));
    let alpha = (0..=model.truncation)
        .into_par_iter()
        .map(|n| {
            let u: Vec<Complex64> = rule
                .xs()
                .iter()
                .map(|&x| (model.mode(n, x, 1.0)[0] * model.b_norm(n)).conj())
                .collect();
            let v: Vec<Complex64> = rule
                .ys()
                .iter()
                .map(|&y| model.mode(n, y, -1.0)[0] * model.a_norm(n))
                .collect();
            rule.bilinear(&kernel, &u, &v).re
        })
        .collect();
    Ok(alpha)
}

/// One line of a truncation convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub truncation: usize,
    #[serde(rename = "n")]
    pub index: usize,
    #[serde(rename = "alpha_n")]
    pub alpha: f64,
    pub delta_vs_prev: Option<f64>,
}

/// EL solutions on nested truncations, with the change of every component
/// relative to the previous (smaller) truncation.
pub fn convergence_table(model: &RobinModel, truncations: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let mut sorted: Vec<usize> = truncations.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let solutions = sorted
        .par_iter()
        .map(|&t| {
            let g = model.with_truncation(t)?.gram_matrix()?;
            crate::elsolve::solve_el(&g)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut prev: Option<&Vec<f64>> = None;
    for (&t, alpha) in sorted.iter().zip(&solutions) {
        for (n, &a) in alpha.iter().enumerate() {
            rows.push(ConvergenceRow {
                truncation: t,
                index: n,
                alpha: a,
                delta_vs_prev: prev.and_then(|p| p.get(n)).map(|b| (a - b).abs()),
            });
        }
        prev = Some(alpha);
    }
    Ok(rows)
}

/// Largest `delta_vs_prev` in a table.
pub fn max_delta(rows: &[ConvergenceRow]) -> f64 {
    rows.iter()
        .filter_map(|r| r.delta_vs_prev)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobinAnalysis {
    pub model: RobinModel,
    pub report: ElReport,
    pub convergence: Vec<ConvergenceRow>,
    pub residuals: SystemResiduals,
}

/// Truncated EL analysis at `N` plus the convergence table over
/// `N/4, N/2, N`.
pub fn truncated_analyze(model: &RobinModel) -> Result<RobinAnalysis> {
    let g = model.gram_matrix()?;
    let report = analyze_gram(&g, &OracleOptions::default())?;
    let n = model.truncation;
    let nested: Vec<usize> = [n / 4, n / 2, n].into_iter().filter(|&t| t >= 1).collect();
    Ok(RobinAnalysis {
        model: *model,
        report,
        convergence: convergence_table(model, &nested)?,
        residuals: model.normalization_residuals()?,
    })
}
