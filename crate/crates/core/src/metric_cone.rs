//! The cone of candidate metrics `Theta = sum_n (1 + alpha_n) phi_n <phi_n, .>`.
//!
//! A candidate is identified by its characteristic vector `alpha`. Every
//! quantity needed for the Hilbert-Schmidt minimization is expressed through
//! the real Gram matrix `G[n][m] = |<phi_m, phi_n>|^2`, using
//!
//! ```text
//! ||Theta - I||_2^2 = c^T G c - 2 sum(c) + n,   c = 1 + alpha.
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::biortho::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, inner, min_hermitian_eigenvalue, ComplexMatrix};

/// Width of the band above `-1` in which a characteristic vector counts as
/// sitting on the cone boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-12;
const DIAGONAL_TOL: f64 = 1e-10;

/// Entrywise squared modulus of the Gram matrix of the `phi` family.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    g: DMatrix<f64>,
}

impl GramMatrix {
    /// Validates and stores a Gram matrix. Entries are symmetrized, the
    /// diagonal is snapped to one and positive definiteness is checked by a
    /// Cholesky factorization.
    pub fn from_entries(mut g: DMatrix<f64>) -> Result<Self> {
        let n = g.nrows();
        if n == 0 || g.ncols() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: g.ncols(),
            });
        }
        for i in 0..n {
            let d = g[(i, i)];
            if !d.is_finite() || (d - 1.0).abs() > DIAGONAL_TOL {
                return Err(Error::InvalidGram(format!("diagonal entry {i} is {d}")));
            }
            g[(i, i)] = 1.0;
            for j in (i + 1)..n {
                let (a, b) = (g[(i, j)], g[(j, i)]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidGram(format!("entry ({i}, {j}) is not finite")));
                }
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidGram(format!("asymmetric at ({i}, {j})")));
                }
                let s = 0.5 * (a + b);
                if !(-SYMMETRY_TOL..=1.0 + DIAGONAL_TOL).contains(&s) {
                    return Err(Error::InvalidGram(format!("entry ({i}, {j}) = {s} outside [0, 1]")));
                }
                let s = s.clamp(0.0, 1.0);
                g[(i, j)] = s;
                g[(j, i)] = s;
            }
        }
        if g.clone().cholesky().is_none() {
            return Err(Error::GramNotPositiveDefinite);
        }
        Ok(Self { g })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            g: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.g[(n, m)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// `r_n = sum_{m != n} G[n][m]`.
    pub fn off_diagonal_row_sums(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.g.row_iter().map(|row| row.sum() - 1.0),
        )
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.g
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.g
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Builds the Gram matrix of the `phi` family of `sys`.
pub fn gram(sys: &BiorthogonalSystem) -> Result<GramMatrix> {
    let n = sys.dim();
    let phi = sys.phi();
    let g = DMatrix::from_fn(n, n, |i, j| inner(&phi[j], &phi[i]).norm_sqr());
    GramMatrix::from_entries(g)
}

/// Position of a characteristic vector relative to the cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Interior,
    Boundary,
}

impl Classification {
    pub fn of(alpha: &[f64]) -> Self {
        if min_of(alpha) > -1.0 + BOUNDARY_TOL {
            Self::Interior
        } else {
            Self::Boundary
        }
    }
}

/// A point of the cone together with its distance to the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCandidate {
    pub alpha: Vec<f64>,
    pub classification: Classification,
    pub hs_distance: f64,
}

impl MetricCandidate {
    pub fn new(g: &GramMatrix, alpha: Vec<f64>) -> Result<Self> {
        let min_alpha = min_of(&alpha);
        if !(min_alpha >= -1.0) {
            return Err(Error::OutsideCone { min_alpha });
        }
        let hs_distance = hs_objective(g, &alpha)?.sqrt();
        Ok(Self {
            classification: Classification::of(&alpha),
            alpha,
            hs_distance,
        })
    }
}

/// `||Theta(alpha) - I||_2^2` evaluated through the Gram quadratic form.
///
/// The formula is the quadratic extension of the objective, so it is also
/// meaningful (and convex) for `alpha` outside the cone.
pub fn hs_objective(g: &GramMatrix, alpha: &[f64]) -> Result<f64> {
    let n = g.dim();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: alpha.len(),
        });
    }
    let coeffs = DVector::from_iterator(n, alpha.iter().map(|a| 1.0 + a));
    let quad = coeffs.dot(&(g.as_matrix() * &coeffs));
    Ok((quad - 2.0 * coeffs.sum() + n as f64).max(0.0))
}

/// Gradient of [`hs_objective`] with respect to `alpha`: `2 (G c - 1)`.
pub fn hs_gradient(g: &GramMatrix, alpha: &[f64]) -> Result<DVector<f64>> {
    let n = g.dim();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: alpha.len(),
        });
    }
    let coeffs = DVector::from_iterator(n, alpha.iter().map(|a| 1.0 + a));
    Ok((g.as_matrix() * coeffs).map(|v| 2.0 * (v - 1.0)))
}

/// Dense `Theta = sum_n (1 + alpha_n) phi_n phi_n^*` for an interior vector.
pub fn assemble_metric(sys: &BiorthogonalSystem, alpha: &[f64]) -> Result<ComplexMatrix> {
    let n = sys.dim();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: alpha.len(),
        });
    }
    if Classification::of(alpha) != Classification::Interior {
        return Err(Error::NotInterior {
            min_alpha: min_of(alpha),
        });
    }
    let mut theta = DMatrix::<Complex64>::zeros(n, n);
    for (f, a) in sys.phi().iter().zip(alpha) {
        theta += (f * f.adjoint()) * c(1.0 + a, 0.0);
    }
    // exact Hermitian symmetry
    let theta = (&theta + theta.adjoint()).scale(0.5);
    ComplexMatrix::new(theta)
}

/// Recovers `alpha_n = <phi_n, Theta psi_n> - 1`.
pub fn characteristic_vector_of(sys: &BiorthogonalSystem, theta: &ComplexMatrix) -> Result<Vec<f64>> {
    if theta.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: theta.dim(),
        });
    }
    let t = theta.as_matrix();
    Ok(sys
        .phi()
        .iter()
        .zip(sys.psi())
        .map(|(f, p)| inner(f, &(t * p)).re - 1.0)
        .collect())
}

/// Checks that `theta` is a metric for `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricCheck {
    /// `||Theta H - H* Theta||_F`.
    pub intertwining: f64,
    /// `||Theta - Theta*||_F`.
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl MetricCheck {
    pub fn is_metric(&self, tol: f64) -> bool {
        self.intertwining <= tol && self.hermiticity <= tol && self.min_eigenvalue > 0.0
    }
}

pub fn verify_metric(h: &ComplexMatrix, theta: &ComplexMatrix) -> Result<MetricCheck> {
    if h.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: theta.dim(),
        });
    }
    let (hm, tm) = (h.as_matrix(), theta.as_matrix());
    Ok(MetricCheck {
        intertwining: frobenius(&(tm * hm - hm.adjoint() * tm)),
        hermiticity: frobenius(&(tm - tm.adjoint())),
        min_eigenvalue: min_hermitian_eigenvalue(tm),
    })
}

pub(crate) fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}
