//! Generators for small quasi-self-adjoint matrices: the two- and
//! four-dimensional worked families and seeded random similarity transforms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{c, inner, CVector, ComplexMatrix};

/// Overlaps at or above this are treated as linearly dependent.
const DEPENDENCE_TOL: f64 = 1e-12;

/// Condition number above which a random similarity is resampled.
const MAX_CONDITION: f64 = 1e8;
const MAX_RESAMPLES: usize = 100;

/// `H = sum_j lambda_j psi_j <phi_j, .>` where `psi` is the dual basis of the
/// columns of `phi`.
pub fn from_phi_family(phi: &DMatrix<Complex64>, lambdas: &[f64]) -> Result<ComplexMatrix> {
    let n = phi.nrows();
    if phi.ncols() != n || lambdas.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lambdas.len().min(phi.ncols()),
        });
    }
    let inv = phi
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotDiagonalizable("phi family is singular".into()))?;
    // dual basis: <psi_i, phi_j> = delta_ij  <=>  Psi = Phi^{-*}
    let psi = inv.adjoint();
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(lambdas[i], 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    ComplexMatrix::new(&psi * d * phi.adjoint())
}

fn check_distinct(lambdas: &[f64]) -> Result<()> {
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    for w in sorted.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::DegenerateSpectrum {
                gap: w[1] - w[0],
                tol: 0.0,
            });
        }
    }
    Ok(())
}

/// Two unit vectors in `C^2` and their eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoByTwoSpec {
    pub phi1: [Complex64; 2],
    pub phi2: [Complex64; 2],
    pub lambda1: f64,
    pub lambda2: f64,
}

impl TwoByTwoSpec {
    /// `phi1 = (1, 0)`, `phi2 = (1, 1)/sqrt(2)`, `lambda = (1, 2)`.
    pub fn standard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            phi1: [c(1.0, 0.0), c(0.0, 0.0)],
            phi2: [c(s, 0.0), c(s, 0.0)],
            lambda1: 1.0,
            lambda2: 2.0,
        }
    }

    /// `phi1 = (1, 0)`, `phi2 = (cos t, e^{i phase} sin t)`.
    pub fn with_angle(angle: f64, phase: f64) -> Self {
        Self {
            phi1: [c(1.0, 0.0), c(0.0, 0.0)],
            phi2: [c(angle.cos(), 0.0), Complex64::from_polar(angle.sin(), phase)],
            lambda1: 1.0,
            lambda2: 2.0,
        }
    }

    /// `|<phi1, phi2>|^2`.
    pub fn gamma(&self) -> f64 {
        let (a, b) = (CVector::from_row_slice(&self.phi1), CVector::from_row_slice(&self.phi2));
        inner(&a, &b).norm_sqr()
    }
}

pub fn build_2x2(spec: &TwoByTwoSpec) -> Result<ComplexMatrix> {
    let (a, b) = (CVector::from_row_slice(&spec.phi1), CVector::from_row_slice(&spec.phi2));
    for v in [&a, &b] {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("phi has norm {}", v.norm())));
        }
    }
    let overlap = inner(&a, &b).norm();
    if overlap >= 1.0 - DEPENDENCE_TOL {
        return Err(Error::DegenerateVectors { overlap });
    }
    if !(spec.lambda1 < spec.lambda2) {
        return Err(Error::InvalidParameter("need lambda1 < lambda2".into()));
    }
    let phi = DMatrix::from_columns(&[a, b]);
    from_phi_family(&phi, &[spec.lambda1, spec.lambda2])
}

/// The four-dimensional family `phi_1 = e_1`, `phi_k = y e_1 + x e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourByFourSpec {
    pub x: f64,
    pub lambdas: [f64; 4],
}

impl FourByFourSpec {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            lambdas: [1.0, 2.0, 3.0, 4.0],
        }
    }

    pub fn y(&self) -> f64 {
        (1.0 - self.x * self.x).sqrt()
    }

    pub fn phi_family(&self) -> DMatrix<Complex64> {
        let (x, y) = (self.x, self.y());
        DMatrix::from_fn(4, 4, |i, j| match (i, j) {
            (0, 0) => c(1.0, 0.0),
            (0, _) => c(y, 0.0),
            (i, j) if i == j => c(x, 0.0),
            _ => c(0.0, 0.0),
        })
    }
}

pub fn build_4x4(spec: &FourByFourSpec) -> Result<ComplexMatrix> {
    if !(spec.x > 0.0 && spec.x < 1.0) {
        return Err(Error::InvalidParameter(format!("x = {} outside (0, 1)", spec.x)));
    }
    check_distinct(&spec.lambdas)?;
    from_phi_family(&spec.phi_family(), &spec.lambdas)
}

/// `S diag(1..n) S^{-1}` with `S = I + perturbation R`, `R` a seeded complex
/// Gaussian matrix scaled to unit Frobenius norm.
pub fn random_instance(n: usize, perturbation: f64, seed: u64) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("random instance needs n >= 2, got {n}")));
    }
    if !(0.0..1.0).contains(&perturbation) {
        return Err(Error::InvalidParameter(format!(
            "perturbation {perturbation} outside [0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESAMPLES {
        let r = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            c(re, im)
        });
        let r = &r / c(crate::linalg::frobenius(&r), 0.0);
        let s = DMatrix::<Complex64>::identity(n, n) + r * c(perturbation, 0.0);
        let sv = s.clone().singular_values();
        let cond = sv.max() / sv.min();
        if !(cond <= MAX_CONDITION) {
            continue;
        }
        let Some(s_inv) = s.clone().try_inverse() else {
            continue;
        };
        let d = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c((i + 1) as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        return ComplexMatrix::new(s * d * s_inv);
    }
    Err(Error::ResamplesExhausted {
        attempts: MAX_RESAMPLES,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn standard_pair_gives_lower_triangular_matrix() {
        let h = build_2x2(&TwoByTwoSpec::standard()).unwrap();
        let expect = [[1.0, 0.0], [1.0, 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(h.get(i, j).re, expect[i][j], epsilon = 1e-14);
                assert_abs_diff_eq!(h.get(i, j).im, 0.0, epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(TwoByTwoSpec::standard().gamma(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn orthonormal_pair_gives_diagonal() {
        let h = build_2x2(&TwoByTwoSpec::with_angle(std::f64::consts::FRAC_PI_2, 0.0)).unwrap();
        assert_abs_diff_eq!(h.get(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.get(1, 1).re, 2.0, epsilon = 1e-15);
        assert!(h.get(0, 1).norm() < 1e-15 && h.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn parallel_pair_is_rejected() {
        let err = build_2x2(&TwoByTwoSpec::with_angle(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateVectors { .. }));
    }

    #[test]
    fn four_by_four_validation() {
        assert!(build_4x4(&FourByFourSpec::new(0.0)).is_err());
        assert!(build_4x4(&FourByFourSpec::new(1.0)).is_err());
        let spec = FourByFourSpec {
            x: 0.5,
            lambdas: [1.0, 2.0, 2.0, 3.0],
        };
        assert!(matches!(build_4x4(&spec), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn random_instance_is_seed_deterministic() {
        let a = random_instance(5, 0.3, 7).unwrap();
        let b = random_instance(5, 0.3, 7).unwrap();
        let c2 = random_instance(5, 0.3, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c2);
        assert!(random_instance(1, 0.1, 0).is_err());
        assert!(random_instance(3, 1.0, 0).is_err());
    }

    #[test]
    fn zero_perturbation_is_diagonal() {
        let h = random_instance(4, 0.0, 3).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { (i + 1) as f64 } else { 0.0 };
                assert_abs_diff_eq!(h.get(i, j).re, e, epsilon = 1e-15);
                assert_abs_diff_eq!(h.get(i, j).im, 0.0, epsilon = 1e-15);
            }
        }
    }
}
