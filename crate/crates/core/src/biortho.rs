//! Biorthogonal eigensystems of quasi-self-adjoint matrices.
//!
//! For a diagonalizable `H` with real simple spectrum we compute eigenvectors
//! `psi_n` of `H` and `phi_n` of `H*`, normalized so that
//! `<psi_m, phi_n> = delta_nm` and `||phi_n|| = 1`. Each `phi_n` additionally
//! has its leading nonzero component made real and positive, which makes the
//! output a deterministic function of `H`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, inner, CVector, ComplexMatrix};

/// Components below this fraction of the largest modulus are skipped when
/// locating the leading component for phase fixing.
const PHASE_FLOOR: f64 = 1e-8;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 100_000;

/// Tolerances for accepting an eigensystem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest imaginary part tolerated on an eigenvalue.
    pub imag: f64,
    /// Bound on `||H psi - lambda psi||` and `||H* phi - lambda phi||`.
    pub eig: f64,
    /// Bound on `|<psi_m, phi_n> - delta_nm|` and `|‖phi_n‖ - 1|`.
    pub biortho: f64,
    /// Minimal admissible eigenvalue gap.
    pub gap: f64,
}

impl Tolerances {
    /// Defaults scaled to `h`: `1e-9 ||H||_F` for eigen residuals and
    /// imaginary parts, `1e-10` for biorthogonality and `1e-8` times the
    /// spectral diameter for gaps (the diameter is filled in once the
    /// spectrum is known, see [`eigensystem`]).
    pub fn for_matrix(h: &ComplexMatrix) -> Self {
        let scale = h.frobenius_norm().max(1.0);
        Self {
            imag: 1e-9 * scale,
            eig: 1e-9 * scale,
            biortho: 1e-10,
            gap: f64::NAN,
        }
    }

    /// Overrides the imaginary-part tolerance.
    pub fn with_imag(mut self, imag: f64) -> Self {
        self.imag = imag;
        self
    }

    fn resolve_gap(mut self, eigenvalues: &[f64]) -> Self {
        if self.gap.is_nan() {
            let diameter = match (eigenvalues.first(), eigenvalues.last()) {
                (Some(lo), Some(hi)) => hi - lo,
                _ => 0.0,
            };
            self.gap = 1e-8 * diameter;
        }
        self
    }
}

/// Measured deviations from the ideal biorthogonal system.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct SystemResiduals {
    pub eigen: f64,
    pub biortho: f64,
    pub norm: f64,
}

/// Eigenvalues with paired eigenvector families of `H` and `H*`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalSystem {
    hamiltonian: ComplexMatrix,
    eigenvalues: Vec<f64>,
    psi: Vec<CVector>,
    phi: Vec<CVector>,
    residuals: SystemResiduals,
}

impl BiorthogonalSystem {
    /// Assembles a system from explicit families, checking every invariant
    /// against `tol`.
    pub fn from_parts(
        hamiltonian: ComplexMatrix,
        eigenvalues: Vec<f64>,
        psi: Vec<CVector>,
        phi: Vec<CVector>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = hamiltonian.dim();
        for len in [eigenvalues.len(), psi.len(), phi.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if let Some(v) = psi.iter().chain(phi.iter()).find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let tol = tol.resolve_gap(&eigenvalues);
        for w in eigenvalues.windows(2) {
            let gap = w[1] - w[0];
            if gap <= tol.gap || gap <= 0.0 {
                return Err(Error::DegenerateSpectrum { gap, tol: tol.gap });
            }
        }

        let h = hamiltonian.as_matrix();
        let ha = h.adjoint();
        let mut residuals = SystemResiduals::default();
        for k in 0..n {
            let lam = c(eigenvalues[k], 0.0);
            let r_psi = (h * &psi[k] - &psi[k] * lam).norm();
            let r_phi = (&ha * &phi[k] - &phi[k] * lam).norm();
            residuals.eigen = residuals.eigen.max(r_psi).max(r_phi);
            residuals.norm = residuals.norm.max((phi[k].norm() - 1.0).abs());
            for m in 0..n {
                let target = if m == k { 1.0 } else { 0.0 };
                let d = (inner(&psi[m], &phi[k]) - c(target, 0.0)).norm();
                residuals.biortho = residuals.biortho.max(d);
            }
        }
        if residuals.eigen > tol.eig {
            return Err(Error::NotDiagonalizable(format!(
                "eigen residual {:e} exceeds {:e}",
                residuals.eigen, tol.eig
            )));
        }
        if residuals.biortho > tol.biortho || residuals.norm > tol.biortho {
            return Err(Error::NotDiagonalizable(format!(
                "biorthogonality residual {:e} / norm residual {:e} exceeds {:e}",
                residuals.biortho, residuals.norm, tol.biortho
            )));
        }

        Ok(Self {
            hamiltonian,
            eigenvalues,
            psi,
            phi,
            residuals,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors of `H`.
    pub fn psi(&self) -> &[CVector] {
        &self.psi
    }

    /// Unit eigenvectors of `H*`.
    pub fn phi(&self) -> &[CVector] {
        &self.phi
    }

    pub fn residuals(&self) -> SystemResiduals {
        self.residuals
    }

    /// Multiplies `phi_n` and `psi_n` by the same unit phase. The result is
    /// an equally valid biorthogonal system for the same `H`.
    pub fn rephased(&self, phases: &[f64]) -> Result<Self> {
        if phases.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: phases.len(),
            });
        }
        let mut out = self.clone();
        for (k, &theta) in phases.iter().enumerate() {
            let u = Complex64::from_polar(1.0, theta);
            out.phi[k] *= u;
            out.psi[k] *= u;
        }
        Ok(out)
    }
}

/// Computes the biorthogonal eigensystem of `h`.
pub fn eigensystem(h: &ComplexMatrix, tol: &Tolerances) -> Result<BiorthogonalSystem> {
    let n = h.dim();
    let (lam_h, vec_h) = schur_eigenpairs(h.as_matrix())?;
    let (lam_a, vec_a) = schur_eigenpairs(&h.as_matrix().adjoint())?;

    for (index, z) in lam_h.iter().enumerate() {
        if z.im.abs() > tol.imag {
            return Err(Error::NonRealSpectrum {
                index,
                imag: z.im,
                tol: tol.imag,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lam_h[a].re.total_cmp(&lam_h[b].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| lam_h[k].re).collect();
    let tol = tol.resolve_gap(&eigenvalues);
    let min_gap = eigenvalues
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if min_gap <= tol.gap {
        return Err(Error::DegenerateSpectrum {
            gap: min_gap,
            tol: tol.gap,
        });
    }

    // Pair each eigenvalue of H with the nearest eigenvalue of H*; the
    // match must be unambiguous relative to the spectral gap.
    let mut taken = vec![false; n];
    let mut psi = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for &k in &order {
        let target = lam_h[k].conj();
        let (j, dist) = lam_a
            .iter()
            .enumerate()
            .map(|(j, z)| (j, (z - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::EigenSolveFailed)?;
        if taken[j] || (n > 1 && dist >= 0.5 * min_gap) {
            return Err(Error::DegenerateSpectrum {
                gap: min_gap,
                tol: tol.gap,
            });
        }
        taken[j] = true;

        let mut f = vec_a[j].clone();
        let norm = f.norm();
        if norm == 0.0 {
            return Err(Error::NotDiagonalizable("zero eigenvector of H*".into()));
        }
        f /= c(norm, 0.0);
        fix_phase(&mut f);

        let mut p = vec_h[k].clone();
        let overlap = inner(&p, &f);
        if overlap.norm() <= f64::EPSILON * p.norm() {
            return Err(Error::NotDiagonalizable(
                "left and right eigenvectors are orthogonal".into(),
            ));
        }
        p /= overlap.conj();
        psi.push(p);
        phi.push(f);
    }

    BiorthogonalSystem::from_parts(h.clone(), eigenvalues, psi, phi, &tol)
}

/// `||I - sum_n psi_n <phi_n, .>||_F`.
pub fn resolution_of_identity_residual(sys: &BiorthogonalSystem) -> f64 {
    let n = sys.dim();
    let mut acc = DMatrix::<Complex64>::identity(n, n);
    for (p, f) in sys.psi().iter().zip(sys.phi()) {
        acc -= p * f.adjoint();
    }
    frobenius(&acc)
}

fn fix_phase(v: &mut CVector) {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(lead) = v.iter().find(|z| z.norm() > PHASE_FLOOR * peak).copied() {
        let u = lead.conj() / lead.norm();
        *v *= u;
    }
}

/// Eigenvalues and (unnormalized) eigenvectors of a general complex matrix
/// through its Schur form `A = Q T Q*`.
fn schur_eigenpairs(a: &DMatrix<Complex64>) -> Result<(Vec<Complex64>, Vec<CVector>)> {
    let n = a.nrows();
    let schur = a
        .clone()
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(Error::EigenSolveFailed)?;
    let (q, t) = schur.unpack();
    let lambdas: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();

    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let mut y = CVector::zeros(n);
        y[k] = c(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = c(0.0, 0.0);
            for l in (j + 1)..=k {
                s += t[(j, l)] * y[l];
            }
            let denom = t[(j, j)] - t[(k, k)];
            if denom.norm() == 0.0 {
                return Err(Error::DegenerateSpectrum { gap: 0.0, tol: 0.0 });
            }
            y[j] = -s / denom;
        }
        vectors.push(&q * y);
    }
    Ok((lambdas, vectors))
}
