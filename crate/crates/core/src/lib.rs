//! Minimally anisotropic metric operators for quasi-self-adjoint operators.
//!
//! Given a diagonalizable `H` with real simple spectrum, every metric making
//! `H` self-adjoint has the form `Theta = sum_n (1 + alpha_n) phi_n <phi_n, .>`
//! where `phi_n` are the unit eigenvectors of `H*`. This crate finds the
//! metric closest to the identity in Hilbert-Schmidt norm, or reports that
//! the closest point of the cone is not a metric.
//!
//! The pipeline is
//! [`biortho::eigensystem`] → [`metric_cone::gram`] → [`elsolve::analyze`],
//! with [`oracle`] supplying an independent projected-gradient minimizer.
//! [`finite_models`] and [`robin`] provide the worked examples, [`cli`] the
//! report formats used by the `anisometric` binary.

pub mod biortho;
pub mod cli;
pub mod elsolve;
pub mod error;
pub mod finite_models;
pub mod linalg;
pub mod metric_cone;
pub mod oracle;
pub mod quadrature;
pub mod robin;

pub use biortho::{eigensystem, BiorthogonalSystem, Tolerances};
pub use elsolve::{analyze, ElReport, Verdict};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use metric_cone::{GramMatrix, MetricCandidate};
