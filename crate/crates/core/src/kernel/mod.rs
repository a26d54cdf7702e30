//! Dense complex linear-algebra kernel.
//!
//! General (non-normal) eigendecomposition by Hessenberg reduction and
//! shifted QR, Hermitian eigendecomposition by cyclic Jacobi rotations,
//! the matrix exponential by scaling and squaring, and the principal square
//! root of positive-definite Hermitian matrices.

mod expm;
mod hermitian;
mod schur;

pub use expm::{mat_exp, EXP_SCALING_CAP};
pub use hermitian::{eig_hermitian, psd_sqrt, HERMITICITY_TOL};
pub(crate) use hermitian::spectral_function;
pub use schur::{default_tol_eig, eig_general, CLUSTER_THRESHOLD};

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{ComplexMatrix, ComplexVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("QR iteration did not converge within {iterations} sweeps")]
    ConvergenceFailure { iterations: usize },
    #[error("eigenvalues {first} and {second} closer than cluster threshold {threshold:e}")]
    DegenerateSpectrum {
        first: Complex64,
        second: Complex64,
        threshold: f64,
    },
    #[error("eigenpair {index} residual {residual:e} exceeds bound {bound:e}")]
    InaccurateEigenpair {
        index: usize,
        residual: f64,
        bound: f64,
    },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e}, threshold {threshold:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },
    #[error("exponent norm {norm:e} exceeds scaling cap or result overflowed")]
    Overflow { norm: f64 },
}

impl KernelError {
    pub fn name(&self) -> &'static str {
        match self {
            KernelError::NotSquare { .. } => "NotSquare",
            KernelError::NonFinite { .. } => "NonFinite",
            KernelError::ConvergenceFailure { .. } => "ConvergenceFailure",
            KernelError::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            KernelError::InaccurateEigenpair { .. } => "InaccurateEigenpair",
            KernelError::NotHermitian { .. } => "NotHermitian",
            KernelError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            KernelError::Overflow { .. } => "Overflow",
        }
    }
}

/// Eigenpairs of a matrix in deterministic order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm right eigenvectors, phase-fixed so the largest-modulus
    /// component is real and positive.
    pub right_vectors: Vec<ComplexVector>,
    /// `‖A v_k − λ_k v_k‖` for each pair.
    pub residuals: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Matrix whose columns are the right eigenvectors.
    pub fn vector_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.right_vectors)
    }

    /// 2-norm condition number of the eigenvector matrix.
    pub fn condition_number(&self) -> f64 {
        let sv = self
            .vector_matrix()
            .into_dmatrix()
            .singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// `V Λ V⁻¹`, or `None` when `V` is singular.
    pub fn reconstruct(&self) -> Option<ComplexMatrix> {
        let v = self.vector_matrix();
        let vinv = v.try_inverse()?;
        let lambda = ComplexMatrix::from_diagonal(&self.eigenvalues);
        Some(&(&v * &lambda) * &vinv)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Rotates `v` so that its largest-modulus component is real and positive.
///
/// Near-ties are broken towards the lowest index.
pub(crate) fn fix_phase(v: &mut ComplexVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-8))
        .unwrap_or(0);
    let z = v[pivot];
    let phase = z.conj() / z.norm();
    for x in v.iter_mut() {
        *x *= phase;
    }
    // exact zero imaginary part on the pivot
    v[pivot] = Complex64::new(v[pivot].norm(), 0.0);
}
