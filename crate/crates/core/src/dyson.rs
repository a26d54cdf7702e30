//! Dyson maps `Ω` with `Ω†Ω = Θ` and the Hermitian partner `𝔥 = ΩHΩ⁻¹`.

use num_complex::Complex64;
use thiserror::Error;

use crate::kernel::{eig_hermitian, spectral_function, KernelError};
use crate::matrix::{ComplexMatrix, ComplexVector};
use crate::metric::MetricOperator;

/// Relative bound on `‖Ω†Ω − Θ‖_F/‖Θ‖_F` and `‖ΩΩ⁻¹ − I‖_F`.
pub const FACTORIZATION_TOL: f64 = 1e-10;
/// Base relative Hermiticity tolerance of `𝔥`, multiplied by `cond(Θ)`.
pub const HERMITIZATION_BASE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DysonError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("metric is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("Ω†Ω reproduces Θ only to {residual:e}")]
    FactorizationFailed { residual: f64 },
    #[error("hermitized operator has relative defect {residual:e} > {tolerance:e}")]
    HermitizationFailed { residual: f64, tolerance: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl DysonError {
    pub fn name(&self) -> &'static str {
        match self {
            DysonError::Kernel(e) => e.name(),
            DysonError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            DysonError::FactorizationFailed { .. } => "FactorizationFailed",
            DysonError::HermitizationFailed { .. } => "HermitizationFailed",
            DysonError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

/// Principal Dyson map, `Ω = Θ^{1/2}`.
#[derive(Debug, Clone)]
pub struct DysonMap {
    pub omega: ComplexMatrix,
    pub omega_inverse: ComplexMatrix,
    /// `‖Ω†Ω − Θ‖_F`.
    pub factorization_residual: f64,
    /// `‖ΩΩ⁻¹ − I‖_F`.
    pub inverse_residual: f64,
    /// 2-norm condition number of `Ω`, `sqrt(cond Θ)`.
    pub condition_number: f64,
}

impl DysonMap {
    pub fn dim(&self) -> usize {
        self.omega.dim()
    }
}

/// Builds the Hermitian positive square root of `Θ` and its inverse from one
/// Hermitian eigendecomposition.
pub fn dyson_from_metric(theta: &MetricOperator) -> Result<DysonMap, DysonError> {
    let spec = eig_hermitian(&theta.theta)?;
    let min = spec.eigenvalues[0].re;
    if min <= 0.0 || min <= crate::metric::POSITIVITY_THRESHOLD * theta.theta.frobenius_norm() {
        return Err(DysonError::NotPositiveDefinite { min_eigenvalue: min });
    }
    let max = spec.eigenvalues[spec.len() - 1].re;
    let roots: Vec<f64> = spec.eigenvalues.iter().map(|l| l.re.sqrt()).collect();
    let inv_roots: Vec<f64> = roots.iter().map(|r| 1.0 / r).collect();
    let omega = spectral_function(&spec, &roots);
    let omega_inverse = spectral_function(&spec, &inv_roots);

    let factorization_residual = (&omega.adjoint() * &omega).distance(&theta.theta);
    let inverse_residual = (&omega * &omega_inverse).distance_to_identity();
    let scale = theta.theta.frobenius_norm();
    if factorization_residual > FACTORIZATION_TOL * scale {
        return Err(DysonError::FactorizationFailed {
            residual: factorization_residual,
        });
    }
    if inverse_residual > FACTORIZATION_TOL * (max / min).sqrt().max(1.0) {
        return Err(DysonError::FactorizationFailed {
            residual: inverse_residual,
        });
    }
    Ok(DysonMap {
        omega,
        omega_inverse,
        factorization_residual,
        inverse_residual,
        condition_number: (max / min).sqrt(),
    })
}

/// `𝔥 = ΩHΩ⁻¹` together with its Hermiticity certificate.
#[derive(Debug, Clone)]
pub struct Hermitized {
    /// The similarity transform as computed (not symmetrized).
    pub matrix: ComplexMatrix,
    /// `‖𝔥 − 𝔥†‖_F/‖𝔥‖_F`.
    pub hermiticity_residual: f64,
    /// Tolerance applied, `HERMITIZATION_BASE_TOL · cond(Ω)²`.
    pub tolerance: f64,
}

impl Hermitized {
    /// Exactly Hermitian part of `𝔥`.
    pub fn hermitian(&self) -> ComplexMatrix {
        self.matrix.hermitian_part()
    }
}

pub fn hermitize(h: &ComplexMatrix, d: &DysonMap) -> Result<Hermitized, DysonError> {
    if h.dim() != d.dim() {
        return Err(DysonError::DimensionMismatch {
            expected: d.dim(),
            found: h.dim(),
        });
    }
    let hh = &(&d.omega * h) * &d.omega_inverse;
    let norm = hh.frobenius_norm();
    let residual = if norm == 0.0 {
        0.0
    } else {
        hh.hermiticity_defect() / norm
    };
    let tolerance = HERMITIZATION_BASE_TOL * d.condition_number * d.condition_number;
    if residual > tolerance {
        return Err(DysonError::HermitizationFailed { residual, tolerance });
    }
    Ok(Hermitized {
        matrix: hh,
        hermiticity_residual: residual,
        tolerance,
    })
}

/// `ψ ↦ Ωψ`, from the physical space with metric `Θ` to the Dyson image.
pub fn map_state(psi: &ComplexVector, d: &DysonMap) -> Result<ComplexVector, DysonError> {
    if psi.len() != d.dim() {
        return Err(DysonError::DimensionMismatch {
            expected: d.dim(),
            found: psi.len(),
        });
    }
    Ok(d.omega.mul_vec(psi))
}

/// `⟨Ωφ, Ωψ⟩` in the Dyson image.
pub fn image_inner(phi: &ComplexVector, psi: &ComplexVector, d: &DysonMap) -> Result<Complex64, DysonError> {
    Ok(map_state(phi, d)?.dotc(&map_state(psi, d)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, vector};

    #[test]
    fn identity_metric_gives_trivial_map() {
        let d = dyson_from_metric(&MetricOperator::identity(3)).unwrap();
        assert!(d.omega.distance_to_identity() < 1e-15);
        let psi = vector(&[c64(1.0, 2.0), c64(0.0, -1.0), c64(3.0, 0.0)]);
        assert!((map_state(&psi, &d).unwrap() - &psi).norm() < 1e-15);
    }

    #[test]
    fn diagonal_metric() {
        let m = MetricOperator::from_matrix(ComplexMatrix::from_diagonal(&[c64(4.0, 0.0), c64(1.0, 0.0)]))
            .unwrap();
        let d = dyson_from_metric(&m).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c64(2.0, 0.0), c64(1.0, 0.0)]);
        assert!(d.omega.distance(&expected) < 1e-15);
        let psi = vector(&[c64(1.0, 0.0), c64(0.0, 0.0)]);
        let image = map_state(&psi, &d).unwrap();
        assert!((image[0] - c64(2.0, 0.0)).norm() < 1e-15);
        let s_norm = psi.dotc(&m.theta.mul_vec(&psi));
        assert!((s_norm - c64(4.0, 0.0)).norm() < 1e-15);
        assert!((image.dotc(&image) - s_norm).norm() < 1e-14);
    }

    #[test]
    fn hermitian_input_is_unchanged() {
        let h = ComplexMatrix::new(2, vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(-2.0, 0.0)])
            .unwrap();
        let d = dyson_from_metric(&MetricOperator::identity(2)).unwrap();
        let hh = hermitize(&h, &d).unwrap();
        assert!(hh.matrix.distance(&h) < 1e-15);
    }

    #[test]
    fn dimension_checked() {
        let d = dyson_from_metric(&MetricOperator::identity(2)).unwrap();
        assert!(map_state(&ComplexVector::zeros(3), &d).is_err());
        assert!(hermitize(&ComplexMatrix::identity(3), &d).is_err());
    }
}
