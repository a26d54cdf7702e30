//! Krein-space pseudometric and the unbroken/broken classification.
//!
//! A Hamiltonian is `P`-self-adjoint when `H†P = PH`. Applying `P⁻¹` to a
//! left eigenvector then yields a right eigenvector for the conjugate
//! eigenvalue: either the same mode (real eigenvalue) or its partner in a
//! complex-conjugate pair.

use num_complex::Complex64;
use thiserror::Error;

use crate::biortho::BiorthogonalSystem;
use crate::kernel::{eig_hermitian, KernelError};
use crate::matrix::{inner, vector_norm, ComplexMatrix, ComplexVector};

/// Default relative reality threshold: `|Im E| ≤ reality_tol · ‖H‖_F`.
pub const DEFAULT_REALITY_TOL: f64 = 1e-9;
/// Entrywise tolerance on `P = P†` and `P² = I`.
pub const PSEUDOMETRIC_TOL: f64 = 1e-12;
/// Largest `‖H†P − PH‖/(‖P‖‖H‖)` accepted by [`classify_pt`].
pub const PSEUDO_HERMITICITY_TOL: f64 = 1e-9;
/// Largest relative proportionality residual `‖φ − κψ‖/‖φ‖`.
pub const PROPORTIONALITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KreinError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pseudometric is not Hermitian (max entry defect {defect:e})")]
    PseudometricNotHermitian { defect: f64 },
    #[error("pseudometric is singular")]
    SingularPseudometric,
    #[error("H is not P-self-adjoint (relative residual {residual:e})")]
    NotPseudoHermitian { residual: f64 },
    #[error("mode {index}: P⁻¹ψⁿ is not proportional to its partner (relative residual {residual:e})")]
    ProportionalityViolated { index: usize, residual: f64 },
    #[error("mode {index}: no conjugate partner for eigenvalue {eigenvalue}")]
    PairingNotFound { index: usize, eigenvalue: Complex64 },
}

impl KreinError {
    pub fn name(&self) -> &'static str {
        match self {
            KreinError::Kernel(e) => e.name(),
            KreinError::DimensionMismatch { .. } => "DimensionMismatch",
            KreinError::PseudometricNotHermitian { .. } => "PseudometricNotHermitian",
            KreinError::SingularPseudometric => "SingularPseudometric",
            KreinError::NotPseudoHermitian { .. } => "NotPseudoHermitian",
            KreinError::ProportionalityViolated { .. } => "ProportionalityViolated",
            KreinError::PairingNotFound { .. } => "PairingNotFound",
        }
    }
}

/// Hermitian, invertible (usually indefinite) metric of a Krein space.
#[derive(Debug, Clone)]
pub struct Pseudometric {
    matrix: ComplexMatrix,
    inverse: ComplexMatrix,
    involutivity_residual: f64,
    positive: usize,
    negative: usize,
}

impl Pseudometric {
    /// Validates Hermiticity and invertibility. `P⁻¹` is `P` itself when
    /// `P² = I` holds entrywise to [`PSEUDOMETRIC_TOL`]; otherwise it is
    /// obtained by LU inversion.
    pub fn new(p: ComplexMatrix) -> Result<Self, KreinError> {
        let defect = (&p - &p.adjoint()).max_abs();
        if defect > PSEUDOMETRIC_TOL {
            return Err(KreinError::PseudometricNotHermitian { defect });
        }
        let p = p.hermitian_part();
        let spec = eig_hermitian(&p)?;
        let scale = p.frobenius_norm();
        let positive = spec
            .eigenvalues
            .iter()
            .filter(|l| l.re > 1e-12 * scale)
            .count();
        let negative = spec
            .eigenvalues
            .iter()
            .filter(|l| l.re < -1e-12 * scale)
            .count();
        if positive + negative != p.dim() {
            return Err(KreinError::SingularPseudometric);
        }
        let involutivity_residual = (&p * &p).distance_to_identity();
        let max_entry_defect = (&(&p * &p) - &ComplexMatrix::identity(p.dim())).max_abs();
        let inverse = if max_entry_defect <= PSEUDOMETRIC_TOL {
            p.clone()
        } else {
            p.try_inverse().ok_or(KreinError::SingularPseudometric)?
        };
        Ok(Self {
            matrix: p,
            inverse,
            involutivity_residual,
            positive,
            negative,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim)).expect("identity is a pseudometric")
    }

    /// Anti-diagonal exchange (parity) matrix.
    pub fn exchange(dim: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(ComplexMatrix::from_fn(dim, |i, j| {
            if i + j + 1 == dim {
                one
            } else {
                zero
            }
        }))
        .expect("exchange matrix is a pseudometric")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &ComplexMatrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `‖P² − I‖_F`.
    pub fn involutivity_residual(&self) -> f64 {
        self.involutivity_residual
    }

    pub fn is_involutive(&self) -> bool {
        self.involutivity_residual <= PSEUDOMETRIC_TOL * self.dim() as f64
    }

    /// Numbers of positive and negative eigenvalues.
    pub fn signature(&self) -> (usize, usize) {
        (self.positive, self.negative)
    }
}

/// `‖H†P − PH‖_F / (‖P‖_F ‖H‖_F)`; zero exactly when `H` is `P`-self-adjoint.
pub fn pseudo_hermiticity_residual(h: &ComplexMatrix, p: &Pseudometric) -> Result<f64, KreinError> {
    if h.dim() != p.dim() {
        return Err(KreinError::DimensionMismatch {
            expected: h.dim(),
            found: p.dim(),
        });
    }
    let pm = p.matrix();
    let lhs = &h.adjoint() * pm;
    let rhs = pm * h;
    let denom = pm.frobenius_norm() * h.frobenius_norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs.distance(&rhs) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Entire spectrum real.
    Unbroken,
    /// At least one complex-conjugate pair.
    Broken,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Unbroken => "Unbroken",
            Verdict::Broken => "Broken",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PtClassification {
    pub verdict: Verdict,
    pub real_flags: Vec<bool>,
    /// `pairing[n] = Some(m)` for broken modes, with `E_n* ≈ E_m`, `m ≠ n`.
    pub pairing: Vec<Option<usize>>,
    /// `κ_n` with `P⁻¹ψⁿ = κ_n ψ_n`, for real modes.
    pub proportionality_constants: Vec<Option<Complex64>>,
    /// `‖φ_n − κ ψ‖/‖φ_n‖` for every mode (partner vector for broken modes).
    pub proportionality_residuals: Vec<f64>,
    pub pseudo_hermiticity_residual: f64,
}

/// Least-squares scalar fit `φ ≈ κ ψ`, returning `κ` and the relative residual.
fn proportionality(phi: &ComplexVector, psi: &ComplexVector) -> (Complex64, f64) {
    let kappa = inner(psi, phi) / inner(psi, psi);
    let resid = vector_norm(&(phi - psi * kappa));
    let scale = vector_norm(phi);
    (kappa, if scale == 0.0 { resid } else { resid / scale })
}

/// Sorts every mode of `sys` into the real branch (with its proportionality
/// constant) or into a conjugate pair.
pub fn classify_pt(
    h: &ComplexMatrix,
    p: &Pseudometric,
    sys: &BiorthogonalSystem,
    reality_tol: f64,
) -> Result<PtClassification, KreinError> {
    if sys.dim() != h.dim() {
        return Err(KreinError::DimensionMismatch {
            expected: h.dim(),
            found: sys.dim(),
        });
    }
    let ph = pseudo_hermiticity_residual(h, p)?;
    if ph > PSEUDO_HERMITICITY_TOL {
        return Err(KreinError::NotPseudoHermitian { residual: ph });
    }

    let n = sys.dim();
    let hnorm = h.frobenius_norm();
    let mut real_flags = vec![false; n];
    let mut pairing = vec![None; n];
    let mut kappas = vec![None; n];
    let mut residuals = vec![0.0; n];

    for i in 0..n {
        let e = sys.eigenvalues[i];
        let phi = p.inverse().mul_vec(&sys.left[i]);
        if e.im.abs() <= reality_tol * hnorm {
            let (kappa, r) = proportionality(&phi, &sys.right[i]);
            if r > PROPORTIONALITY_TOL {
                return Err(KreinError::ProportionalityViolated { index: i, residual: r });
            }
            real_flags[i] = true;
            kappas[i] = Some(kappa);
            residuals[i] = r;
        } else {
            let target = e.conj();
            let partner = (0..n)
                .filter(|&m| m != i)
                .min_by(|&a, &b| {
                    (sys.eigenvalues[a] - target)
                        .norm()
                        .total_cmp(&(sys.eigenvalues[b] - target).norm())
                })
                .filter(|&m| (sys.eigenvalues[m] - target).norm() <= e.im.abs())
                .ok_or(KreinError::PairingNotFound {
                    index: i,
                    eigenvalue: e,
                })?;
            let (_, r) = proportionality(&phi, &sys.right[partner]);
            if r > PROPORTIONALITY_TOL {
                return Err(KreinError::ProportionalityViolated { index: i, residual: r });
            }
            pairing[i] = Some(partner);
            residuals[i] = r;
        }
    }

    // the conjugate pairing must be a fixed-point-free involution
    for i in 0..n {
        if let Some(m) = pairing[i] {
            if pairing[m] != Some(i) {
                return Err(KreinError::PairingNotFound {
                    index: i,
                    eigenvalue: sys.eigenvalues[i],
                });
            }
        }
    }

    let verdict = if real_flags.iter().all(|&f| f) {
        Verdict::Unbroken
    } else {
        Verdict::Broken
    };
    Ok(PtClassification {
        verdict,
        real_flags,
        pairing,
        proportionality_constants: kappas,
        proportionality_residuals: residuals,
        pseudo_hermiticity_residual: ph,
    })
}
