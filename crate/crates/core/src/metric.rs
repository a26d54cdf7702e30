//! Metric operators built from left eigenvectors, the `Θ = PC` normalization
//! and metric-mediated adjoints.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::biortho::BiorthogonalSystem;
use crate::kernel::{eig_hermitian, KernelError};
use crate::krein::{Pseudometric, PtClassification, Verdict};
use crate::matrix::{ComplexMatrix, ComplexVector};

/// Minimum eigenvalue of `Θ` must exceed this multiple of `‖Θ‖_F`.
pub const POSITIVITY_THRESHOLD: f64 = 1e-10;
/// Relative Hermiticity defect accepted on an assembled `Θ`.
pub const METRIC_HERMITICITY_TOL: f64 = 1e-12;
/// Default bound on `‖ΘH − H†Θ‖/(‖Θ‖‖H‖)`.
pub const DEFAULT_CERT_TOL: f64 = 1e-9;
/// Bound on `‖C² − I‖_F`.
pub const INVOLUTIVITY_TOL: f64 = 1e-9;
/// Bound on `|Im κ|/|κ|` for the proportionality constants of real modes.
pub const KAPPA_REALITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scale {index} is not strictly positive ({value})")]
    InvalidScale { index: usize, value: f64 },
    #[error("metric is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("metric is not positive definite (min eigenvalue {min_eigenvalue:e}, threshold {threshold:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },
    #[error("H is not quasi-Hermitian with respect to the metric (relative residual {residual:e} > {tolerance:e})")]
    NotQuasiHermitian { residual: f64, tolerance: f64 },
    #[error("spectrum is not entirely real; no metric of the spectral form exists")]
    BrokenPhase,
    #[error("mode {index}: proportionality constant {kappa} is not real")]
    ComplexKappa { index: usize, kappa: Complex64 },
    #[error("C² deviates from the identity by {residual:e}")]
    InvolutivityViolated { residual: f64 },
}

impl MetricError {
    pub fn name(&self) -> &'static str {
        match self {
            MetricError::Kernel(e) => e.name(),
            MetricError::DimensionMismatch { .. } => "DimensionMismatch",
            MetricError::InvalidScale { .. } => "InvalidScale",
            MetricError::NotHermitian { .. } => "NotHermitian",
            MetricError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            MetricError::NotQuasiHermitian { .. } => "NotQuasiHermitian",
            MetricError::BrokenPhase => "BrokenPhase",
            MetricError::ComplexKappa { .. } => "ComplexKappa",
            MetricError::InvolutivityViolated { .. } => "InvolutivityViolated",
        }
    }
}

/// Hermitian positive-definite metric with its certificates.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    pub theta: ComplexMatrix,
    pub theta_inverse: ComplexMatrix,
    /// Per-mode scales `t_n` applied to the left vectors.
    pub scales: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `‖Θ − Θ†‖_F/‖Θ‖_F` before symmetrization.
    pub hermiticity_residual: f64,
    /// `‖ΘH − H†Θ‖/(‖Θ‖‖H‖)`; `None` for a bookkeeping metric that was not
    /// certified against any Hamiltonian.
    pub quasi_h_residual: Option<f64>,
}

impl MetricOperator {
    /// The flat metric `Θ = I`, uncertified. Used for plain-norm bookkeeping.
    pub fn identity(dim: usize) -> Self {
        Self {
            theta: ComplexMatrix::identity(dim),
            theta_inverse: ComplexMatrix::identity(dim),
            scales: vec![1.0; dim],
            min_eigenvalue: 1.0,
            max_eigenvalue: 1.0,
            hermiticity_residual: 0.0,
            quasi_h_residual: None,
        }
    }

    /// Wraps an arbitrary Hermitian positive-definite matrix as a metric,
    /// without a quasi-Hermiticity certificate.
    pub fn from_matrix(theta: ComplexMatrix) -> Result<Self, MetricError> {
        let (theta, inverse, min, max, herm) = certify_positive(theta)?;
        Ok(Self {
            scales: vec![1.0; theta.dim()],
            theta,
            theta_inverse: inverse,
            min_eigenvalue: min,
            max_eigenvalue: max,
            hermiticity_residual: herm,
            quasi_h_residual: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn condition_number(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }

    pub fn is_certified(&self) -> bool {
        self.quasi_h_residual.is_some()
    }

    /// `‖ΘX − X†Θ‖/(‖Θ‖‖X‖)`.
    pub fn quasi_hermiticity_of(&self, x: &ComplexMatrix) -> f64 {
        quasi_h(&self.theta, x)
    }
}

fn quasi_h(theta: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    let denom = theta.frobenius_norm() * x.frobenius_norm();
    if denom == 0.0 {
        return 0.0;
    }
    (theta * x).distance(&(&x.adjoint() * theta)) / denom
}

/// Symmetrizes, checks positivity and inverts through the Hermitian
/// eigendecomposition. Returns `(Θ, Θ⁻¹, λ_min, λ_max, hermiticity defect)`.
fn certify_positive(
    theta: ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix, f64, f64, f64), MetricError> {
    let norm = theta.frobenius_norm();
    let defect = theta.hermiticity_defect() / norm.max(f64::MIN_POSITIVE);
    if defect > METRIC_HERMITICITY_TOL {
        return Err(MetricError::NotHermitian { defect });
    }
    let theta = theta.hermitian_part();
    let spec = eig_hermitian(&theta)?;
    let min = spec.eigenvalues[0].re;
    let max = spec.eigenvalues[spec.len() - 1].re;
    let threshold = POSITIVITY_THRESHOLD * norm;
    if min <= threshold {
        return Err(MetricError::NotPositiveDefinite {
            min_eigenvalue: min,
            threshold,
        });
    }
    let inv: Vec<f64> = spec.eigenvalues.iter().map(|l| 1.0 / l.re).collect();
    let inverse = crate::kernel::spectral_function(&spec, &inv);
    Ok((theta, inverse, min, max, defect))
}

fn check_scales(sys: &BiorthogonalSystem, scales: &[f64]) -> Result<(), MetricError> {
    if scales.len() != sys.dim() {
        return Err(MetricError::DimensionMismatch {
            expected: sys.dim(),
            found: scales.len(),
        });
    }
    if let Some((index, &value)) = scales
        .iter()
        .enumerate()
        .find(|(_, s)| !(s.is_finite() && **s > 0.0))
    {
        return Err(MetricError::InvalidScale { index, value });
    }
    Ok(())
}

/// `Σ_n w_n |ψⁿ⟩⟨ψⁿ|` without any certification.
pub fn spectral_metric(sys: &BiorthogonalSystem, weights: &[f64]) -> ComplexMatrix {
    let n = sys.dim();
    sys.left
        .iter()
        .zip(weights)
        .fold(ComplexMatrix::zeros(n), |acc, (l, w)| {
            &acc + &ComplexMatrix::outer(l, l).scale(Complex64::new(*w, 0.0))
        })
}

/// `Θ = Σ_n t_n² |ψⁿ⟩⟨ψⁿ|`, certified against the default quasi-Hermiticity
/// tolerance.
pub fn build_metric(sys: &BiorthogonalSystem, scales: &[f64]) -> Result<MetricOperator, MetricError> {
    build_metric_with_tol(sys, scales, DEFAULT_CERT_TOL)
}

pub fn build_metric_with_tol(
    sys: &BiorthogonalSystem,
    scales: &[f64],
    cert_tol: f64,
) -> Result<MetricOperator, MetricError> {
    check_scales(sys, scales)?;
    let weights: Vec<f64> = scales.iter().map(|t| t * t).collect();
    let (theta, inverse, min, max, herm) = certify_positive(spectral_metric(sys, &weights))?;
    let residual = quasi_h(&theta, &sys.hamiltonian);
    if residual > cert_tol {
        return Err(MetricError::NotQuasiHermitian {
            residual,
            tolerance: cert_tol,
        });
    }
    Ok(MetricOperator {
        theta,
        theta_inverse: inverse,
        scales: scales.to_vec(),
        min_eigenvalue: min,
        max_eigenvalue: max,
        hermiticity_residual: herm,
        quasi_h_residual: Some(residual),
    })
}

/// Scales and signs that make `C = PΘ` an involution.
#[derive(Debug, Clone)]
pub struct PcNormalization {
    /// `t_n = |κ_n|^{-1/2}`.
    pub scales: Vec<f64>,
    /// `s_n = sign(κ_n)`.
    pub signs: Vec<i8>,
    /// `‖(PΘ)² − I‖_F` at the returned scales.
    pub involutivity_residual: f64,
    /// Whether the residual-minimization fallback replaced the closed form.
    pub refined: bool,
}

fn pc_residual(sys: &BiorthogonalSystem, p: &Pseudometric, weights: &[f64]) -> f64 {
    let c = p.matrix() * &spectral_metric(sys, weights);
    (&c * &c).distance_to_identity()
}

/// Removes the normalization freedom of the spectral metric by imposing
/// `C² = I` on `C = PΘ`.
///
/// With `P⁻¹ψⁿ = κ_n ψ_n` one has `C = Σ t_n² κ_n |ψ_n⟩⟨ψⁿ|`, so the
/// constraint forces `t_n² |κ_n| = 1`. If the closed form misses the
/// involutivity tolerance (noisy `κ`), a Levenberg–Marquardt refinement over
/// the log-weights takes over.
pub fn fix_pc_normalization(
    sys: &BiorthogonalSystem,
    cls: &PtClassification,
    p: &Pseudometric,
) -> Result<PcNormalization, MetricError> {
    if cls.verdict != Verdict::Unbroken {
        return Err(MetricError::BrokenPhase);
    }
    if p.dim() != sys.dim() || cls.proportionality_constants.len() != sys.dim() {
        return Err(MetricError::DimensionMismatch {
            expected: sys.dim(),
            found: p.dim(),
        });
    }
    let mut scales = Vec::with_capacity(sys.dim());
    let mut signs = Vec::with_capacity(sys.dim());
    for (index, kappa) in cls.proportionality_constants.iter().enumerate() {
        let kappa = kappa.ok_or(MetricError::BrokenPhase)?;
        if kappa.norm() == 0.0 || kappa.im.abs() > KAPPA_REALITY_TOL * kappa.norm() {
            return Err(MetricError::ComplexKappa { index, kappa });
        }
        scales.push(kappa.norm().powf(-0.5));
        signs.push(if kappa.re > 0.0 { 1 } else { -1 });
    }
    let weights: Vec<f64> = scales.iter().map(|t| t * t).collect();
    let residual = pc_residual(sys, p, &weights);
    if residual <= INVOLUTIVITY_TOL {
        return Ok(PcNormalization {
            scales,
            signs,
            involutivity_residual: residual,
            refined: false,
        });
    }
    let refined = refine_pc_scales(sys, p, &scales);
    let refined_weights: Vec<f64> = refined.iter().map(|t| t * t).collect();
    let refined_residual = pc_residual(sys, p, &refined_weights);
    if refined_residual <= INVOLUTIVITY_TOL {
        Ok(PcNormalization {
            scales: refined,
            signs,
            involutivity_residual: refined_residual,
            refined: true,
        })
    } else {
        Err(MetricError::InvolutivityViolated {
            residual: refined_residual.min(residual),
        })
    }
}

/// Minimizes `‖(PΘ(t))² − I‖_F²` over positive scales by Levenberg–Marquardt
/// in the log-weights `u_n = ln t_n²`, starting from `initial`.
pub fn refine_pc_scales(sys: &BiorthogonalSystem, p: &Pseudometric, initial: &[f64]) -> Vec<f64> {
    let n = sys.dim();
    let blocks: Vec<ComplexMatrix> = sys
        .left
        .iter()
        .map(|l| p.matrix() * &ComplexMatrix::outer(l, l))
        .collect();
    let assemble = |u: &[f64]| {
        blocks
            .iter()
            .zip(u)
            .fold(ComplexMatrix::zeros(n), |acc, (b, ui)| {
                &acc + &b.scale(Complex64::new(ui.exp(), 0.0))
            })
    };
    let flatten = |m: &ComplexMatrix| -> DVector<f64> {
        let entries = m.to_row_major();
        DVector::from_iterator(
            2 * entries.len(),
            entries.iter().flat_map(|z| [z.re, z.im]),
        )
    };
    let residual_of = |c: &ComplexMatrix| flatten(&(&(c * c) - &ComplexMatrix::identity(n)));

    let mut u: Vec<f64> = initial.iter().map(|t| (t * t).ln()).collect();
    let mut c = assemble(&u);
    let mut r = residual_of(&c);
    let mut cost = r.norm_squared();
    let mut damping = 1e-3;

    for _ in 0..200 {
        if cost.sqrt() <= 1e-14 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(r.len(), n);
        for (k, b) in blocks.iter().enumerate() {
            let wb = b.scale(Complex64::new(u[k].exp(), 0.0));
            let d = &(&wb * &c) + &(&c * &wb);
            jac.set_column(k, &flatten(&d));
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += damping * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                damping *= 10.0;
                continue;
            };
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let c_trial = assemble(&trial);
            let r_trial = residual_of(&c_trial);
            let cost_trial = r_trial.norm_squared();
            if cost_trial < cost {
                u = trial;
                c = c_trial;
                r = r_trial;
                cost = cost_trial;
                damping = (damping * 0.3).max(1e-12);
                improved = true;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    u.iter().map(|x| (0.5 * x).exp()).collect()
}

/// Involution `C` with `Θ = PC`.
#[derive(Debug, Clone)]
pub struct COperator {
    pub c: ComplexMatrix,
    /// `‖C² − I‖_F`.
    pub involutivity_residual: f64,
}

impl COperator {
    /// `‖[C, H]‖_F/(‖C‖_F ‖H‖_F)`. Reported, not enforced.
    pub fn commutator_residual(&self, h: &ComplexMatrix) -> f64 {
        let denom = self.c.frobenius_norm() * h.frobenius_norm();
        if denom == 0.0 {
            return 0.0;
        }
        self.c.commutator(h).frobenius_norm() / denom
    }
}

/// `C = P⁻¹Θ = PΘ` for an involutive `P`.
pub fn build_c_operator(theta: &MetricOperator, p: &Pseudometric) -> Result<COperator, MetricError> {
    if theta.dim() != p.dim() {
        return Err(MetricError::DimensionMismatch {
            expected: theta.dim(),
            found: p.dim(),
        });
    }
    if !p.is_involutive() {
        return Err(MetricError::InvolutivityViolated {
            residual: p.involutivity_residual(),
        });
    }
    let c = p.inverse() * &theta.theta;
    let residual = (&c * &c).distance_to_identity();
    if residual > INVOLUTIVITY_TOL {
        return Err(MetricError::InvolutivityViolated { residual });
    }
    Ok(COperator {
        c,
        involutivity_residual: residual,
    })
}

/// Spectral form `Σ_n s_n |ψ_n⟩⟨ψⁿ|` of the `C` operator, independent of `P`.
pub fn spectral_c(sys: &BiorthogonalSystem, signs: &[i8]) -> ComplexMatrix {
    let n = sys.dim();
    sys.right
        .iter()
        .zip(&sys.left)
        .zip(signs)
        .fold(ComplexMatrix::zeros(n), |acc, ((r, l), s)| {
            &acc + &ComplexMatrix::outer(r, l).scale(Complex64::new(f64::from(*s), 0.0))
        })
}

/// Metric-mediated adjoint `X‡ = Θ⁻¹X†Θ`.
pub fn s_adjoint(x: &ComplexMatrix, theta: &MetricOperator) -> Result<ComplexMatrix, MetricError> {
    if x.dim() != theta.dim() {
        return Err(MetricError::DimensionMismatch {
            expected: theta.dim(),
            found: x.dim(),
        });
    }
    Ok(&(&theta.theta_inverse * &x.adjoint()) * &theta.theta)
}

/// Per-observable residual `‖ΘΛ_j − Λ_j†Θ‖/(‖Θ‖‖Λ_j‖)`. Admissibility is
/// left to the caller.
pub fn observable_compatibility(
    observables: &[ComplexMatrix],
    theta: &MetricOperator,
) -> Result<Vec<f64>, MetricError> {
    observables
        .iter()
        .map(|x| {
            if x.dim() != theta.dim() {
                Err(MetricError::DimensionMismatch {
                    expected: theta.dim(),
                    found: x.dim(),
                })
            } else {
                Ok(theta.quasi_hermiticity_of(x))
            }
        })
        .collect()
}

/// `⟨φ, Θψ⟩` helper shared with the dynamics module.
pub(crate) fn metric_inner(theta: &ComplexMatrix, phi: &ComplexVector, psi: &ComplexVector) -> Complex64 {
    phi.dotc(&theta.mul_vec(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biortho::solve_biorthogonal;
    use crate::krein::{classify_pt, DEFAULT_REALITY_TOL};
    use crate::matrix::c64;

    fn pt_cell(a: f64, b: f64) -> ComplexMatrix {
        ComplexMatrix::new(2, vec![c64(0.0, a), c64(b, 0.0), c64(b, 0.0), c64(0.0, -a)]).unwrap()
    }

    fn unbroken() -> (BiorthogonalSystem, PtClassification, Pseudometric) {
        let h = pt_cell(0.6, 1.0);
        let p = Pseudometric::exchange(2);
        let sys = solve_biorthogonal(&h, 1e-9).unwrap();
        let cls = classify_pt(&h, &p, &sys, DEFAULT_REALITY_TOL).unwrap();
        (sys, cls, p)
    }

    #[test]
    fn hermitian_gives_identity_metric() {
        let h = ComplexMatrix::from_diagonal(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
        let sys = solve_biorthogonal(&h, 1e-9).unwrap();
        let m = build_metric(&sys, &[1.0, 1.0]).unwrap();
        assert!(m.theta.distance_to_identity() < 1e-15);
        let p = Pseudometric::identity(2);
        let cls = classify_pt(&h, &p, &sys, DEFAULT_REALITY_TOL).unwrap();
        let pc = fix_pc_normalization(&sys, &cls, &p).unwrap();
        assert_eq!(pc.signs, vec![1, 1]);
        assert!(pc.scales.iter().all(|t| (t - 1.0).abs() < 1e-15));
        let c = build_c_operator(&m, &p).unwrap();
        assert!(c.c.distance_to_identity() < 1e-15);
    }

    #[test]
    fn unbroken_cell_metric_certified() {
        let (sys, _, _) = unbroken();
        let m = build_metric(&sys, &[1.0, 1.0]).unwrap();
        assert!(m.quasi_h_residual.unwrap() <= 1e-10);
        assert!(m.min_eigenvalue > 0.0);
        // oracle: explicit Gram assembly and independent Hermitian solve
        let explicit = ComplexMatrix::from_fn(2, |i, j| {
            sys.left.iter().map(|l| l[i] * l[j].conj()).sum()
        });
        assert!(explicit.distance(&m.theta) < 1e-14);
        let oracle = explicit.as_dmatrix().clone().symmetric_eigen();
        let min = oracle.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - m.min_eigenvalue).abs() < 1e-12);
        assert!((&m.theta * &m.theta_inverse).distance_to_identity() < 1e-10);
    }

    #[test]
    fn broken_cell_has_no_metric() {
        let h = pt_cell(1.0, 0.6);
        let sys = solve_biorthogonal(&h, 1e-9).unwrap();
        let err = build_metric(&sys, &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, MetricError::NotQuasiHermitian { .. }), "{err:?}");
        // the assembled operator is still positive; it just fails to intertwine
        let theta = spectral_metric(&sys, &[1.0, 1.0]).hermitian_part();
        assert!(eig_hermitian(&theta).unwrap().eigenvalues.iter().all(|e| e.re > 0.0));
        let p = Pseudometric::exchange(2);
        let cls = classify_pt(&h, &p, &sys, DEFAULT_REALITY_TOL).unwrap();
        assert_eq!(fix_pc_normalization(&sys, &cls, &p).unwrap_err(), MetricError::BrokenPhase);
    }

    #[test]
    fn pc_normalization_makes_c_involutive() {
        let (sys, cls, p) = unbroken();
        let pc = fix_pc_normalization(&sys, &cls, &p).unwrap();
        assert!(!pc.refined);
        let m = build_metric(&sys, &pc.scales).unwrap();
        let c = build_c_operator(&m, &p).unwrap();
        assert!(c.involutivity_residual <= 1e-9);
        assert!((p.matrix() * &c.c).distance(&m.theta) <= 1e-9);
        // second algebraic route for C
        assert!(spectral_c(&sys, &pc.signs).distance(&c.c) <= 1e-9);
        assert!(c.commutator_residual(&sys.hamiltonian) < 1e-12);
    }

    #[test]
    fn unit_scales_leave_c_ambiguous() {
        let (sys, _, p) = unbroken();
        let m = build_metric(&sys, &[1.0, 1.0]).unwrap();
        match build_c_operator(&m, &p) {
            Err(MetricError::InvolutivityViolated { residual }) => assert!(residual > 0.1),
            other => panic!("expected involutivity failure, got {other:?}"),
        }
    }

    #[test]
    fn negated_kappa_flips_sign_only() {
        let (sys, mut cls, p) = unbroken();
        let reference = fix_pc_normalization(&sys, &cls, &p).unwrap();
        let k = cls.proportionality_constants[0].unwrap();
        cls.proportionality_constants[0] = Some(-k);
        let pc = fix_pc_normalization(&sys, &cls, &p).unwrap();
        assert_eq!(pc.signs[0], -reference.signs[0]);
        assert_eq!(pc.signs[1], reference.signs[1]);
        // Θ depends only on |κ| and stays positive
        let m = build_metric(&sys, &pc.scales).unwrap();
        assert!(m.min_eigenvalue > 0.0);
        // but the signed spectral C no longer matches PΘ
        let c_signed = spectral_c(&sys, &pc.signs);
        assert!(c_signed.distance(&(p.matrix() * &m.theta)) > 0.1);
    }

    #[test]
    fn complex_kappa_rejected() {
        let (sys, mut cls, p) = unbroken();
        cls.proportionality_constants[1] = Some(c64(1.0, 0.5));
        assert!(matches!(
            fix_pc_normalization(&sys, &cls, &p),
            Err(MetricError::ComplexKappa { index: 1, .. })
        ));
    }

    #[test]
    fn refinement_recovers_closed_form() {
        let (sys, cls, p) = unbroken();
        let closed = fix_pc_normalization(&sys, &cls, &p).unwrap();
        let refined = refine_pc_scales(&sys, &p, &[1.0, 1.0]);
        for (a, b) in closed.scales.iter().zip(&refined) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn s_adjoint_properties() {
        let (sys, cls, p) = unbroken();
        let pc = fix_pc_normalization(&sys, &cls, &p).unwrap();
        let m = build_metric(&sys, &pc.scales).unwrap();
        let h = &sys.hamiltonian;
        let hd = s_adjoint(h, &m).unwrap();
        assert!(hd.distance(h) <= 1e-9 * h.frobenius_norm());
        let ih = h.scale(c64(0.0, 1.0));
        let ihd = s_adjoint(&ih, &m).unwrap();
        assert!(ihd.distance(&ih.scale(c64(-1.0, 0.0))) < 1e-9);
        let flat = MetricOperator::identity(2);
        assert_eq!(s_adjoint(h, &flat).unwrap(), h.adjoint());
    }

    #[test]
    fn compatibility_residuals() {
        let (sys, cls, p) = unbroken();
        let pc = fix_pc_normalization(&sys, &cls, &p).unwrap();
        let m = build_metric(&sys, &pc.scales).unwrap();
        let c = build_c_operator(&m, &p).unwrap();
        let nilpotent =
            ComplexMatrix::new(2, vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let r = observable_compatibility(&[ComplexMatrix::identity(2), c.c.clone(), nilpotent], &m).unwrap();
        assert_eq!(r[0], 0.0);
        assert!(r[1] <= 1e-9);
        assert!(r[2] > 1e-2);
        assert!(observable_compatibility(&[ComplexMatrix::identity(3)], &m).is_err());
    }
}
