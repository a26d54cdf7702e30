//! End-to-end analysis: biorthogonal system, classification, metric,
//! `C` operator, Dyson map and hermitized Hamiltonian.

use crate::biortho::{solve_biorthogonal, BiorthogonalSystem};
use crate::dyson::{dyson_from_metric, hermitize, DysonMap, Hermitized};
use crate::error::Error;
use crate::kernel::{default_tol_eig, eig_hermitian};
use crate::krein::{classify_pt, pseudo_hermiticity_residual, Pseudometric, PtClassification, Verdict, DEFAULT_REALITY_TOL};
use crate::matrix::ComplexMatrix;
use crate::metric::{
    build_c_operator, build_metric_with_tol, fix_pc_normalization, COperator, MetricOperator,
    PcNormalization, DEFAULT_CERT_TOL,
};

/// User-facing tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative eigen-residual bound; `None` means `1e-10 · dim`.
    pub eig: Option<f64>,
    /// Relative reality threshold on `|Im E|/‖H‖_F`.
    pub reality: f64,
    /// Quasi-Hermiticity certification threshold.
    pub cert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig: None,
            reality: DEFAULT_REALITY_TOL,
            cert: DEFAULT_CERT_TOL,
        }
    }
}

impl Tolerances {
    pub fn eig_for(&self, dim: usize) -> f64 {
        self.eig.unwrap_or_else(|| default_tol_eig(dim))
    }
}

/// Everything that exists only in the unbroken phase.
#[derive(Debug, Clone)]
pub struct Certified {
    pub normalization: PcNormalization,
    pub metric: MetricOperator,
    pub c_operator: COperator,
    /// `‖[C, H]‖/(‖C‖‖H‖)`, informational.
    pub c_commutator_residual: f64,
    pub dyson: DysonMap,
    pub hermitized: Hermitized,
    /// Ascending eigenvalues of the hermitized operator.
    pub hermitized_spectrum: Vec<f64>,
    /// `max_n |spec(𝔥)_n − E_n|`.
    pub isospectrality_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub hamiltonian: ComplexMatrix,
    pub pseudometric: Pseudometric,
    pub system: BiorthogonalSystem,
    pub pseudo_hermiticity_residual: f64,
    pub classification: PtClassification,
    /// `None` in the broken phase.
    pub certified: Option<Certified>,
}

impl Analysis {
    pub fn verdict(&self) -> Verdict {
        self.classification.verdict
    }

    pub fn max_imaginary_part(&self) -> f64 {
        self.system
            .eigenvalues
            .iter()
            .map(|e| e.im.abs())
            .fold(0.0, f64::max)
    }
}

/// Runs the full construction for `h` with pseudometric `p`.
///
/// A broken spectrum is not an error: the returned analysis simply carries
/// no metric. Failures of any certificate in the unbroken phase are errors.
pub fn analyze(h: &ComplexMatrix, p: &Pseudometric, tol: &Tolerances) -> Result<Analysis, Error> {
    let ph = pseudo_hermiticity_residual(h, p)?;
    let system = solve_biorthogonal(h, tol.eig_for(h.dim()))?;
    let classification = classify_pt(h, p, &system, tol.reality)?;

    let certified = match classification.verdict {
        Verdict::Broken => None,
        Verdict::Unbroken => Some(certify(h, p, &system, &classification, tol)?),
    };

    Ok(Analysis {
        hamiltonian: h.clone(),
        pseudometric: p.clone(),
        system,
        pseudo_hermiticity_residual: ph,
        classification,
        certified,
    })
}

fn certify(
    h: &ComplexMatrix,
    p: &Pseudometric,
    system: &BiorthogonalSystem,
    classification: &PtClassification,
    tol: &Tolerances,
) -> Result<Certified, Error> {
    let normalization = fix_pc_normalization(system, classification, p)?;
    let metric = build_metric_with_tol(system, &normalization.scales, tol.cert)?;
    let c_operator = build_c_operator(&metric, p)?;
    let c_commutator_residual = c_operator.commutator_residual(h);
    let dyson = dyson_from_metric(&metric)?;
    let hermitized = hermitize(h, &dyson)?;
    let hermitized_spectrum: Vec<f64> = eig_hermitian(&hermitized.hermitian())?
        .eigenvalues
        .iter()
        .map(|e| e.re)
        .collect();
    let mut energies: Vec<f64> = system.eigenvalues.iter().map(|e| e.re).collect();
    energies.sort_by(f64::total_cmp);
    let isospectrality_residual = hermitized_spectrum
        .iter()
        .zip(&energies)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Certified {
        normalization,
        metric,
        c_operator,
        c_commutator_residual,
        dyson,
        hermitized,
        hermitized_spectrum,
        isospectrality_residual,
    })
}
