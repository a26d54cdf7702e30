use thiserror::Error;

use crate::biortho::BiorthoError;
use crate::dynamics::DynamicsError;
use crate::dyson::DysonError;
use crate::kernel::KernelError;
use crate::krein::KreinError;
use crate::metric::MetricError;
use crate::models::ModelError;

/// Any failure of the analysis pipeline, tagged with the module it came from.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matkernel: {0}")]
    Kernel(#[from] KernelError),
    #[error("biortho: {0}")]
    Biortho(#[from] BiorthoError),
    #[error("krein: {0}")]
    Krein(#[from] KreinError),
    #[error("metric: {0}")]
    Metric(#[from] MetricError),
    #[error("dyson: {0}")]
    Dyson(#[from] DysonError),
    #[error("dynamics: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("models: {0}")]
    Model(#[from] ModelError),
}

impl Error {
    /// Module-qualified variant name, e.g. `metric::BrokenPhase`.
    pub fn qualified_name(&self) -> String {
        match self {
            Error::Kernel(e) => format!("matkernel::{}", e.name()),
            Error::Biortho(e) => format!("biortho::{}", e.name()),
            Error::Krein(e) => format!("krein::{}", e.name()),
            Error::Metric(e) => format!("metric::{}", e.name()),
            Error::Dyson(e) => format!("dyson::{}", e.name()),
            Error::Dynamics(e) => format!("dynamics::{}", e.name()),
            Error::Model(e) => format!("models::{}", e.name()),
        }
    }

    /// True for failures caused by coalescing eigenvalues.
    pub fn is_exceptional_point(&self) -> bool {
        matches!(
            self,
            Error::Kernel(KernelError::DegenerateSpectrum { .. })
                | Error::Biortho(BiorthoError::Kernel(KernelError::DegenerateSpectrum { .. }))
                | Error::Biortho(BiorthoError::Defective { .. })
        )
    }
}
