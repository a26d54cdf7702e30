//! Metric operators, `C` operators and Dyson maps for finite-dimensional
//! non-Hermitian Hamiltonians that are self-adjoint with respect to an
//! indefinite pseudometric `P`.
//!
//! The usual entry point is [`analyze`], which builds the biorthogonal
//! eigensystem, classifies the spectrum, and in the unbroken phase returns a
//! certified positive metric `Θ`, the involution `C = P⁻¹Θ`, the Dyson map
//! `Ω = Θ^{1/2}` and the Hermitian partner `ΩHΩ⁻¹`.
//!
//! ```
//! use quasiherm_core::{analyze, model_pt2, Tolerances, Verdict};
//!
//! let (h, p) = model_pt2(0.6, 1.0).unwrap();
//! let a = analyze(&h, &p, &Tolerances::default()).unwrap();
//! assert_eq!(a.verdict(), Verdict::Unbroken);
//! let cert = a.certified.unwrap();
//! assert!((cert.hermitized_spectrum[1] - 0.8).abs() < 1e-12);
//! ```

pub mod biortho;
pub mod dynamics;
pub mod dyson;
mod error;
pub mod kernel;
pub mod krein;
pub mod matrix;
pub mod metric;
pub mod models;
pub mod pipeline;

pub use num_complex::Complex64;

pub use biortho::{biortho_residual, solve_biorthogonal, BiorthoError, BiorthogonalSystem};
pub use dynamics::{
    evolve_heisenberg, evolve_heisenberg_with_rule, evolve_schrodinger, exp_intertwine_residual,
    expectation_consistency, expectation_consistency_with_rule, s_inner, uniform_grid, DynamicsError,
    HeisenbergRule, OperatorTrajectory, StateTrajectory,
};
pub use dyson::{dyson_from_metric, hermitize, image_inner, map_state, DysonError, DysonMap, Hermitized};
pub use error::Error;
pub use kernel::{eig_general, eig_hermitian, mat_exp, psd_sqrt, KernelError, Spectrum};
pub use krein::{classify_pt, pseudo_hermiticity_residual, Pseudometric, PtClassification, KreinError, Verdict};
pub use matrix::{c64, inner, ComplexMatrix, ComplexVector};
pub use metric::{
    build_c_operator, build_metric, build_metric_with_tol, fix_pc_normalization, observable_compatibility,
    s_adjoint, COperator, MetricError, MetricOperator, PcNormalization,
};
pub use models::{
    model_chain, model_pt2, sweep_phase_diagram, sweep_with_tolerances, ModelError, ModelSpec, ParamGrid,
    PointVerdict, SweepRow,
};
pub use pipeline::{analyze, Analysis, Certified, Tolerances};
