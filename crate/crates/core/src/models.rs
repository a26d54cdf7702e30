//! Benchmark `P`-self-adjoint Hamiltonians and phase-diagram sweeps.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::krein::{Pseudometric, Verdict};
use crate::matrix::{c64, ComplexMatrix};
use crate::pipeline::{analyze, Tolerances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("parameter grid is empty")]
    EmptyGrid,
}

impl ModelError {
    pub fn name(&self) -> &'static str {
        match self {
            ModelError::InvalidParameter { .. } => "InvalidParameter",
            ModelError::EmptyGrid => "EmptyGrid",
        }
    }
}

/// `H = [[ia, b], [b, −ia]]` with the exchange pseudometric. Eigenvalues are
/// `±sqrt(b² − a²)`.
pub fn model_pt2(a: f64, b: f64) -> Result<(ComplexMatrix, Pseudometric), ModelError> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(ModelError::InvalidParameter { name: "b", value: b });
    }
    if !a.is_finite() {
        return Err(ModelError::InvalidParameter { name: "a", value: a });
    }
    let h = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => c64(0.0, a),
        (1, 1) => c64(0.0, -a),
        _ => c64(b, 0.0),
    });
    Ok((h, Pseudometric::exchange(2)))
}

/// Open tight-binding chain of `n` sites with hopping `coupling`, gain `+iγ`
/// on the first site and loss `−iγ` on the last; the pseudometric is the
/// site-reversal exchange.
pub fn model_chain(
    n: usize,
    gamma: f64,
    coupling: f64,
) -> Result<(ComplexMatrix, Pseudometric), ModelError> {
    if n < 2 {
        return Err(ModelError::InvalidParameter {
            name: "n",
            value: n as f64,
        });
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    if !(coupling > 0.0 && coupling.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name: "coupling",
            value: coupling,
        });
    }
    let h = ComplexMatrix::from_fn(n, |i, j| {
        if i == j && i == 0 {
            c64(0.0, gamma)
        } else if i == j && i == n - 1 {
            c64(0.0, -gamma)
        } else if i.abs_diff(j) == 1 {
            c64(coupling, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    Ok((h, Pseudometric::exchange(n)))
}

/// One point of a model family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Pt2Cell { a: f64, b: f64 },
    GainLossChain { n: usize, gamma: f64, coupling: f64 },
}

impl ModelSpec {
    pub fn build(&self) -> Result<(ComplexMatrix, Pseudometric), ModelError> {
        match *self {
            ModelSpec::Pt2Cell { a, b } => model_pt2(a, b),
            ModelSpec::GainLossChain { n, gamma, coupling } => model_chain(n, gamma, coupling),
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::Pt2Cell { .. } => &["a", "b"],
            ModelSpec::GainLossChain { .. } => &["n", "gamma", "coupling"],
        }
    }

    pub fn param_values(&self) -> Vec<f64> {
        match *self {
            ModelSpec::Pt2Cell { a, b } => vec![a, b],
            ModelSpec::GainLossChain { n, gamma, coupling } => vec![n as f64, gamma, coupling],
        }
    }

    fn lexicographic(&self, other: &Self) -> Ordering {
        self.param_values()
            .iter()
            .zip(other.param_values().iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

/// Cartesian parameter grid for one family.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamGrid {
    Pt2Cell { a: Vec<f64>, b: Vec<f64> },
    GainLossChain {
        n: Vec<usize>,
        gamma: Vec<f64>,
        coupling: Vec<f64>,
    },
}

impl ParamGrid {
    pub fn points(&self) -> Vec<ModelSpec> {
        let mut pts = Vec::new();
        match self {
            ParamGrid::Pt2Cell { a, b } => {
                for &a in a {
                    for &b in b {
                        pts.push(ModelSpec::Pt2Cell { a, b });
                    }
                }
            }
            ParamGrid::GainLossChain { n, gamma, coupling } => {
                for &n in n {
                    for &gamma in gamma {
                        for &coupling in coupling {
                            pts.push(ModelSpec::GainLossChain { n, gamma, coupling });
                        }
                    }
                }
            }
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointVerdict {
    Unbroken,
    Broken,
    /// Coalescing eigenvalues; the phase boundary itself.
    ExceptionalPoint,
    /// Any other failure, with the module-qualified error name.
    Failed(String),
}

impl PointVerdict {
    pub fn label(&self) -> &str {
        match self {
            PointVerdict::Unbroken => "Unbroken",
            PointVerdict::Broken => "Broken",
            PointVerdict::ExceptionalPoint => "ExceptionalPoint",
            PointVerdict::Failed(name) => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub spec: ModelSpec,
    pub verdict: PointVerdict,
    /// Smallest eigenvalue of the normalized metric (unbroken points only).
    pub min_theta_eigenvalue: Option<f64>,
    /// `max_n |Im E_n|` when a spectrum was obtained.
    pub max_imag_eigenvalue: Option<f64>,
}

fn evaluate(spec: ModelSpec, tol: &Tolerances) -> SweepRow {
    let built = match spec.build() {
        Ok(b) => b,
        Err(e) => {
            return SweepRow {
                spec,
                verdict: PointVerdict::Failed(crate::Error::from(e).qualified_name()),
                min_theta_eigenvalue: None,
                max_imag_eigenvalue: None,
            }
        }
    };
    let (h, p) = built;
    match analyze(&h, &p, tol) {
        Ok(analysis) => SweepRow {
            spec,
            verdict: match analysis.verdict() {
                Verdict::Unbroken => PointVerdict::Unbroken,
                Verdict::Broken => PointVerdict::Broken,
            },
            min_theta_eigenvalue: analysis.certified.as_ref().map(|c| c.metric.min_eigenvalue),
            max_imag_eigenvalue: Some(analysis.max_imaginary_part()),
        },
        Err(e) if e.is_exceptional_point() => SweepRow {
            spec,
            verdict: PointVerdict::ExceptionalPoint,
            min_theta_eigenvalue: None,
            max_imag_eigenvalue: None,
        },
        Err(e) => SweepRow {
            spec,
            verdict: PointVerdict::Failed(e.qualified_name()),
            min_theta_eigenvalue: None,
            max_imag_eigenvalue: None,
        },
    }
}

/// Classifies every grid point. Points are evaluated in parallel; rows come
/// back in lexicographic parameter order. Per-point failures become rows.
pub fn sweep_phase_diagram(grid: &ParamGrid, reality_tol: f64) -> Result<Vec<SweepRow>, ModelError> {
    sweep_with_tolerances(
        grid,
        &Tolerances {
            reality: reality_tol,
            ..Tolerances::default()
        },
    )
}

pub fn sweep_with_tolerances(grid: &ParamGrid, tol: &Tolerances) -> Result<Vec<SweepRow>, ModelError> {
    let mut points = grid.points();
    if points.is_empty() {
        return Err(ModelError::EmptyGrid);
    }
    points.sort_by(|a, b| a.lexicographic(b));
    Ok(points.into_par_iter().map(|s| evaluate(s, tol)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::pseudo_hermiticity_residual;

    #[test]
    fn generated_models_are_pseudo_hermitian() {
        for (h, p) in [
            model_pt2(0.6, 1.0).unwrap(),
            model_pt2(-2.5, 0.3).unwrap(),
            model_chain(2, 0.6, 1.0).unwrap(),
            model_chain(7, 0.3, 1.3).unwrap(),
        ] {
            assert!(pseudo_hermiticity_residual(&h, &p).unwrap() < 1e-14);
        }
    }

    #[test]
    fn parameter_domains() {
        assert!(model_pt2(0.5, 0.0).is_err());
        assert!(model_chain(1, 0.0, 1.0).is_err());
        assert!(model_chain(3, -0.1, 1.0).is_err());
        assert!(model_chain(3, 0.1, 0.0).is_err());
    }

    #[test]
    fn two_site_chain_is_the_cell() {
        let (chain, _) = model_chain(2, 0.6, 1.0).unwrap();
        let (cell, _) = model_pt2(0.6, 1.0).unwrap();
        assert_eq!(chain, cell);
    }

    #[test]
    fn small_sweep() {
        let grid = ParamGrid::Pt2Cell {
            a: vec![1.5, 0.0, 0.5],
            b: vec![1.0],
        };
        let rows = sweep_phase_diagram(&grid, 1e-9).unwrap();
        let verdicts: Vec<_> = rows.iter().map(|r| r.verdict.clone()).collect();
        assert_eq!(
            verdicts,
            vec![PointVerdict::Unbroken, PointVerdict::Unbroken, PointVerdict::Broken]
        );
        assert_eq!(rows[0].spec, ModelSpec::Pt2Cell { a: 0.0, b: 1.0 });
    }

    #[test]
    fn exceptional_point_is_a_row() {
        let grid = ParamGrid::Pt2Cell {
            a: vec![1.0],
            b: vec![1.0],
        };
        let rows = sweep_phase_diagram(&grid, 1e-9).unwrap();
        assert_eq!(rows[0].verdict, PointVerdict::ExceptionalPoint);
    }

    #[test]
    fn hermitian_chain_has_unit_metric() {
        let grid = ParamGrid::GainLossChain {
            n: vec![2, 5, 8],
            gamma: vec![0.0],
            coupling: vec![1.0],
        };
        for row in sweep_phase_diagram(&grid, 1e-9).unwrap() {
            assert_eq!(row.verdict, PointVerdict::Unbroken);
            assert!((row.min_theta_eigenvalue.unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_grid_rejected() {
        let grid = ParamGrid::Pt2Cell { a: vec![], b: vec![1.0] };
        assert_eq!(sweep_phase_diagram(&grid, 1e-9).unwrap_err(), ModelError::EmptyGrid);
    }
}
