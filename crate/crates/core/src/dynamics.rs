//! Schrödinger and Heisenberg evolution with metric bookkeeping.
//!
//! States evolve as `ψ(t) = e^{−iHt}ψ(0)` and observables as
//! `X(t) = e^{iHt} X e^{−iHt}` (the same `H` on both sides, not `H†`).
//! Norms are tracked both in the flat product and in the product
//! `⟨φ, ψ⟩_Θ = ⟨φ, Θψ⟩`.

use num_complex::Complex64;
use thiserror::Error;

use crate::kernel::{mat_exp, KernelError};
use crate::matrix::{vector_norm, ComplexMatrix, ComplexVector};
use crate::metric::{metric_inner, MetricOperator};

/// Norms above this are reported as overflow rather than propagated.
const NORM_CEILING: f64 = 1e200;
/// Relative spacing variation under which a grid is treated as uniform.
const UNIFORM_GRID_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("evolution overflowed at t = {t}")]
    Overflow { t: f64 },
    #[error("time grid must be non-empty, finite and strictly increasing")]
    InvalidGrid,
    #[error("initial state is zero")]
    ZeroState,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl DynamicsError {
    pub fn name(&self) -> &'static str {
        match self {
            DynamicsError::Kernel(KernelError::Overflow { .. }) => "Overflow",
            DynamicsError::Kernel(e) => e.name(),
            DynamicsError::Overflow { .. } => "Overflow",
            DynamicsError::InvalidGrid => "InvalidGrid",
            DynamicsError::ZeroState => "ZeroState",
            DynamicsError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

/// Default evolution tolerance at time `t`: `1e-9 · (1 + |t|·‖H‖_F)`.
pub fn evolution_tolerance(t: f64, h: &ComplexMatrix) -> f64 {
    1e-9 * (1.0 + t.abs() * h.frobenius_norm())
}

/// Schrödinger-picture trajectory.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    pub t_grid: Vec<f64>,
    pub states: Vec<ComplexVector>,
    /// `sqrt⟨ψ, Θψ⟩` at every node.
    pub s_norms: Vec<f64>,
    /// `sqrt⟨ψ, ψ⟩` at every node.
    pub f_norms: Vec<f64>,
    /// Whether `Θ` carried a quasi-Hermiticity certificate.
    pub metric_certified: bool,
    /// Least-squares slope of `ln f_norm` against `t`.
    pub growth_rate: f64,
}

impl StateTrajectory {
    /// `max_k |s_k − s_0| / s_0`.
    pub fn max_relative_s_drift(&self) -> f64 {
        relative_drift(&self.s_norms)
    }

    /// `max_k |f_k − f_0| / f_0`.
    pub fn max_relative_f_drift(&self) -> f64 {
        relative_drift(&self.f_norms)
    }
}

fn relative_drift(values: &[f64]) -> f64 {
    let first = values[0];
    values
        .iter()
        .map(|v| (v - first).abs() / first)
        .fold(0.0, f64::max)
}

/// Heisenberg-picture trajectory of one observable.
#[derive(Debug, Clone)]
pub struct OperatorTrajectory {
    pub t_grid: Vec<f64>,
    pub operators: Vec<ComplexMatrix>,
    /// `‖X(t)‖_F` at every node.
    pub f_norms: Vec<f64>,
}

/// How the observable is dressed in the Heisenberg picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeisenbergRule {
    /// `e^{iHt} X e^{−iHt}`; consistent with the metric product.
    Standard,
    /// `e^{iHt} X e^{−iH†t}`; inconsistent unless `H` is Hermitian. Kept as a
    /// negative control.
    AdjointRight,
}

fn validate_grid(grid: &[f64]) -> Result<(), DynamicsError> {
    if grid.is_empty()
        || grid.iter().any(|t| !t.is_finite())
        || grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(DynamicsError::InvalidGrid);
    }
    Ok(())
}

fn is_uniform(grid: &[f64]) -> bool {
    if grid.len() < 3 {
        return true;
    }
    let dt = grid[1] - grid[0];
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= UNIFORM_GRID_TOL * dt.abs().max(grid[grid.len() - 1].abs()))
}

fn kernel_overflow(t: f64) -> impl Fn(KernelError) -> DynamicsError {
    move |e| match e {
        KernelError::Overflow { .. } => DynamicsError::Overflow { t },
        other => DynamicsError::Kernel(other),
    }
}

/// `exp(sign·i·A·t_k)` for every node. Uniform grids reuse one step propagator.
fn propagators(a: &ComplexMatrix, grid: &[f64], sign: f64) -> Result<Vec<ComplexMatrix>, DynamicsError> {
    let gen = |t: f64| mat_exp(a, Complex64::new(0.0, sign * t)).map_err(kernel_overflow(t));
    let mut out = Vec::with_capacity(grid.len());
    if is_uniform(grid) && grid.len() > 1 {
        let step = gen(grid[1] - grid[0])?;
        out.push(gen(grid[0])?);
        for &t in &grid[1..] {
            let next = &step * out.last().unwrap();
            if !next.is_finite() || next.max_abs() > NORM_CEILING {
                return Err(DynamicsError::Overflow { t });
            }
            out.push(next);
        }
    } else {
        for &t in grid {
            out.push(gen(t)?);
        }
    }
    Ok(out)
}

fn growth_rate(grid: &[f64], norms: &[f64]) -> f64 {
    if grid.len() < 2 {
        return 0.0;
    }
    let n = grid.len() as f64;
    let logs: Vec<f64> = norms.iter().map(|x| x.ln()).collect();
    let mt = grid.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let cov: f64 = grid.iter().zip(&logs).map(|(t, l)| (t - mt) * (l - ml)).sum();
    let var: f64 = grid.iter().map(|t| (t - mt) * (t - mt)).sum();
    cov / var
}

/// Propagates `psi0` over `t_grid` with `e^{−iHt}` and records both norms.
pub fn evolve_schrodinger(
    h: &ComplexMatrix,
    psi0: &ComplexVector,
    t_grid: &[f64],
    theta: &MetricOperator,
) -> Result<StateTrajectory, DynamicsError> {
    validate_grid(t_grid)?;
    check_dim(h.dim(), psi0.len())?;
    check_dim(h.dim(), theta.dim())?;
    if vector_norm(psi0) == 0.0 {
        return Err(DynamicsError::ZeroState);
    }
    let props = propagators(h, t_grid, -1.0)?;
    let mut states = Vec::with_capacity(t_grid.len());
    let mut s_norms = Vec::with_capacity(t_grid.len());
    let mut f_norms = Vec::with_capacity(t_grid.len());
    for (u, &t) in props.iter().zip(t_grid) {
        let psi = u.mul_vec(psi0);
        let f = vector_norm(&psi);
        let s = metric_inner(&theta.theta, &psi, &psi).re.max(0.0).sqrt();
        if !f.is_finite() || f > NORM_CEILING || !s.is_finite() {
            return Err(DynamicsError::Overflow { t });
        }
        states.push(psi);
        s_norms.push(s);
        f_norms.push(f);
    }
    let growth = growth_rate(t_grid, &f_norms);
    Ok(StateTrajectory {
        t_grid: t_grid.to_vec(),
        states,
        s_norms,
        f_norms,
        metric_certified: theta.is_certified(),
        growth_rate: growth,
    })
}

pub fn evolve_heisenberg(
    h: &ComplexMatrix,
    x: &ComplexMatrix,
    t_grid: &[f64],
) -> Result<OperatorTrajectory, DynamicsError> {
    evolve_heisenberg_with_rule(h, x, t_grid, HeisenbergRule::Standard)
}

pub fn evolve_heisenberg_with_rule(
    h: &ComplexMatrix,
    x: &ComplexMatrix,
    t_grid: &[f64],
    rule: HeisenbergRule,
) -> Result<OperatorTrajectory, DynamicsError> {
    validate_grid(t_grid)?;
    check_dim(h.dim(), x.dim())?;
    let left = propagators(h, t_grid, 1.0)?;
    let right = match rule {
        HeisenbergRule::Standard => propagators(h, t_grid, -1.0)?,
        HeisenbergRule::AdjointRight => propagators(&h.adjoint(), t_grid, -1.0)?,
    };
    let operators: Vec<ComplexMatrix> = left
        .iter()
        .zip(&right)
        .map(|(l, r)| &(l * x) * r)
        .collect();
    let f_norms = operators.iter().map(|o| o.frobenius_norm()).collect();
    Ok(OperatorTrajectory {
        t_grid: t_grid.to_vec(),
        operators,
        f_norms,
    })
}

/// `⟨φ, Θψ⟩`.
pub fn s_inner(
    phi: &ComplexVector,
    psi: &ComplexVector,
    theta: &MetricOperator,
) -> Result<Complex64, DynamicsError> {
    check_dim(theta.dim(), phi.len())?;
    check_dim(theta.dim(), psi.len())?;
    Ok(metric_inner(&theta.theta, phi, psi))
}

/// `‖e^{iH†t}Θ − Θe^{iHt}‖_F / (‖Θ‖_F ‖e^{iH†t}‖_F)`, the intertwining of the
/// two exponentials by the metric (right-multiplied form, exact at `t = 0`).
pub fn exp_intertwine_residual(
    h: &ComplexMatrix,
    theta: &MetricOperator,
    t: f64,
) -> Result<f64, DynamicsError> {
    check_dim(h.dim(), theta.dim())?;
    let s = Complex64::new(0.0, t);
    let lhs = mat_exp(&h.adjoint(), s).map_err(kernel_overflow(t))?;
    let rhs = mat_exp(h, s).map_err(kernel_overflow(t))?;
    let diff = (&lhs * &theta.theta).distance(&(&theta.theta * &rhs));
    Ok(diff / (theta.theta.frobenius_norm() * lhs.frobenius_norm()))
}

/// Largest gap over the grid between `⟨φ(t), Xψ(t)⟩_Θ` (states evolved) and
/// `⟨φ(0), X(t)ψ(0)⟩_Θ` (observable evolved).
pub fn expectation_consistency(
    h: &ComplexMatrix,
    x: &ComplexMatrix,
    phi0: &ComplexVector,
    psi0: &ComplexVector,
    theta: &MetricOperator,
    t_grid: &[f64],
) -> Result<f64, DynamicsError> {
    expectation_consistency_with_rule(h, x, phi0, psi0, theta, t_grid, HeisenbergRule::Standard)
}

pub fn expectation_consistency_with_rule(
    h: &ComplexMatrix,
    x: &ComplexMatrix,
    phi0: &ComplexVector,
    psi0: &ComplexVector,
    theta: &MetricOperator,
    t_grid: &[f64],
    rule: HeisenbergRule,
) -> Result<f64, DynamicsError> {
    check_dim(h.dim(), theta.dim())?;
    let phi_traj = evolve_schrodinger(h, phi0, t_grid, theta)?;
    let psi_traj = evolve_schrodinger(h, psi0, t_grid, theta)?;
    let ops = evolve_heisenberg_with_rule(h, x, t_grid, rule)?;
    let mut worst = 0.0f64;
    for k in 0..t_grid.len() {
        let schrodinger = metric_inner(
            &theta.theta,
            &phi_traj.states[k],
            &x.mul_vec(&psi_traj.states[k]),
        );
        let heisenberg = metric_inner(&theta.theta, phi0, &ops.operators[k].mul_vec(psi0));
        worst = worst.max((schrodinger - heisenberg).norm());
    }
    Ok(worst)
}

fn check_dim(expected: usize, found: usize) -> Result<(), DynamicsError> {
    if expected != found {
        return Err(DynamicsError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `n` equally spaced nodes on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}
