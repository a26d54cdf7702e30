//! Paired right/left eigenproblems and biorthonormal normalization.
//!
//! Right vectors solve `H ψ_n = E_n ψ_n`; left vectors are right vectors of
//! `H†` for the conjugate eigenvalue, `H† ψⁿ = E_n* ψⁿ`. The two eigensolves
//! are independent; partners are matched by nearest conjugate eigenvalue and
//! the left vectors are rescaled so that `⟨ψⁿ, ψ_m⟩ = δ_nm`.

use num_complex::Complex64;
use thiserror::Error;

use crate::kernel::{eig_general, KernelError, CLUSTER_THRESHOLD};
use crate::matrix::{inner, vector_norm, ComplexMatrix, ComplexVector};

/// Smallest `|⟨ψⁿ, ψ_n⟩|` between unit partners before the pair is treated
/// as coalescing (exceptional point).
const MIN_PARTNER_OVERLAP: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BiorthoError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("left eigenvalues {first} and {second} are equally near the conjugate of {target}")]
    PairingAmbiguous {
        target: Complex64,
        first: Complex64,
        second: Complex64,
    },
    #[error("right and left partners of mode {index} are numerically orthogonal (overlap {overlap:e}); H is defective")]
    Defective { index: usize, overlap: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl BiorthoError {
    pub fn name(&self) -> &'static str {
        match self {
            BiorthoError::Kernel(e) => e.name(),
            BiorthoError::PairingAmbiguous { .. } => "PairingAmbiguous",
            BiorthoError::Defective { .. } => "Defective",
            BiorthoError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

/// Biorthonormal eigensystem of a non-Hermitian matrix.
#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    /// The matrix this system diagonalizes.
    pub hamiltonian: ComplexMatrix,
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm right eigenvectors `ψ_n`.
    pub right: Vec<ComplexVector>,
    /// Left eigenvectors `ψⁿ`, scaled so that `⟨ψⁿ, ψ_n⟩ = 1`.
    pub left: Vec<ComplexVector>,
    /// Eigenvalues returned by the independent solve of `H†`, in pairing order.
    /// `left_eigenvalues[n] ≈ conj(eigenvalues[n])`.
    pub left_eigenvalues: Vec<Complex64>,
    /// `|conj(left_eigenvalues[n]) − eigenvalues[n]|`.
    pub pairing_residuals: Vec<f64>,
    /// `max_{n,m} |⟨ψⁿ, ψ_m⟩ − δ_nm|`.
    pub gram_residual: f64,
}

impl BiorthogonalSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ_n |ψ_n⟩⟨ψⁿ|`, the identity for a complete biorthonormal basis.
    pub fn resolution_of_identity(&self) -> ComplexMatrix {
        let n = self.dim();
        self.right
            .iter()
            .zip(&self.left)
            .fold(ComplexMatrix::zeros(n), |acc, (r, l)| {
                &acc + &ComplexMatrix::outer(r, l)
            })
    }

    /// Gram matrix `G_nm = ⟨ψⁿ, ψ_m⟩`.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, |i, j| inner(&self.left[i], &self.right[j]))
    }
}

fn gram_deviation(left: &[ComplexVector], right: &[ComplexVector]) -> f64 {
    let mut worst = 0.0f64;
    for (i, l) in left.iter().enumerate() {
        for (j, r) in right.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(l, r) - target).norm());
        }
    }
    worst
}

/// Greedy minimum-distance assignment of each right eigenvalue `E_n` to the
/// left eigenvalue nearest `E_n*`. Returns `assignment[n] = m`.
fn match_conjugates(
    right: &[Complex64],
    left: &[Complex64],
    ambiguity: f64,
) -> Result<Vec<usize>, BiorthoError> {
    let n = right.len();
    for (i, e) in right.iter().enumerate() {
        let target = e.conj();
        let mut d: Vec<(f64, usize)> = left
            .iter()
            .enumerate()
            .map(|(m, l)| ((l - target).norm(), m))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if d.len() > 1 && d[1].0 - d[0].0 <= ambiguity {
            return Err(BiorthoError::PairingAmbiguous {
                target: right[i],
                first: left[d[0].1],
                second: left[d[1].1],
            });
        }
    }

    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, e) in right.iter().enumerate() {
        for (m, l) in left.iter().enumerate() {
            candidates.push(((l - e.conj()).norm(), i, m));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut assignment = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, m) in candidates {
        if assignment[i] == usize::MAX && !taken[m] {
            assignment[i] = m;
            taken[m] = true;
        }
    }
    Ok(assignment)
}

/// Solves the right and left eigenproblems of `h` and returns the paired,
/// biorthonormalized system. `tol_eig` is the relative eigen-residual bound.
pub fn solve_biorthogonal(
    h: &ComplexMatrix,
    tol_eig: f64,
) -> Result<BiorthogonalSystem, BiorthoError> {
    let right = eig_general(h, tol_eig)?;
    let left = eig_general(&h.adjoint(), tol_eig)?;
    let ambiguity = CLUSTER_THRESHOLD * h.frobenius_norm();
    let assignment = match_conjugates(&right.eigenvalues, &left.eigenvalues, ambiguity)?;

    let mut left_vectors = Vec::with_capacity(h.dim());
    let mut left_eigenvalues = Vec::with_capacity(h.dim());
    let mut pairing_residuals = Vec::with_capacity(h.dim());
    for (n, &m) in assignment.iter().enumerate() {
        let psi = &right.right_vectors[n];
        let w = &left.right_vectors[m];
        let overlap = inner(w, psi);
        if overlap.norm() < MIN_PARTNER_OVERLAP {
            return Err(BiorthoError::Defective {
                index: n,
                overlap: overlap.norm(),
            });
        }
        // (αw)†ψ = conj(α)·⟨w,ψ⟩ = 1
        let alpha = overlap.conj().inv();
        left_vectors.push(w * alpha);
        left_eigenvalues.push(left.eigenvalues[m]);
        pairing_residuals.push((left.eigenvalues[m].conj() - right.eigenvalues[n]).norm());
    }

    let gram_residual = gram_deviation(&left_vectors, &right.right_vectors);
    Ok(BiorthogonalSystem {
        hamiltonian: h.clone(),
        eigenvalues: right.eigenvalues,
        right: right.right_vectors,
        left: left_vectors,
        left_eigenvalues,
        pairing_residuals,
        gram_residual,
    })
}

/// Recomputes the certificate of `sys` against `h`: the largest of the right
/// and left eigen-residuals and `‖H‖_F` times the Gram deviation.
pub fn biortho_residual(h: &ComplexMatrix, sys: &BiorthogonalSystem) -> Result<f64, BiorthoError> {
    if sys.dim() != h.dim() {
        return Err(BiorthoError::DimensionMismatch {
            expected: h.dim(),
            found: sys.dim(),
        });
    }
    let hd = h.adjoint();
    let mut worst = 0.0f64;
    for ((e, r), l) in sys.eigenvalues.iter().zip(&sys.right).zip(&sys.left) {
        worst = worst.max(vector_norm(&(h.mul_vec(r) - r * *e)));
        worst = worst.max(vector_norm(&(hd.mul_vec(l) - l * e.conj())));
    }
    let gram = gram_deviation(&sys.left, &sys.right);
    Ok(worst.max(gram * h.frobenius_norm()))
}
