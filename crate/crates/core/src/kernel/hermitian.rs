use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{fix_phase, KernelError, Spectrum};
use crate::matrix::{vector_norm, ComplexMatrix, ComplexVector};

/// Relative Hermiticity defect `‖A − A†‖_F / ‖A‖_F` accepted by the
/// Hermitian routines.
pub const HERMITICITY_TOL: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 100;

fn check_hermitian(a: &ComplexMatrix) -> Result<(), KernelError> {
    let defect = a.hermiticity_defect();
    if defect > HERMITICITY_TOL * a.frobenius_norm().max(f64::MIN_POSITIVE) {
        return Err(KernelError::NotHermitian { defect });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Eigenvalues are real (stored with zero imaginary part) and ascending;
/// degenerate eigenvalues are allowed. The eigenvectors are orthonormal.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<Spectrum, KernelError> {
    check_hermitian(a)?;
    let n = a.dim();
    let mut m = a.hermitian_part().into_dmatrix();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let total = m.iter().map(|z| z.norm_sqr()).sum::<f64>();

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        let scale = n as f64 * f64::EPSILON;
        if off <= scale * scale * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(KernelError::ConvergenceFailure {
            iterations: MAX_JACOBI_SWEEPS,
        });
    }

    let mut pairs: Vec<(f64, ComplexVector)> = (0..n)
        .map(|k| {
            let mut col = v.column(k).into_owned();
            fix_phase(&mut col);
            (m[(k, k)].re, col)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let residuals = pairs
        .iter()
        .map(|(lambda, col)| vector_norm(&(a.mul_vec(col) - col * Complex64::new(*lambda, 0.0))))
        .collect();
    let (eigenvalues, right_vectors): (Vec<_>, Vec<_>) = pairs
        .into_iter()
        .map(|(l, c)| (Complex64::new(l, 0.0), c))
        .unzip();
    Ok(Spectrum {
        eigenvalues,
        right_vectors,
        residuals,
    })
}

/// One complex Jacobi rotation annihilating `m[p,q]`; `m ← U† m U`, `v ← v U`.
fn rotate(m: &mut DMatrix<Complex64>, v: &mut DMatrix<Complex64>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // phase e^{-iφ} turns the (p,q) block into a real symmetric one
    let phase = apq.conj() / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = [[c, s], [−s·phase, c·phase]] on columns p, q
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = phase * (-s);
    let u_qq = phase * c;

    let n = m.nrows();
    for i in 0..n {
        let a = m[(i, p)];
        let b = m[(i, q)];
        m[(i, p)] = a * u_pp + b * u_qp;
        m[(i, q)] = a * u_pq + b * u_qq;
    }
    for j in 0..n {
        let a = m[(p, j)];
        let b = m[(q, j)];
        m[(p, j)] = u_pp.conj() * a + u_qp.conj() * b;
        m[(q, j)] = u_pq.conj() * a + u_qq.conj() * b;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
    for i in 0..n {
        let a = v[(i, p)];
        let b = v[(i, q)];
        v[(i, p)] = a * u_pp + b * u_qp;
        v[(i, q)] = a * u_pq + b * u_qq;
    }
}

/// Principal (Hermitian positive) square root of a Hermitian positive-definite
/// matrix. Fails when the smallest eigenvalue does not exceed
/// `1e-10 · ‖A‖_F`.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix, KernelError> {
    let spec = eig_hermitian(a)?;
    let threshold = 1e-10 * a.frobenius_norm();
    let min = spec.eigenvalues[0].re;
    if min <= threshold {
        return Err(KernelError::NotPositiveDefinite {
            min_eigenvalue: min,
            threshold,
        });
    }
    let roots: Vec<f64> = spec.eigenvalues.iter().map(|l| l.re.sqrt()).collect();
    Ok(spectral_function(&spec, &roots))
}

/// `U diag(f) U†` for a Hermitian spectrum, returned exactly Hermitian.
pub(crate) fn spectral_function(spec: &Spectrum, values: &[f64]) -> ComplexMatrix {
    let u = spec.vector_matrix();
    let d = ComplexMatrix::from_diagonal(
        &values.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>(),
    );
    (&(&u * &d) * &u.adjoint()).hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    #[test]
    fn identity_allows_degeneracy() {
        let s = eig_hermitian(&ComplexMatrix::identity(3)).unwrap();
        assert!(s.eigenvalues.iter().all(|l| *l == c64(1.0, 0.0)));
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        // (2 − λ)² − 1 = 0
        let a = ComplexMatrix::new(2, vec![c64(2.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(2.0, 0.0)])
            .unwrap();
        let s = eig_hermitian(&a).unwrap();
        assert!((s.eigenvalues[0].re - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1].re - 3.0).abs() < 1e-14);
    }

    #[test]
    fn exchange_matrix() {
        let a = ComplexMatrix::new(2, vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
            .unwrap();
        let s = eig_hermitian(&a).unwrap();
        assert!((s.eigenvalues[0].re + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::new(2, vec![c64(0.0, 1.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
            .unwrap();
        assert!(matches!(eig_hermitian(&a), Err(KernelError::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let a = ComplexMatrix::from_diagonal(&[c64(4.0, 0.0), c64(9.0, 0.0)]);
        let r = psd_sqrt(&a).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c64(2.0, 0.0), c64(3.0, 0.0)]);
        assert!(r.distance(&expected) < 1e-14);
        assert!(psd_sqrt(&ComplexMatrix::identity(2)).unwrap().distance_to_identity() < 1e-15);
    }

    #[test]
    fn sqrt_by_remultiplication() {
        let a = ComplexMatrix::new(2, vec![c64(2.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(2.0, 0.0)])
            .unwrap();
        let r = psd_sqrt(&a).unwrap();
        assert!((&r * &r).distance(&a) <= 1e-12);
        assert!(r.commutator(&a).frobenius_norm() < 1e-13);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let a = ComplexMatrix::from_diagonal(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        assert!(matches!(psd_sqrt(&a), Err(KernelError::NotPositiveDefinite { .. })));
    }
}
