use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{fix_phase, KernelError, Spectrum};
use crate::matrix::{vector_norm, ComplexMatrix, ComplexVector};

/// Relative distance (in units of `‖A‖_F`) below which two eigenvalues are
/// treated as one cluster.
pub const CLUSTER_THRESHOLD: f64 = 1e-8;

/// `1 − |⟨v_i, v_j⟩|` below which two unit eigenvectors are parallel
/// (angle below about 1e-6).
const PARALLEL_DEFECT: f64 = 5e-13;

/// Sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Default relative eigen-residual tolerance: `1e-10 · dim`. Multiplied by
/// `‖A‖_F` it gives the absolute residual bound.
pub fn default_tol_eig(dim: usize) -> f64 {
    1e-10 * dim as f64
}

/// Full eigendecomposition of a general complex matrix.
///
/// `tol_eig` is relative: every returned pair satisfies
/// `‖A v − λ v‖ ≤ tol_eig · ‖A‖_F`. Eigenvalues are ordered by real part,
/// then imaginary part, where real parts within the cluster threshold count
/// as equal.
pub fn eig_general(a: &ComplexMatrix, tol_eig: f64) -> Result<Spectrum, KernelError> {
    if !a.is_finite() {
        return Err(KernelError::NonFinite { row: 0, col: 0 });
    }
    let n = a.dim();
    let norm = a.frobenius_norm();

    let (mut t, mut q) = hessenberg(a.as_dmatrix().clone());
    schur_qr(&mut t, &mut q)?;

    let mut pairs: Vec<(Complex64, ComplexVector)> = (0..n)
        .map(|k| {
            let x = triangular_eigenvector(&t, k, norm);
            let mut v = &q * x;
            let nv = vector_norm(&v);
            v /= Complex64::new(nv, 0.0);
            fix_phase(&mut v);
            (t[(k, k)], v)
        })
        .collect();

    sort_spectrum(&mut pairs, CLUSTER_THRESHOLD * norm);

    let threshold = CLUSTER_THRESHOLD * norm;
    for i in 0..n {
        for j in (i + 1)..n {
            if (pairs[i].0 - pairs[j].0).norm() <= threshold {
                return Err(KernelError::DegenerateSpectrum {
                    first: pairs[i].0,
                    second: pairs[j].0,
                    threshold,
                });
            }
        }
    }

    // A defective cluster splits under rounding into eigenvalues ~sqrt(eps)
    // apart whose eigenvectors stay numerically parallel.
    for i in 0..n {
        for j in (i + 1)..n {
            let overlap = crate::matrix::inner(&pairs[i].1, &pairs[j].1).norm();
            if 1.0 - overlap <= PARALLEL_DEFECT {
                return Err(KernelError::DegenerateSpectrum {
                    first: pairs[i].0,
                    second: pairs[j].0,
                    threshold,
                });
            }
        }
    }

    let bound = tol_eig * norm;
    let mut residuals = Vec::with_capacity(n);
    for (index, (lambda, v)) in pairs.iter().enumerate() {
        let r = vector_norm(&(a.mul_vec(v) - v * *lambda));
        if r > bound {
            return Err(KernelError::InaccurateEigenpair {
                index,
                residual: r,
                bound,
            });
        }
        residuals.push(r);
    }

    let (eigenvalues, right_vectors) = pairs.into_iter().unzip();
    Ok(Spectrum {
        eigenvalues,
        right_vectors,
        residuals,
    })
}

/// Orders eigenpairs by real part and, within groups whose real parts agree
/// to `tol`, by imaginary part.
pub(crate) fn sort_spectrum<T>(pairs: &mut [(Complex64, T)], tol: f64) {
    pairs.sort_by(|x, y| x.0.re.total_cmp(&y.0.re));
    let mut start = 0;
    while start < pairs.len() {
        let anchor = pairs[start].0.re;
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0.re - anchor <= tol {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| x.0.im.total_cmp(&y.0.im));
        start = end;
    }
}

/// Householder reduction to upper Hessenberg form, `A = Q H Q†`.
fn hessenberg(mut h: DMatrix<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let n = h.nrows();
    let mut q = DMatrix::<Complex64>::identity(n, n);
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2vv†) H
        for j in 0..n {
            let mut s = zero;
            for (r, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + r, j)];
            }
            s *= 2.0;
            for (r, vi) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vi * s;
            }
        }
        // H <- H (I - 2vv†), Q <- Q (I - 2vv†)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = zero;
                for (r, vi) in v.iter().enumerate() {
                    s += m[(i, k + 1 + r)] * vi;
                }
                s *= 2.0;
                for (r, vi) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= s * vi.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = zero;
        }
    }
    (h, q)
}

/// Unitary rotation `G = [[c, s], [−s̄, c]]` with real `c`, chosen so that
/// `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / ax) * y.conj() / nrm;
    (c, s)
}

/// Single-shift complex QR on an upper Hessenberg matrix, reducing it to
/// upper triangular Schur form and accumulating the rotations into `q`.
fn schur_qr(h: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>) -> Result<(), KernelError> {
    let n = h.nrows();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let anorm = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let cap = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = anorm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(KernelError::ConvergenceFailure { iterations: total });
        }

        let shift = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            let (c, s) = givens(x, y);
            // rows k, k+1
            let col0 = if k > l { k - 1 } else { l };
            for j in col0..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            // columns k, k+1
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + b * s.conj();
                q[(i, k + 1)] = -a * s + b * c;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let mu1 = half_tr + disc;
    let mu2 = half_tr - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Eigenvector of upper triangular `t` for the eigenvalue `t[k,k]`,
/// with component `k` set to one.
fn triangular_eigenvector(t: &DMatrix<Complex64>, k: usize, norm: f64) -> ComplexVector {
    let n = t.nrows();
    let lambda = t[(k, k)];
    let small = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    let mut x = ComplexVector::zeros(n);
    x[k] = Complex64::new(1.0, 0.0);
    for i in (0..k).rev() {
        let mut s = Complex64::new(0.0, 0.0);
        for j in i + 1..=k {
            s += t[(i, j)] * x[j];
        }
        let mut d = t[(i, i)] - lambda;
        if d.norm() < small {
            d = Complex64::new(small, 0.0);
        }
        x[i] = -s / d;
        // keep the partial solution bounded
        let m = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m > 1e100 {
            x /= Complex64::new(m, 0.0);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    fn pt_cell(a: f64, b: f64) -> ComplexMatrix {
        ComplexMatrix::new(2, vec![c64(0.0, a), c64(b, 0.0), c64(b, 0.0), c64(0.0, -a)]).unwrap()
    }

    #[test]
    fn diagonal_spectrum() {
        let a = ComplexMatrix::from_diagonal(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
        let s = eig_general(&a, default_tol_eig(2)).unwrap();
        assert_eq!(s.eigenvalues, vec![c64(1.0, 0.0), c64(2.0, 0.0)]);
        assert!((s.right_vectors[0][0] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((s.right_vectors[1][1] - c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pt_cell_unbroken_closed_form() {
        // λ² = b² − a² = 1 − 0.36
        let s = eig_general(&pt_cell(0.6, 1.0), default_tol_eig(2)).unwrap();
        assert!((s.eigenvalues[0] - c64(-0.8, 0.0)).norm() < 1e-14);
        assert!((s.eigenvalues[1] - c64(0.8, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pt_cell_broken_closed_form() {
        let s = eig_general(&pt_cell(1.0, 0.6), default_tol_eig(2)).unwrap();
        assert!((s.eigenvalues[0] - c64(0.0, -0.8)).norm() < 1e-14);
        assert!((s.eigenvalues[1] - c64(0.0, 0.8)).norm() < 1e-14);
    }

    #[test]
    fn exceptional_point_is_degenerate() {
        let err = eig_general(&pt_cell(1.0, 1.0), default_tol_eig(2)).unwrap_err();
        assert!(matches!(err, KernelError::DegenerateSpectrum { .. }));
    }

    #[test]
    fn phase_convention() {
        let s = eig_general(&pt_cell(0.6, 1.0), default_tol_eig(2)).unwrap();
        for v in &s.right_vectors {
            // ties in modulus go to the lowest index
            let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let idx = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-8)).unwrap();
            assert!(v[idx].im.abs() < 1e-15 && v[idx].re > 0.0);
            assert!((vector_norm(v) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sort_groups_noisy_real_parts() {
        let mut pairs = vec![
            (c64(1e-17, 0.8), ()),
            (c64(-1e-17, -0.8), ()),
            (c64(-3.0, 5.0), ()),
        ];
        sort_spectrum(&mut pairs, 1e-8);
        let ev: Vec<_> = pairs.iter().map(|p| p.0).collect();
        assert_eq!(ev, vec![c64(-3.0, 5.0), c64(-1e-17, -0.8), c64(1e-17, 0.8)]);
    }
}
