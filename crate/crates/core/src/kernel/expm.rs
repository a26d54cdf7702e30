use num_complex::Complex64;

use super::KernelError;
use crate::matrix::ComplexMatrix;

/// Largest `‖s·A‖₁` accepted before the exponential is refused as an overflow.
pub const EXP_SCALING_CAP: f64 = 1e5;

// Padé degree selection bounds on ‖A‖₁ (double precision).
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(s·A)` by scaling and squaring with a diagonal Padé approximant of
/// degree 3, 5, 7, 9 or 13.
pub fn mat_exp(a: &ComplexMatrix, s: Complex64) -> Result<ComplexMatrix, KernelError> {
    let n = a.dim();
    if s == Complex64::new(0.0, 0.0) {
        return Ok(ComplexMatrix::identity(n));
    }
    let m = a.scale(s);
    let norm = m.one_norm();
    if !norm.is_finite() || norm > EXP_SCALING_CAP {
        return Err(KernelError::Overflow { norm });
    }

    let result = if norm <= THETA_3 {
        pade_low(&m, &B3)
    } else if norm <= THETA_5 {
        pade_low(&m, &B5)
    } else if norm <= THETA_7 {
        pade_low(&m, &B7)
    } else if norm <= THETA_9 {
        pade_low(&m, &B9)
    } else {
        let squarings = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        let scaled = m.scale(Complex64::new(2f64.powi(-squarings), 0.0));
        pade_13(&scaled).map(|mut r| {
            for _ in 0..squarings {
                r = &r * &r;
            }
            r
        })
    };
    match result {
        Some(r) if r.is_finite() => Ok(r),
        _ => Err(KernelError::Overflow { norm }),
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Solves `(V − U) R = V + U`.
fn pade_solve(u: &ComplexMatrix, v: &ComplexMatrix) -> Option<ComplexMatrix> {
    let p = (v + u).into_dmatrix();
    let q = (v - u).into_dmatrix();
    q.lu().solve(&p).map(ComplexMatrix::from_raw)
}

fn pade_low(a: &ComplexMatrix, b: &[f64]) -> Option<ComplexMatrix> {
    let n = a.dim();
    let ident = ComplexMatrix::identity(n);
    let a2 = a * a;
    // even powers I, A², A⁴, ...
    let mut powers = vec![ident.clone()];
    for _ in 1..b.len() / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut odd = ComplexMatrix::zeros(n);
    let mut even = ComplexMatrix::zeros(n);
    for (k, p) in powers.iter().enumerate() {
        odd = &odd + &p.scale(real(b[2 * k + 1]));
        even = &even + &p.scale(real(b[2 * k]));
    }
    let u = a * &odd;
    pade_solve(&u, &even)
}

fn pade_13(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = a.dim();
    let b = &B13;
    let ident = ComplexMatrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let lin = |c: [f64; 4]| {
        let mut acc = a6.scale(real(c[0]));
        acc = &acc + &a4.scale(real(c[1]));
        acc = &acc + &a2.scale(real(c[2]));
        &acc + &ident.scale(real(c[3]))
    };
    let u_inner = &a6 * &lin([b[13], b[11], b[9], 0.0]);
    let u = a * &(&u_inner + &lin([b[7], b[5], b[3], b[1]]));
    let v_inner = &a6 * &lin([b[12], b[10], b[8], 0.0]);
    let v = &v_inner + &lin([b[6], b[4], b[2], b[0]]);
    pade_solve(&u, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;
    use std::f64::consts::PI;

    #[test]
    fn zero_exponent_is_identity() {
        let a = ComplexMatrix::new(2, vec![c64(1.0, 2.0), c64(3.0, 0.0), c64(0.0, -1.0), c64(5.0, 5.0)])
            .unwrap();
        assert_eq!(mat_exp(&a, c64(0.0, 0.0)).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn scalar_exponentials() {
        let a = ComplexMatrix::from_diagonal(&[c64(0.0, PI), c64(0.0, 0.0)]);
        let e = mat_exp(&a, c64(1.0, 0.0)).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c64(-1.0, 0.0), c64(1.0, 0.0)]);
        assert!(e.distance(&expected) < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let a = ComplexMatrix::new(2, vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 0.0)])
            .unwrap();
        for &t in &[0.001, 0.1, 0.7, 1.9, 5.0, 37.5] {
            let e = mat_exp(&a, c64(t, 0.0)).unwrap();
            let (s, c) = f64::sin_cos(t);
            let expected =
                ComplexMatrix::new(2, vec![c64(c, 0.0), c64(s, 0.0), c64(-s, 0.0), c64(c, 0.0)]).unwrap();
            assert!(e.distance(&expected) < 1e-13 * (1.0 + t), "t = {t}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let a = ComplexMatrix::identity(2);
        assert!(matches!(
            mat_exp(&a, c64(1e6, 0.0)),
            Err(KernelError::Overflow { .. })
        ));
        // within the scaling cap but e^{1000} is not representable
        assert!(matches!(
            mat_exp(&a, c64(1000.0, 0.0)),
            Err(KernelError::Overflow { .. })
        ));
    }
}
