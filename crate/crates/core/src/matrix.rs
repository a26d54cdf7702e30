//! Dense complex square matrices and the vector helpers used throughout the crate.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::kernel::KernelError;

/// Column vector of complex amplitudes.
pub type ComplexVector = DVector<Complex64>;

/// A dense, square, finite complex matrix.
///
/// Every operator in the crate (Hamiltonians, metrics, pseudometrics, Dyson
/// maps, observables) is carried by this type. Construction through
/// [`ComplexMatrix::new`] or [`ComplexMatrix::from_dmatrix`] checks squareness
/// and finiteness; arithmetic results are trusted.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a `dim × dim` matrix from row-major entries.
    pub fn new(dim: usize, row_major: Vec<Complex64>) -> Result<Self, KernelError> {
        if dim == 0 || row_major.len() != dim * dim {
            return Err(KernelError::NotSquare {
                rows: dim,
                cols: row_major.len().checked_div(dim).unwrap_or(0),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, &row_major))
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self, KernelError> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(KernelError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if let Some(pos) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            // nalgebra storage is column-major
            let n = m.nrows();
            return Err(KernelError::NonFinite {
                row: pos % n,
                col: pos / n,
            });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by arithmetic on already validated operands.
    pub(crate) fn from_raw(m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[ComplexVector]) -> Self {
        Self(DMatrix::from_columns(cols))
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &ComplexVector, v: &ComplexVector) -> Self {
        Self(u * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.0[(i, j)])
            .collect()
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        self.0.column(j).into_owned()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        &self.0 * v
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖A − A†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `(A + A†)/2`, exactly Hermitian.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim();
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(self.0[(i, i)].re, 0.0)
            } else {
                (self.0[(i, j)] + self.0[(j, i)].conj()) * 0.5
            }
        })
    }

    /// `‖A − B‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// `‖A − I‖_F`.
    pub fn distance_to_identity(&self) -> f64 {
        self.distance(&Self::identity(self.dim()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// LU inverse; `None` when the matrix is numerically singular.
    pub fn try_inverse(&self) -> Option<Self> {
        self.0.clone().lu().try_inverse().map(Self)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// `⟨u, v⟩ = u†v`, conjugate-linear in the first slot.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Complex64 {
    u.dotc(v)
}

pub fn vector_norm(v: &ComplexVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Convenience constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a vector from complex entries.
pub fn vector(entries: &[Complex64]) -> ComplexVector {
    DVector::from_column_slice(entries)
}
