//! Dense complex matrices stored row-major.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A dense complex matrix. Entry `(i, j)` lives at flat offset `i * cols + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(Array2<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let arr = Array2::from_shape_vec((rows, cols), entries)
            .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        Ok(Self(arr))
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j)))
    }

    pub fn from_array(arr: Array2<C64>) -> Self {
        Self(arr.as_standard_layout().into_owned())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(Array2::zeros((rows, cols)))
    }

    pub fn identity(n: usize) -> Self {
        Self(Array2::eye(n))
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// The matrix unit `|i⟩⟨j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("static shape")
    }

    pub fn pauli_y() -> Self {
        Self::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).expect("static shape")
    }

    pub fn pauli_z() -> Self {
        Self::real_diag(&[1.0, -1.0])
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix, or an error.
    pub fn square_dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NotSquare { rows: self.rows(), cols: self.cols() })
        }
    }

    pub fn view(&self) -> ArrayView2<'_, C64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<C64> {
        self.0
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        self.0.as_slice().expect("standard layout")
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        self.0.as_slice_mut().expect("standard layout")
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        Self::from_array(self.0.t().mapv(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_array(self.0.t().to_owned())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.mapv(|z| z.conj()))
    }

    /// Matrix product. Panics on inner-dimension mismatch.
    pub fn dot(&self, other: &Self) -> Self {
        assert_eq!(self.cols(), other.rows(), "matrix product shape mismatch");
        Self(self.0.dot(&other.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self(self.0.mapv(|z| z * c))
    }

    pub fn trace(&self) -> C64 {
        self.0.diag().iter().sum()
    }

    /// `[a, b] = ab - ba`
    pub fn commutator(&self, other: &Self) -> Self {
        &self.dot(other) - &other.dot(self)
    }

    /// `{a, b} = ab + ba`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.dot(other) + &other.dot(self)
    }

    /// Frobenius norm, equal to the Schatten-2 norm.
    pub fn hs_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.dim(), other.0.dim(), "shape mismatch");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Schatten-2 distance `‖self − other‖₂`.
    pub fn hs_distance(&self, other: &Self) -> f64 {
        (self - other).hs_norm()
    }

    /// Schatten-2 norm of the anti-Hermitian part times two: `‖a − a†‖₂`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.hs_distance(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(a + a†) / 2`
    pub fn hermitian_part(&self) -> Self {
        (self + &self.dagger()).scale_real(0.5)
    }

    /// Kronecker product with row-major composite index `i_a * dim_b + i_b`.
    pub fn kron(&self, other: &Self) -> Self {
        let (ar, ac) = self.0.dim();
        let (br, bc) = other.0.dim();
        let mut out = Array2::zeros((ar * br, ac * bc));
        for i in 0..ar {
            for k in 0..ac {
                let a = self.0[(i, k)];
                if a == ZERO {
                    continue;
                }
                let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, k * bc..(k + 1) * bc]);
                block.zip_mut_with(&other.0, |o, &b| *o = a * b);
            }
        }
        Self(out)
    }

    /// Column-stacking vectorization: `vec(X)[i + j*rows] = X[i, j]`.
    pub fn vectorize(&self) -> Vec<C64> {
        self.0.t().iter().copied().collect()
    }

    /// Inverse of [`vectorize`](Self::vectorize) for an `n×n` matrix.
    pub fn unvectorize(v: &[C64], n: usize) -> Self {
        assert_eq!(v.len(), n * n, "vector length is not n^2");
        Self::from_fn(n, n, |i, j| v[i + j * n])
    }

    /// Fills a complex matrix into nalgebra storage for decompositions.
    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.0[(i, j)])
    }

    pub(crate) fn from_nalgebra(m: &nalgebra::DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
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

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

/// Matrix-vector product.
pub fn mat_vec(m: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    assert_eq!(m.cols(), v.len(), "matrix-vector shape mismatch");
    let cols = m.cols();
    m.entries()
        .chunks_exact(cols)
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Orders two matrices by a total order on their bit patterns, so that
/// binary metrics can be evaluated on a canonical ordering and stay exactly symmetric.
pub(crate) fn canonical_pair<'a>(
    a: &'a ComplexMatrix,
    b: &'a ComplexMatrix,
) -> (&'a ComplexMatrix, &'a ComplexMatrix) {
    for (x, y) in a.entries().iter().zip(b.entries()) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        match ord {
            std::cmp::Ordering::Less => return (a, b),
            std::cmp::Ordering::Greater => return (b, a),
            std::cmp::Ordering::Equal => {}
        }
    }
    (a, b)
}
