//! Row-major dense matrices.

use std::ops::{Index, IndexMut};

use crate::arith::{Arith, Float, C64};
use crate::error::{Error, Result};

/// Dense row-major matrix: `data[i * cols + j]` holds element `(i, j)`.
///
/// Indices are 0-based. Out-of-range access panics.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// The double-precision complex matrix used throughout the public API.
pub type DenseMatrix = Matrix<C64>;

impl<T: Copy> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of range"
        );
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of range"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, C64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| {
            C64::new(if i == j { d[i] } else { 0.0 }, 0.0)
        })
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain `O(n^3)` product. Panics on mismatched shapes.
    pub fn matmul(&self, rhs: &Self) -> Self {
        matmul(&Float, self, rhs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - rhs` divided by that of `rhs`.
    pub fn rel_dist(&self, rhs: &Self) -> f64 {
        frobenius_norm(&self.sub(rhs)) / frobenius_norm(rhs)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)] == C64::new(0.0, 0.0)))
    }

    /// Exact Hermitian symmetry: `a_ij == conj(a_ji)` with no tolerance
    /// (signed zeros compare equal).
    pub fn is_hermitian_exact(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i..self.cols).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    /// Copy of the upper triangle (diagonal included), zeros below.
    pub fn upper(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            if i <= j {
                self[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

pub(crate) fn matmul<A: Arith>(
    ctx: &A,
    a: &Matrix<A::Elem>,
    b: &Matrix<A::Elem>,
) -> Matrix<A::Elem> {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    Matrix::from_fn(a.rows, b.cols, |i, j| {
        let mut acc = ctx.zero();
        for k in 0..a.cols {
            acc = ctx.add(acc, ctx.mul(a[(i, k)], b[(k, j)]));
        }
        acc
    })
}

/// `sqrt(sum |m_ij|^2)`, computed with scaling so large or tiny entries do
/// not overflow or underflow.
pub fn frobenius_norm(m: &DenseMatrix) -> f64 {
    let scale = m.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = m.as_slice().iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * sum.sqrt()
}

/// Fills the strict lower triangle with conjugates of the upper triangle and
/// zeroes the imaginary part of the diagonal. The result is exactly
/// Hermitian. Only the upper triangle of `x` is read.
pub fn hermitian_mirror(x: &DenseMatrix) -> DenseMatrix {
    let mut out = x.clone();
    mirror_in_place(&Float, &mut out);
    out
}

pub(crate) fn mirror_in_place<A: Arith>(ctx: &A, x: &mut Matrix<A::Elem>) {
    let n = x.rows();
    for i in 0..n {
        x[(i, i)] = ctx.re_only(x[(i, i)]);
        for j in i + 1..n {
            x[(j, i)] = ctx.conj(x[(i, j)]);
        }
    }
}

/// Checks `|a_ij - conj(a_ji)| <= tol * max|a|` and a near-real diagonal.
pub(crate) fn check_hermitian<A: Arith>(ctx: &A, a: &Matrix<A::Elem>, rel_tol: f64) -> Result<()> {
    let n = a.require_square()?;
    let scale = a.as_slice().iter().map(|&z| ctx.abs(z)).fold(0.0, f64::max);
    let tol = rel_tol * scale;
    for i in 0..n {
        for j in i..n {
            let d = ctx.to_c64(a[(i, j)]) - ctx.to_c64(a[(j, i)]).conj();
            if d.norm() > tol || d.is_nan() {
                return Err(Error::NotHermitian {
                    row: i + 1,
                    col: j + 1,
                });
            }
        }
    }
    Ok(())
}
