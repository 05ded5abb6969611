//! Test-only oracles, independent of the library's factorization paths.

#![allow(dead_code)]

use cholinv_core::{DenseMatrix, C64};

/// Gauss-Jordan elimination with partial pivoting on `[A | I]`.
pub fn gauss_jordan_inverse(a: &DenseMatrix) -> Option<DenseMatrix> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut aug: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut row: Vec<C64> = (0..n).map(|j| a[(i, j)]).collect();
            row.extend((0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| aug[p][col].norm().total_cmp(&aug[q][col].norm()))?;
        if aug[pivot][col].norm() == 0.0 {
            return None;
        }
        aug.swap(col, pivot);
        let inv = C64::new(1.0, 0.0) / aug[col][col];
        for v in aug[col].iter_mut() {
            *v *= inv;
        }
        for row in 0..n {
            if row != col {
                let factor = aug[row][col];
                if factor != C64::new(0.0, 0.0) {
                    let pivot_row = aug[col].clone();
                    for (v, p) in aug[row].iter_mut().zip(pivot_row) {
                        *v -= factor * p;
                    }
                }
            }
        }
    }
    Some(DenseMatrix::from_fn(n, n, |i, j| aug[i][n + j]))
}

pub fn identity_residual(a: &DenseMatrix, x: &DenseMatrix) -> f64 {
    cholinv_core::frobenius_norm(&a.matmul(x).sub(&DenseMatrix::identity(a.rows())))
}
