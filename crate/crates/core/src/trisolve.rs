//! Forward and backward substitution.
//!
//! Only the relevant triangle of the coefficient matrix is read; whatever is
//! stored in the other triangle is ignored.

use crate::arith::{Arith, Counting, Float, OpCounter, C64};
use crate::decompose::PIVOT_TOL;
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Matrix};

fn check_system<E: Copy>(m: &Matrix<E>, rhs_len: usize) -> Result<usize> {
    let n = m.require_square()?;
    if rhs_len != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs_len,
        });
    }
    Ok(n)
}

/// Index (1-based) of the first diagonal entry at or below the singularity
/// floor, if any.
fn singular_at<A: Arith>(ctx: &A, diag: impl Iterator<Item = A::Elem> + Clone) -> Option<usize> {
    let max = diag.clone().map(|z| ctx.abs(z)).fold(0.0, f64::max);
    let floor = PIVOT_TOL * max;
    diag.enumerate()
        .find(|&(_, z)| {
            let mag = ctx.abs(z);
            mag.is_nan() || mag <= floor || max == 0.0
        })
        .map(|(i, _)| i + 1)
}

fn check_diag<A: Arith>(ctx: &A, m: &Matrix<A::Elem>) -> Result<()> {
    match singular_at(ctx, (0..m.rows()).map(|i| m[(i, i)])) {
        Some(index) => Err(Error::SingularDiagonal { index }),
        None => Ok(()),
    }
}

/// Forward substitution for `L b = y`, top-down.
pub fn solve_lower_with<A: Arith>(
    ctx: &A,
    l: &Matrix<A::Elem>,
    y: &[A::Elem],
) -> Result<Vec<A::Elem>> {
    let n = check_system(l, y.len())?;
    check_diag(ctx, l)?;
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = y[i];
        for (k, &bk) in b.iter().enumerate() {
            acc = ctx.sub(acc, ctx.mul(l[(i, k)], bk));
        }
        b.push(ctx.div(acc, l[(i, i)]));
    }
    Ok(b)
}

/// Backward substitution for `R x = b`, bottom-up.
pub fn solve_upper_with<A: Arith>(
    ctx: &A,
    r: &Matrix<A::Elem>,
    b: &[A::Elem],
) -> Result<Vec<A::Elem>> {
    let n = check_system(r, b.len())?;
    check_diag(ctx, r)?;
    let mut x = vec![ctx.zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for k in i + 1..n {
            acc = ctx.sub(acc, ctx.mul(r[(i, k)], x[k]));
        }
        x[i] = ctx.div(acc, r[(i, i)]);
    }
    Ok(x)
}

/// Solves `(R^* diag(d)) b = y` for unit upper `R`: a unit-lower forward
/// pass against `R^*` followed by one division per row by `d_i`.
pub fn solve_ldl_lower_with<A: Arith>(
    ctx: &A,
    r: &Matrix<A::Elem>,
    d: &[A::Elem],
    y: &[A::Elem],
) -> Result<Vec<A::Elem>> {
    let n = check_system(r, y.len())?;
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: d.len(),
        });
    }
    if let Some(pivot) = singular_at(ctx, d.iter().copied()) {
        return Err(Error::ZeroPivot { pivot });
    }
    // u = diag(d) b solves R^* u = y with unit diagonal
    let mut u: Vec<A::Elem> = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = y[i];
        for (k, &uk) in u.iter().enumerate() {
            acc = ctx.sub(acc, ctx.mul(ctx.conj(r[(k, i)]), uk));
        }
        u.push(acc);
    }
    Ok(u.into_iter()
        .zip(d)
        .map(|(ui, &di)| ctx.div(ui, di))
        .collect())
}

/// `R^{-1}` for upper-triangular `R`, one column at a time from `R m_j = e_j`.
///
/// Entries of `m_j` below row `j` are known zeros and are never solved for;
/// rows `j, j-1, ..., 0` are found by back substitution. Each row's
/// substitution runs over the full remainder of the row of `R`, so the cost
/// is that of a general back substitution restricted to the unknown rows.
pub fn triangular_inverse_with<A: Arith>(ctx: &A, r: &Matrix<A::Elem>) -> Result<Matrix<A::Elem>> {
    let n = r.require_square()?;
    check_diag(ctx, r)?;
    let mut m = Matrix::filled(n, n, ctx.zero());
    for j in 0..n {
        for k in (0..=j).rev() {
            let mut acc = if k == j { ctx.one() } else { ctx.zero() };
            for p in k + 1..n {
                acc = ctx.sub(acc, ctx.mul(r[(k, p)], m[(p, j)]));
            }
            m[(k, j)] = ctx.div(acc, r[(k, k)]);
        }
    }
    Ok(m)
}

pub fn solve_lower(l: &DenseMatrix, y: &[C64]) -> Result<Vec<C64>> {
    solve_lower_with(&Float, l, y)
}

pub fn solve_upper(r: &DenseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    solve_upper_with(&Float, r, b)
}

/// `d` holds the real LDL pivots.
pub fn solve_ldl_lower(r: &DenseMatrix, d: &[f64], y: &[C64]) -> Result<Vec<C64>> {
    let d: Vec<C64> = d.iter().map(|&x| C64::new(x, 0.0)).collect();
    solve_ldl_lower_with(&Float, r, &d, y)
}

pub fn triangular_inverse(r: &DenseMatrix, counter: Option<&mut OpCounter>) -> Result<DenseMatrix> {
    match counter {
        None => triangular_inverse_with(&Float, r),
        Some(c) => {
            let ctx = Counting::new();
            let out = triangular_inverse_with(&ctx, r);
            *c += ctx.counts();
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{cholesky_upper, ldl_upper};
    use crate::matrix::frobenius_norm;
    use crate::rng::{random_hermitian_pd, Prng};
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn col(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c(x)).collect()
    }

    fn apply(m: &DenseMatrix, x: &[C64]) -> Vec<C64> {
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)] * x[j]).sum())
            .collect()
    }

    fn norm(v: &[C64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn lower_examples() {
        let y = vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5)];
        assert_eq!(solve_lower(&DenseMatrix::identity(2), &y).unwrap(), y);
        let l = DenseMatrix::from_real_rows(&[&[2.0, 0.0], &[1.0, 1.0]]);
        assert_eq!(
            solve_lower(&l, &col(&[4.0, 3.0])).unwrap(),
            col(&[2.0, 1.0])
        );
        let s = DenseMatrix::from_real_rows(&[&[2.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(
            solve_lower(&s, &col(&[1.0, 1.0])),
            Err(Error::SingularDiagonal { index: 2 })
        );
        assert!(matches!(
            solve_lower(&l, &col(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn upper_examples() {
        let b = vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5)];
        assert_eq!(solve_upper(&DenseMatrix::identity(2), &b).unwrap(), b);
        let r = DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 2.0]]);
        assert_eq!(
            solve_upper(&r, &col(&[3.0, 4.0])).unwrap(),
            col(&[0.5, 2.0])
        );
        let d = DenseMatrix::from_diag(&[2.0, -4.0, 0.5]);
        assert_eq!(
            solve_upper(&d, &col(&[1.0, 1.0, 1.0])).unwrap(),
            col(&[0.5, -0.25, 2.0])
        );
        let z = DenseMatrix::from_diag(&[0.0, 1.0]);
        assert_eq!(
            solve_upper(&z, &col(&[1.0, 1.0])),
            Err(Error::SingularDiagonal { index: 1 })
        );
    }

    #[test]
    fn ldl_lower_examples() {
        let y = vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5)];
        assert_eq!(
            solve_ldl_lower(&DenseMatrix::identity(2), &[1.0, 1.0], &y).unwrap(),
            y
        );
        let r = DenseMatrix::from_real_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        let b = solve_ldl_lower(&r, &[2.0, 1.5], &col(&[2.0, 2.5])).unwrap();
        assert_eq!(b, col(&[1.0, 1.0]));
        assert_eq!(
            solve_ldl_lower(&r, &[2.0, 0.0], &col(&[2.0, 2.5])),
            Err(Error::ZeroPivot { pivot: 2 })
        );
    }

    #[test]
    fn triangular_inverse_examples() {
        let eye = DenseMatrix::identity(3);
        assert_eq!(triangular_inverse(&eye, None).unwrap(), eye);
        assert_eq!(
            triangular_inverse(&DenseMatrix::from_diag(&[2.0, 4.0]), None).unwrap(),
            DenseMatrix::from_diag(&[0.5, 0.25])
        );
        let r = DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let m = triangular_inverse(&r, None).unwrap();
        assert_eq!(
            m,
            DenseMatrix::from_real_rows(&[&[0.5, -0.25], &[0.0, 0.5]])
        );
        assert!(frobenius_norm(&r.matmul(&m).sub(&DenseMatrix::identity(2))) <= 1e-14);
    }

    #[test]
    fn triangular_inverse_structure() {
        let a = random_hermitian_pd(24, &mut Prng::new(8), 0.1, None);
        let r = cholesky_upper(&a, None).unwrap().r;
        let m = triangular_inverse(&r, None).unwrap();
        // structural zeros, bitwise
        assert!(m.is_upper_triangular());
        for i in 0..24 {
            assert_eq!(m[(i, i)], c(1.0 / r[(i, i)].re));
        }
        let res = frobenius_norm(&r.matmul(&m).sub(&DenseMatrix::identity(24)));
        assert!(res <= 1e-12, "res={res}");
    }

    /// Op tallies from walking the substitution loops.
    fn enumerate_substitution(n: usize) -> (u64, u64) {
        let (mut mul, mut div) = (0u64, 0u64);
        for i in 0..n {
            for _k in 0..i {
                mul += 1;
            }
            div += 1;
        }
        (mul, div)
    }

    #[test]
    fn substitution_op_counts() {
        for n in [1usize, 2, 7, 30] {
            let a = random_hermitian_pd(n, &mut Prng::new(n as u64), 0.1, None);
            let r = cholesky_upper(&a, None).unwrap().r;
            let l = r.conj_transpose();
            let y: Vec<C64> = (0..n).map(|i| C64::new(i as f64 + 1.0, -0.5)).collect();
            let (mul, div) = enumerate_substitution(n);
            assert_eq!(mul, (n * (n - 1) / 2) as u64);

            let ctx = Counting::new();
            solve_lower_with(&ctx, &l, &y).unwrap();
            assert_eq!((ctx.counts().cmul, ctx.counts().cdiv), (mul, div));

            let ctx = Counting::new();
            solve_upper_with(&ctx, &r, &y).unwrap();
            assert_eq!((ctx.counts().cmul, ctx.counts().cdiv), (mul, div));

            let f = ldl_upper(&a, None).unwrap();
            let ctx = Counting::new();
            solve_ldl_lower_with(&ctx, &f.r, &f.d, &y).unwrap();
            assert_eq!((ctx.counts().cmul, ctx.counts().cdiv), (mul, div));
        }
    }

    #[test]
    fn triangular_inverse_op_count() {
        // rows k <= j of column j, each with n-1-k multiplies and one divide
        for n in [1usize, 4, 11] {
            let r = cholesky_upper(&random_hermitian_pd(n, &mut Prng::new(2), 0.1, None), None)
                .unwrap()
                .r;
            let mut counter = OpCounter::new();
            triangular_inverse(&r, Some(&mut counter)).unwrap();
            let mut mul = 0;
            let mut div = 0;
            for j in 0..n {
                for k in 0..=j {
                    mul += (n - 1 - k) as u64;
                    div += 1;
                }
            }
            assert_eq!((counter.cmul, counter.cdiv), (mul, div));
        }
    }

    fn random_triangle(n: usize, seed: u64) -> DenseMatrix {
        let a = random_hermitian_pd(n, &mut Prng::new(seed), 0.5, None);
        cholesky_upper(&a, None).unwrap().r
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn residuals_are_small(n in 1usize..=128, seed in any::<u64>()) {
            let r = random_triangle(n, seed);
            let l = r.conj_transpose();
            let mut p = Prng::new(seed ^ 1);
            let y: Vec<C64> = (0..n).map(|_| C64::new(p.uniform(-1.0, 1.0), p.uniform(-1.0, 1.0))).collect();
            let b = solve_lower(&l, &y).unwrap();
            // condition factor: |R| |R^-1| bounded by the ensemble's delta
            let cond = frobenius_norm(&r) * frobenius_norm(&triangular_inverse(&r, None).unwrap());
            prop_assert!(diff(&apply(&l, &b), &y) <= 1e-12 * norm(&y) * cond);

            // R x round trip
            let x = y.clone();
            let back = solve_upper(&r, &apply(&r, &x)).unwrap();
            prop_assert!(diff(&back, &x) <= 1e-12 * norm(&x));
        }
    }
}
