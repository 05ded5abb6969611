//! Cholesky (`A = R^* R`) and LDL (`A = R^* D R`) factorizations with an
//! upper-triangular factor, computed row by row so they can overwrite the
//! input storage.

use crate::arith::{Arith, Counting, Float, OpCounter, C64};
use crate::error::{Error, Result};
use crate::matrix::{check_hermitian, DenseMatrix, Matrix};

/// Relative tolerance for the Hermitian input check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Pivots at or below `PIVOT_TOL * max|a_jj|` are rejected.
pub const PIVOT_TOL: f64 = 1e-13;

/// Upper-triangular Cholesky factor with a real positive diagonal and exact
/// zeros below it.
#[derive(Debug, Clone, PartialEq)]
pub struct CholFactor<E> {
    pub r: Matrix<E>,
}

/// Unit upper-triangular factor `r` and real pivots `d` stored as scalars
/// with zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct LdlFactor<E> {
    pub r: Matrix<E>,
    pub d: Vec<E>,
}

pub type CholResult = CholFactor<C64>;
pub type LdlResult = LdlFactor<C64>;

impl LdlResult {
    pub fn d_real(&self) -> Vec<f64> {
        self.d.iter().map(|z| z.re).collect()
    }
}

fn pivot_floor<A: Arith>(ctx: &A, a: &Matrix<A::Elem>) -> f64 {
    let max_diag = (0..a.rows())
        .map(|i| ctx.abs(a[(i, i)]))
        .fold(0.0, f64::max);
    PIVOT_TOL * max_diag
}

fn zero_strict_lower<A: Arith>(ctx: &A, a: &mut Matrix<A::Elem>) {
    for i in 1..a.rows() {
        for j in 0..i {
            a[(i, j)] = ctx.zero();
        }
    }
}

/// Overwrites `a` with its Cholesky factor `R`.
///
/// On error the contents of `a` are unspecified.
pub fn cholesky_in_place<A: Arith>(ctx: &A, a: &mut Matrix<A::Elem>) -> Result<()> {
    check_hermitian(ctx, a, HERMITIAN_TOL)?;
    let n = a.rows();
    let eps = pivot_floor(ctx, a);
    for i in 0..n {
        let mut acc = a[(i, i)];
        for k in 0..i {
            let rki = a[(k, i)];
            acc = ctx.sub(acc, ctx.mul(ctx.conj(rki), rki));
        }
        let pivot = ctx.re(acc);
        if pivot.is_nan() || pivot <= eps {
            return Err(Error::NotPositiveDefinite { pivot: i + 1 });
        }
        let rii = ctx.sqrt_re(acc);
        a[(i, i)] = rii;
        for j in i + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..i {
                acc = ctx.sub(acc, ctx.mul(ctx.conj(a[(k, i)]), a[(k, j)]));
            }
            a[(i, j)] = ctx.div(acc, rii);
        }
    }
    zero_strict_lower(ctx, a);
    Ok(())
}

pub fn cholesky_with<A: Arith>(ctx: &A, a: &Matrix<A::Elem>) -> Result<CholFactor<A::Elem>> {
    let mut r = a.clone();
    cholesky_in_place(ctx, &mut r)?;
    Ok(CholFactor { r })
}

/// Overwrites `a` with the unit upper factor `R` and returns the pivots.
///
/// The products `conj(r_ki) d_k` are formed once per row, which keeps the
/// multiply count at the Cholesky level.
pub fn ldl_in_place<A: Arith>(ctx: &A, a: &mut Matrix<A::Elem>) -> Result<Vec<A::Elem>> {
    check_hermitian(ctx, a, HERMITIAN_TOL)?;
    let n = a.rows();
    let eps = pivot_floor(ctx, a);
    let mut d = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        w.clear();
        w.extend((0..i).map(|k| ctx.mul(ctx.conj(a[(k, i)]), d[k])));
        let mut acc = a[(i, i)];
        for (k, &wk) in w.iter().enumerate() {
            acc = ctx.sub(acc, ctx.mul(wk, a[(k, i)]));
        }
        let di = ctx.re_only(acc);
        let mag = ctx.abs(di);
        if mag.is_nan() || mag <= eps {
            return Err(Error::ZeroPivot { pivot: i + 1 });
        }
        d.push(di);
        a[(i, i)] = ctx.one();
        for j in i + 1..n {
            let mut acc = a[(i, j)];
            for (k, &wk) in w.iter().enumerate() {
                acc = ctx.sub(acc, ctx.mul(wk, a[(k, j)]));
            }
            a[(i, j)] = ctx.div(acc, di);
        }
    }
    zero_strict_lower(ctx, a);
    Ok(d)
}

pub fn ldl_with<A: Arith>(ctx: &A, a: &Matrix<A::Elem>) -> Result<LdlFactor<A::Elem>> {
    let mut r = a.clone();
    let d = ldl_in_place(ctx, &mut r)?;
    Ok(LdlFactor { r, d })
}

/// Cholesky factorization `A = R^* R` of a Hermitian positive-definite
/// matrix. When `counter` is given, every scalar operation is added to it.
pub fn cholesky_upper(a: &DenseMatrix, counter: Option<&mut OpCounter>) -> Result<CholResult> {
    match counter {
        None => cholesky_with(&Float, a),
        Some(c) => {
            let ctx = Counting::new();
            let out = cholesky_with(&ctx, a);
            *c += ctx.counts();
            out
        }
    }
}

/// Square-root-free factorization `A = R^* diag(d) R` with unit upper `R`.
pub fn ldl_upper(a: &DenseMatrix, counter: Option<&mut OpCounter>) -> Result<LdlResult> {
    match counter {
        None => ldl_with(&Float, a),
        Some(c) => {
            let ctx = Counting::new();
            let out = ldl_with(&ctx, a);
            *c += ctx.counts();
            out
        }
    }
}
