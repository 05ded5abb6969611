//! Inversion of Hermitian positive-definite matrices from a Cholesky or LDL
//! factor.
//!
//! Three families are provided:
//!
//! * **equation solving**: factor once, then for every column solve
//!   `R^* b = e_j` (or `R^* D b = e_j`) followed by `R x_j = b`;
//! * **triangular matrix operations**: `M = R^{-1}` followed by `X = M M^*`;
//! * **shortcut solve**: skip the first triangular solve altogether. The
//!   solution `B` of `R^* B = I` is lower triangular with diagonal
//!   `1 / r_jj` (or `1 / d_j` for LDL), and backward substitution for the
//!   upper triangle of `X` only ever reads the upper triangle of `B`. That
//!   triangle is therefore known in advance and is supplied as a diagonal
//!   vector ([`ShortcutDiagonal`]).
//!
//! All Hermitian methods compute only the upper triangle of `X` and fill the
//! rest by conjugate mirroring, so their outputs are exactly Hermitian.
//!
//! Columns are produced in the order `n-1, ..., 0`. When column `j` is
//! solved, the entries `x_mj` with `m > j` lie in the strict lower triangle
//! and are read as `conj(x_jm)` from columns that are already complete.

use std::fmt;
use std::str::FromStr;

use crate::arith::{Arith, Counting, Float, OpCounter, C64};
use crate::decompose::{cholesky_with, ldl_with, CholFactor, LdlFactor};
use crate::error::{Error, Result};
use crate::matrix::{mirror_in_place, DenseMatrix, Matrix};
use crate::trisolve::triangular_inverse_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Chol,
    Ldl,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Chol => "chol",
            Flavor::Ldl => "ldl",
        }
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "chol" => Ok(Flavor::Chol),
            "ldl" => Ok(Flavor::Ldl),
            _ => Err(format!(
                "unknown factorization {s:?} (expected chol or ldl)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InverseMethod {
    EqSolveChol,
    EqSolveLdl,
    TriMat,
    ProposedChol,
    ProposedLdl,
}

impl InverseMethod {
    pub const ALL: [InverseMethod; 5] = [
        InverseMethod::EqSolveChol,
        InverseMethod::EqSolveLdl,
        InverseMethod::TriMat,
        InverseMethod::ProposedChol,
        InverseMethod::ProposedLdl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InverseMethod::EqSolveChol => "eqsolve-chol",
            InverseMethod::EqSolveLdl => "eqsolve-ldl",
            InverseMethod::TriMat => "trimat",
            InverseMethod::ProposedChol => "proposed-chol",
            InverseMethod::ProposedLdl => "proposed-ldl",
        }
    }

    pub fn flavor(self) -> Flavor {
        match self {
            InverseMethod::EqSolveLdl | InverseMethod::ProposedLdl => Flavor::Ldl,
            _ => Flavor::Chol,
        }
    }
}

impl fmt::Display for InverseMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InverseMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        InverseMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = InverseMethod::ALL.iter().map(|m| m.name()).collect();
                format!(
                    "unknown method {s:?} (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Either factorization, borrowed.
#[derive(Debug, Clone, Copy)]
pub enum FactorRef<'a, E> {
    Chol(&'a CholFactor<E>),
    Ldl(&'a LdlFactor<E>),
}

impl<'a, E> From<&'a CholFactor<E>> for FactorRef<'a, E> {
    fn from(f: &'a CholFactor<E>) -> Self {
        FactorRef::Chol(f)
    }
}

impl<'a, E> From<&'a LdlFactor<E>> for FactorRef<'a, E> {
    fn from(f: &'a LdlFactor<E>) -> Self {
        FactorRef::Ldl(f)
    }
}

/// Diagonal of the implicit matrix `S` (Cholesky: `1 / r_jj`) or `S~`
/// (LDL: `1 / d_j`). Its off-diagonal entries are zero and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortcutDiagonal<E = C64> {
    pub values: Vec<E>,
}

impl ShortcutDiagonal<C64> {
    pub fn values_re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

pub fn build_shortcut_with<A: Arith>(
    ctx: &A,
    factor: FactorRef<'_, A::Elem>,
) -> ShortcutDiagonal<A::Elem> {
    let values = match factor {
        FactorRef::Chol(f) => (0..f.r.rows())
            .map(|i| ctx.div(ctx.one(), f.r[(i, i)]))
            .collect(),
        FactorRef::Ldl(f) => f.d.iter().map(|&d| ctx.div(ctx.one(), d)).collect(),
    };
    ShortcutDiagonal { values }
}

pub fn build_shortcut<'a>(factor: impl Into<FactorRef<'a, C64>>) -> ShortcutDiagonal {
    build_shortcut_with(&Float, factor.into())
}

enum Factor<E> {
    Chol(CholFactor<E>),
    Ldl(LdlFactor<E>),
}

impl<E> Factor<E> {
    fn as_ref(&self) -> FactorRef<'_, E> {
        match self {
            Factor::Chol(f) => FactorRef::Chol(f),
            Factor::Ldl(f) => FactorRef::Ldl(f),
        }
    }

    fn r(&self) -> &Matrix<E> {
        match self {
            Factor::Chol(f) => &f.r,
            Factor::Ldl(f) => &f.r,
        }
    }

    fn unit(&self) -> bool {
        matches!(self, Factor::Ldl(_))
    }
}

fn factor<A: Arith>(ctx: &A, a: &Matrix<A::Elem>, flavor: Flavor) -> Result<Factor<A::Elem>> {
    Ok(match flavor {
        Flavor::Chol => Factor::Chol(cholesky_with(ctx, a)?),
        Flavor::Ldl => Factor::Ldl(ldl_with(ctx, a)?),
    })
}

/// Backward substitution for rows `j, j-1, ..., 0` of `R x_j = rhs`, writing
/// into column `j` of `x`. Entries below row `j` are read through the
/// conjugate mirror from columns `> j`, which must already be complete.
fn back_substitute_column<A: Arith>(
    ctx: &A,
    r: &Matrix<A::Elem>,
    unit: bool,
    x: &mut Matrix<A::Elem>,
    j: usize,
    rhs: impl Fn(usize) -> A::Elem,
) {
    let n = r.rows();
    for k in (0..=j).rev() {
        let mut acc = rhs(k);
        for m in k + 1..n {
            let xm = if m <= j {
                x[(m, j)]
            } else {
                ctx.conj(x[(j, m)])
            };
            acc = ctx.sub(acc, ctx.mul(r[(k, m)], xm));
        }
        x[(k, j)] = if unit { acc } else { ctx.div(acc, r[(k, k)]) };
    }
}

/// Equation-solving inverse.
///
/// Per column `j` the first solve produces the rows `k >= j` of `b` (rows
/// above `j` are known zeros); the second solve produces the upper part of
/// `x_j` through [`back_substitute_column`].
pub fn invert_eqsolve_with<A: Arith>(
    ctx: &A,
    a: &Matrix<A::Elem>,
    flavor: Flavor,
) -> Result<Matrix<A::Elem>> {
    let f = factor(ctx, a, flavor)?;
    let r = f.r();
    let n = r.rows();
    let mut x = Matrix::filled(n, n, ctx.zero());
    let mut b = vec![ctx.zero(); n];
    for j in (0..n).rev() {
        b.fill(ctx.zero());
        for k in j..n {
            let mut acc = if k == j { ctx.one() } else { ctx.zero() };
            for m in 0..k {
                acc = ctx.sub(acc, ctx.mul(ctx.conj(r[(m, k)]), b[m]));
            }
            b[k] = match &f {
                Factor::Chol(_) => ctx.div(acc, r[(k, k)]),
                // unit forward pass; scaled by 1/d below
                Factor::Ldl(_) => acc,
            };
        }
        if let Factor::Ldl(l) = &f {
            for (bk, &dk) in b.iter_mut().zip(&l.d).skip(j) {
                *bk = ctx.div(*bk, dk);
            }
        }
        back_substitute_column(ctx, r, f.unit(), &mut x, j, |k| b[k]);
    }
    mirror_in_place(ctx, &mut x);
    Ok(x)
}

/// `X = R^{-1} R^{-*}`: triangular inverse, then the product `M M^*`
/// restricted to the upper triangle of `X`.
pub fn invert_trimat_with<A: Arith>(ctx: &A, a: &Matrix<A::Elem>) -> Result<Matrix<A::Elem>> {
    let r = cholesky_with(ctx, a)?.r;
    let m = triangular_inverse_with(ctx, &r)?;
    let n = r.rows();
    let mut x = Matrix::filled(n, n, ctx.zero());
    for i in 0..n {
        for j in i..n {
            // m_ik = 0 for k < i and m_jk = 0 for k < j
            let mut acc = ctx.zero();
            for k in j..n {
                acc = ctx.add(acc, ctx.mul(m[(i, k)], ctx.conj(m[(j, k)])));
            }
            x[(i, j)] = acc;
        }
    }
    mirror_in_place(ctx, &mut x);
    Ok(x)
}

/// Shortcut inverse: solves `R x_j = s_j` directly, where `s_j` is column
/// `j` of the implicit diagonal matrix. The solve against `R^*` is never
/// performed.
pub fn invert_proposed_with<A: Arith>(
    ctx: &A,
    a: &Matrix<A::Elem>,
    flavor: Flavor,
) -> Result<Matrix<A::Elem>> {
    let f = factor(ctx, a, flavor)?;
    let s = build_shortcut_with(ctx, f.as_ref());
    let r = f.r();
    let n = r.rows();
    let mut x = Matrix::filled(n, n, ctx.zero());
    let zero = ctx.zero();
    for j in (0..n).rev() {
        let sj = s.values[j];
        back_substitute_column(
            ctx,
            r,
            f.unit(),
            &mut x,
            j,
            |k| if k == j { sj } else { zero },
        );
    }
    mirror_in_place(ctx, &mut x);
    Ok(x)
}

pub fn invert_with<A: Arith>(
    ctx: &A,
    a: &Matrix<A::Elem>,
    method: InverseMethod,
) -> Result<Matrix<A::Elem>> {
    match method {
        InverseMethod::EqSolveChol => invert_eqsolve_with(ctx, a, Flavor::Chol),
        InverseMethod::EqSolveLdl => invert_eqsolve_with(ctx, a, Flavor::Ldl),
        InverseMethod::TriMat => invert_trimat_with(ctx, a),
        InverseMethod::ProposedChol => invert_proposed_with(ctx, a, Flavor::Chol),
        InverseMethod::ProposedLdl => invert_proposed_with(ctx, a, Flavor::Ldl),
    }
}

/// Inverse of an arbitrary square `D` through the Hermitian matrix
/// `A = D D^*`: `D^{-1} = D^* A^{-1}`.
pub fn invert_nonhermitian_with<A: Arith>(
    ctx: &A,
    d: &Matrix<A::Elem>,
    method: InverseMethod,
) -> Result<Matrix<A::Elem>> {
    let n = d.require_square()?;
    let mut a = Matrix::filled(n, n, ctx.zero());
    for i in 0..n {
        for j in i..n {
            let mut acc = ctx.zero();
            for k in 0..n {
                acc = ctx.add(acc, ctx.mul(d[(i, k)], ctx.conj(d[(j, k)])));
            }
            a[(i, j)] = acc;
        }
    }
    mirror_in_place(ctx, &mut a);
    let x = invert_with(ctx, &a, method).map_err(|e| match e {
        Error::NotPositiveDefinite { .. }
        | Error::ZeroPivot { .. }
        | Error::SingularDiagonal { .. } => Error::Singular,
        other => other,
    })?;
    // D^* X
    Ok(Matrix::from_fn(n, n, |i, j| {
        let mut acc = ctx.zero();
        for k in 0..n {
            acc = ctx.add(acc, ctx.mul(ctx.conj(d[(k, i)]), x[(k, j)]));
        }
        acc
    }))
}

fn counted<T>(
    counter: Option<&mut OpCounter>,
    plain: impl FnOnce(&Float) -> T,
    counting: impl FnOnce(&Counting) -> T,
) -> T {
    match counter {
        None => plain(&Float),
        Some(c) => {
            let ctx = Counting::new();
            let out = counting(&ctx);
            *c += ctx.counts();
            out
        }
    }
}

pub fn invert_eqsolve(
    a: &DenseMatrix,
    flavor: Flavor,
    counter: Option<&mut OpCounter>,
) -> Result<DenseMatrix> {
    counted(
        counter,
        |c| invert_eqsolve_with(c, a, flavor),
        |c| invert_eqsolve_with(c, a, flavor),
    )
}

pub fn invert_trimat(a: &DenseMatrix, counter: Option<&mut OpCounter>) -> Result<DenseMatrix> {
    counted(
        counter,
        |c| invert_trimat_with(c, a),
        |c| invert_trimat_with(c, a),
    )
}

pub fn invert_proposed(
    a: &DenseMatrix,
    flavor: Flavor,
    counter: Option<&mut OpCounter>,
) -> Result<DenseMatrix> {
    counted(
        counter,
        |c| invert_proposed_with(c, a, flavor),
        |c| invert_proposed_with(c, a, flavor),
    )
}

/// Hermitian positive-definite inverse with the chosen method.
pub fn invert(
    a: &DenseMatrix,
    method: InverseMethod,
    counter: Option<&mut OpCounter>,
) -> Result<DenseMatrix> {
    counted(
        counter,
        |c| invert_with(c, a, method),
        |c| invert_with(c, a, method),
    )
}

pub fn invert_nonhermitian(
    d: &DenseMatrix,
    method: InverseMethod,
    counter: Option<&mut OpCounter>,
) -> Result<DenseMatrix> {
    counted(
        counter,
        |c| invert_nonhermitian_with(c, d, method),
        |c| invert_nonhermitian_with(c, d, method),
    )
}
