//! Operation-count measurements and cubic fits.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::arith::{OpCounter, C64};
use crate::decompose::{cholesky_upper, ldl_upper};
use crate::error::Result;
use crate::inverse::{invert, Flavor, InverseMethod};
use crate::matrix::DenseMatrix;
use crate::rng::{random_hermitian_pd, Prng};
use crate::trisolve::{solve_lower, solve_upper};

pub const COUNTS_HEADER: &str = "method,n,cmul,cdiv,cadd,csqrt,mul_ops,fitted_c";

/// What to measure: a bare factorization or a full inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpCountTarget {
    Decompose(Flavor),
    Invert(InverseMethod),
}

impl OpCountTarget {
    pub fn name(self) -> &'static str {
        match self {
            OpCountTarget::Decompose(f) => f.name(),
            OpCountTarget::Invert(m) => m.name(),
        }
    }
}

impl fmt::Display for OpCountTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpCountTarget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Ok(f) = s.parse::<Flavor>() {
            return Ok(OpCountTarget::Decompose(f));
        }
        s.parse::<InverseMethod>().map(OpCountTarget::Invert)
    }
}

/// Runs `target` once on a random `n x n` positive-definite matrix with
/// counting arithmetic. Counts do not depend on the matrix values.
pub fn count_ops(target: OpCountTarget, n: usize, seed: u64) -> Result<OpCounter> {
    let a = random_hermitian_pd(n, &mut Prng::stream(seed, &[n as u64]), 0.1, None);
    let mut counter = OpCounter::new();
    match target {
        OpCountTarget::Decompose(Flavor::Chol) => {
            cholesky_upper(&a, Some(&mut counter))?;
        }
        OpCountTarget::Decompose(Flavor::Ldl) => {
            ldl_upper(&a, Some(&mut counter))?;
        }
        OpCountTarget::Invert(m) => {
            invert(&a, m, Some(&mut counter))?;
        }
    }
    Ok(counter)
}

/// Least-squares fit of `count = c n^3 + b n^2 + a n`, returning `c`.
///
/// With two distinct sizes the linear term is dropped; with fewer there is
/// nothing to fit and `None` is returned.
pub fn fit_cubic(points: &[(usize, u64)]) -> Option<f64> {
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let terms = distinct.len().min(3);
    if terms < 2 {
        return None;
    }
    // Scale n into (0, 1] so the normal equations stay well conditioned;
    // the n^3 coefficient of count / n_max^3 is c itself.
    let n_max = *distinct.last()? as f64;
    let basis = |n: usize| -> Vec<f64> {
        let t = n as f64 / n_max;
        (0..terms).map(|p| t.powi(3 - p as i32)).collect()
    };
    let mut gram = DenseMatrix::zeros(terms, terms);
    let mut rhs = vec![C64::new(0.0, 0.0); terms];
    for &(n, count) in points {
        let phi = basis(n);
        let y = count as f64 / n_max.powi(3);
        for i in 0..terms {
            rhs[i] += phi[i] * y;
            for j in 0..terms {
                gram[(i, j)] += phi[i] * phi[j];
            }
        }
    }
    let r = cholesky_upper(&gram, None).ok()?.r;
    let z = solve_lower(&r.conj_transpose(), &rhs).ok()?;
    let coef = solve_upper(&r, &z).ok()?;
    Some(coef[0].re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountsRow {
    pub target: OpCountTarget,
    pub n: usize,
    pub counts: OpCounter,
    /// Fitted over all sizes measured for this target; repeated on each row.
    pub fitted_c: Option<f64>,
}

impl CountsRow {
    pub fn to_csv_line(&self) -> String {
        let c = &self.counts;
        let fitted = self.fitted_c.map(|v| format!("{v:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.target,
            self.n,
            c.cmul,
            c.cdiv,
            c.cadd,
            c.csqrt,
            c.mul_ops(),
            fitted
        )
    }
}

/// Counts for every (target, size) pair, sorted by target then size, with a
/// fitted cubic coefficient per target.
pub fn count_table(
    targets: &[OpCountTarget],
    sizes: &[usize],
    seed: u64,
) -> Result<Vec<CountsRow>> {
    let mut targets = targets.to_vec();
    targets.sort_unstable();
    targets.dedup();
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut rows = Vec::with_capacity(targets.len() * sizes.len());
    for target in targets {
        let mut block = Vec::with_capacity(sizes.len());
        for &n in &sizes {
            block.push((n, count_ops(target, n, seed)?));
        }
        let points: Vec<(usize, u64)> = block.iter().map(|(n, c)| (*n, c.mul_ops())).collect();
        let fitted_c = fit_cubic(&points);
        rows.extend(block.into_iter().map(|(n, counts)| CountsRow {
            target,
            n,
            counts,
            fitted_c,
        }));
    }
    Ok(rows)
}

pub fn counts_csv(rows: &[CountsRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{COUNTS_HEADER}").unwrap();
    for row in rows {
        writeln!(out, "{}", row.to_csv_line()).unwrap();
    }
    out
}
