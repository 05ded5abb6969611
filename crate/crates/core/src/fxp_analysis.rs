//! Fixed-point error sweep.
//!
//! Each trial draws a random Hermitian positive-definite matrix scaled into
//! the format's range, quantizes it, inverts it entirely in fixed point, and
//! compares the result with a double-precision inverse of the unquantized
//! matrix.
//!
//! The random stream of a trial depends only on `(seed, n, trial)`, so every
//! method and format in a sweep sees the same underlying matrices and the
//! results do not depend on execution order or thread count.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::arith::Arith;
use crate::error::{Error, Result};
use crate::fixed::{Fxp, QFormat};
use crate::inverse::{invert_eqsolve, invert_with, Flavor, InverseMethod};
use crate::matrix::{frobenius_norm, DenseMatrix};
use crate::rng::{random_hermitian_pd, Prng};

pub const ERROR_HEADER: &str =
    "n,method,int_bits,frac_bits,trials,failures,mean_rel_err,mean_residual";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub methods: Vec<InverseMethod>,
    pub formats: Vec<QFormat>,
    pub trials: usize,
    pub seed: u64,
    pub delta: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sizes: vec![8, 16, 32],
            methods: InverseMethod::ALL.to_vec(),
            formats: vec![QFormat::new(2, 13).expect("valid format")],
            trials: 100,
            seed: 42,
            delta: 0.1,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.sizes.iter().any(|&n| n < 2) {
            return bad("sizes must be at least 2");
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return bad("delta must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// `|X_fxp - X_ref|_F / |X_ref|_F`
    pub rel_err: f64,
    /// `|A X_fxp - I|_F`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialFailure {
    /// A pivot fell to zero (or below) in fixed point.
    Pivot(Error),
    /// Some intermediate left the representable range or divided by zero.
    Overflow {
        saturations: u64,
        zero_divisions: u64,
    },
}

/// One fixed-point inversion of a fresh random matrix drawn from `prng`.
pub fn run_trial(
    n: usize,
    method: InverseMethod,
    fmt: QFormat,
    delta: f64,
    prng: &mut Prng,
) -> std::result::Result<TrialOutcome, TrialFailure> {
    let a = random_hermitian_pd(n, prng, delta, Some(fmt));
    let reference = invert_eqsolve(&a, Flavor::Chol, None)
        .expect("ensemble matrices are positive definite in double precision");
    let ctx = Fxp::new(fmt);
    let aq = a.map(|z| ctx.from_c64(z));
    let xq = invert_with(&ctx, &aq, method).map_err(TrialFailure::Pivot)?;
    if !ctx.is_clean() {
        return Err(TrialFailure::Overflow {
            saturations: ctx.saturations(),
            zero_divisions: ctx.zero_divisions(),
        });
    }
    let x = xq.map(|z| ctx.to_c64(z));
    Ok(TrialOutcome {
        rel_err: x.rel_dist(&reference),
        residual: frobenius_norm(&a.matmul(&x).sub(&DenseMatrix::identity(n))),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub n: usize,
    pub method: InverseMethod,
    pub format: QFormat,
    pub trials: usize,
    pub failures: usize,
    /// Means over successful trials; `None` when every trial failed.
    pub mean_rel_err: Option<f64>,
    pub mean_residual: Option<f64>,
}

impl ErrorRow {
    pub fn to_csv_line(&self) -> String {
        let num = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.method,
            self.format.int_bits(),
            self.format.frac_bits(),
            self.trials,
            self.failures,
            num(self.mean_rel_err),
            num(self.mean_residual)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{ERROR_HEADER}").unwrap();
        for row in &self.rows {
            writeln!(out, "{}", row.to_csv_line()).unwrap();
        }
        out
    }

    pub fn find(&self, n: usize, method: InverseMethod, format: QFormat) -> Option<&ErrorRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.method == method && r.format == format)
    }
}

type Cell = (usize, InverseMethod, QFormat);

fn sorted_cells(config: &SweepConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &n in &config.sizes {
        for &m in &config.methods {
            for &f in &config.formats {
                cells.push((n, m, f));
            }
        }
    }
    cells.sort_unstable_by_key(|&(n, m, f)| (n, m, f.frac_bits(), f.int_bits()));
    cells.dedup();
    cells
}

/// Runs the full grid on the current rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<ErrorReport> {
    config.validate()?;
    let cells = sorted_cells(config);
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.trials).map(move |t| (c, t)))
        .collect();
    let outcomes: Vec<_> = tasks
        .par_iter()
        .map(|&(c, t)| {
            let (n, method, fmt) = cells[c];
            let mut prng = Prng::stream(config.seed, &[n as u64, t as u64]);
            run_trial(n, method, fmt, config.delta, &mut prng)
        })
        .collect();

    // Aggregate sequentially in task order so sums are reproducible.
    let rows = cells
        .iter()
        .zip(outcomes.chunks(config.trials))
        .map(|(&(n, method, format), chunk)| {
            let ok: Vec<&TrialOutcome> = chunk.iter().filter_map(|o| o.as_ref().ok()).collect();
            let mean = |f: fn(&TrialOutcome) -> f64| {
                (!ok.is_empty()).then(|| ok.iter().map(|o| f(o)).sum::<f64>() / ok.len() as f64)
            };
            ErrorRow {
                n,
                method,
                format,
                trials: config.trials,
                failures: chunk.len() - ok.len(),
                mean_rel_err: mean(|o| o.rel_err),
                mean_residual: mean(|o| o.residual),
            }
        })
        .collect();
    Ok(ErrorReport { rows })
}

/// [`run_sweep`] on a dedicated pool with `threads` workers.
pub fn run_sweep_with_threads(config: &SweepConfig, threads: usize) -> Result<ErrorReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    pool.install(|| run_sweep(config))
}
