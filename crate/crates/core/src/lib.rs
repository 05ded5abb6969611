//! Dense complex Hermitian matrix inversion built on Cholesky and LDL
//! factorizations.
//!
//! Every kernel is written once against the [`Arith`] trait and can be run
//! with plain `f64` complex arithmetic ([`Float`]), with operation counting
//! ([`Counting`]), or under simulated Q-format fixed-point arithmetic
//! ([`Fxp`]). The same code path therefore produces the numerical result,
//! its operation count, and its fixed-point error.
//!
//! ```
//! use cholinv_core::{invert, DenseMatrix, InverseMethod, C64};
//!
//! let a = DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
//! let x = invert(&a, InverseMethod::ProposedChol, None).unwrap();
//! assert!((x[(0, 0)] - C64::new(2.0 / 3.0, 0.0)).norm() < 1e-15);
//! ```

pub mod arith;
pub mod decompose;
mod error;
pub mod fixed;
pub mod fxp_analysis;
pub mod inverse;
pub mod matrix;
pub mod opcount;
pub mod rng;
pub mod trisolve;

pub use arith::{Arith, Counting, Float, OpCounter, C64};
pub use decompose::{cholesky_upper, ldl_upper, CholFactor, CholResult, LdlFactor, LdlResult};
pub use error::{Error, Result};
pub use fixed::{fxp_mul, quantize, Fxp, FxpComplex, QFormat};
pub use fxp_analysis::{
    run_sweep, run_sweep_with_threads, run_trial, ErrorReport, ErrorRow, SweepConfig, TrialFailure,
    TrialOutcome,
};
pub use inverse::{
    build_shortcut, invert, invert_eqsolve, invert_nonhermitian, invert_proposed, invert_trimat,
    Flavor, InverseMethod, ShortcutDiagonal,
};
pub use matrix::{frobenius_norm, hermitian_mirror, DenseMatrix, Matrix};
pub use opcount::{count_ops, count_table, counts_csv, fit_cubic, CountsRow, OpCountTarget};
pub use rng::{random_hermitian_pd, Prng};
