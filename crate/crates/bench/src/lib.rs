//! Shared fixtures for the criterion benches.

use cholinv_core::{random_hermitian_pd, DenseMatrix, Prng};

pub const SIZES: [usize; 3] = [16, 64, 128];

pub fn pd_matrix(n: usize) -> DenseMatrix {
    random_hermitian_pd(n, &mut Prng::stream(7, &[n as u64]), 0.1, None)
}
