//! Seeded random streams and the Hermitian positive-definite test ensemble.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::C64;
use crate::fixed::QFormat;
use crate::matrix::DenseMatrix;

/// Deterministic generator: ChaCha8 keyed by a 64-bit seed.
///
/// Independent streams are derived with [`Prng::stream`], which xors the
/// base seed with a SplitMix64 hash of the stream key, so a trial's draws do
/// not depend on which other trials ran or in what order.
#[derive(Debug, Clone)]
pub struct Prng {
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for `key` (e.g. `[cell, trial]`) under base `seed`.
    pub fn stream(seed: u64, key: &[u64]) -> Self {
        let h = key
            .iter()
            .fold(0x6a09_e667_f3bc_c908u64, |acc, &k| splitmix64(acc ^ k));
        Self::new(seed ^ h)
    }

    /// Uniform draw on `[lo, hi]`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.inner.random_range(lo..=hi)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.random()
    }
}

/// Draws `A = G G^* / n + delta I` with `G` entries uniform on `[-1, 1]` in
/// both real and imaginary parts.
///
/// With a `target` format the matrix is scaled down (never up) so every
/// entry has magnitude at most `0.9 * target.max_value()`. The result is
/// exactly Hermitian with a real diagonal.
pub fn random_hermitian_pd(
    n: usize,
    prng: &mut Prng,
    delta: f64,
    target: Option<QFormat>,
) -> DenseMatrix {
    assert!(n >= 1, "n must be positive");
    assert!(delta > 0.0, "delta must be positive");
    let g = DenseMatrix::from_fn(n, n, |_, _| {
        let re = prng.uniform(-1.0, 1.0);
        let im = prng.uniform(-1.0, 1.0);
        C64::new(re, im)
    });
    let inv_n = 1.0 / n as f64;
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let diag: f64 = g.row(i).iter().map(|z| z.norm_sqr()).sum();
        a[(i, i)] = C64::new(diag * inv_n + delta, 0.0);
        for j in i + 1..n {
            let s: C64 = g
                .row(i)
                .iter()
                .zip(g.row(j))
                .map(|(x, y)| x * y.conj())
                .sum();
            a[(i, j)] = s * inv_n;
            a[(j, i)] = (s * inv_n).conj();
        }
    }
    if let Some(fmt) = target {
        let rho = 0.9 * fmt.max_value();
        let factor = (a.max_abs() / rho).max(1.0);
        if factor > 1.0 {
            a = a.scale(1.0 / factor);
        }
    }
    a
}
