//! Scalar arithmetic contexts.
//!
//! Kernels never touch scalar operators directly; they go through an
//! [`Arith`] context. This lets one implementation of each algorithm run in
//! double precision, with operation counting, or in simulated fixed point.

use std::cell::Cell;
use std::fmt::Debug;
use std::ops::{Add, AddAssign};

pub use num_complex::Complex64 as C64;

/// Arithmetic over a complex scalar type.
///
/// `sqrt_re` takes the square root of the real part and returns a real
/// element; it is only ever applied to quantities that are real in exact
/// arithmetic (Cholesky radicands).
pub trait Arith {
    type Elem: Copy + Debug + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn div(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sqrt_re(&self, a: Self::Elem) -> Self::Elem;
    fn conj(&self, a: Self::Elem) -> Self::Elem;
    /// Drops the imaginary part. Not an arithmetic operation.
    fn re_only(&self, a: Self::Elem) -> Self::Elem;
    fn to_c64(&self, a: Self::Elem) -> C64;
    #[allow(clippy::wrong_self_convention)]
    fn from_c64(&self, z: C64) -> Self::Elem;

    fn re(&self, a: Self::Elem) -> f64 {
        self.to_c64(a).re
    }

    fn abs(&self, a: Self::Elem) -> f64 {
        self.to_c64(a).norm()
    }
}

/// Plain IEEE double precision complex arithmetic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Float;

impl Arith for Float {
    type Elem = C64;

    #[inline]
    fn zero(&self) -> C64 {
        C64::new(0.0, 0.0)
    }
    #[inline]
    fn one(&self) -> C64 {
        C64::new(1.0, 0.0)
    }
    #[inline]
    fn add(&self, a: C64, b: C64) -> C64 {
        a + b
    }
    #[inline]
    fn sub(&self, a: C64, b: C64) -> C64 {
        a - b
    }
    #[inline]
    fn mul(&self, a: C64, b: C64) -> C64 {
        a * b
    }
    #[inline]
    fn div(&self, a: C64, b: C64) -> C64 {
        // Real divisors are the common case (pivots); keep them exact.
        if b.im == 0.0 {
            C64::new(a.re / b.re, a.im / b.re)
        } else {
            a / b
        }
    }
    #[inline]
    fn sqrt_re(&self, a: C64) -> C64 {
        C64::new(a.re.sqrt(), 0.0)
    }
    #[inline]
    fn conj(&self, a: C64) -> C64 {
        a.conj()
    }
    #[inline]
    fn re_only(&self, a: C64) -> C64 {
        C64::new(a.re, 0.0)
    }
    #[inline]
    fn to_c64(&self, a: C64) -> C64 {
        a
    }
    #[inline]
    fn from_c64(&self, z: C64) -> C64 {
        z
    }
}

/// Tally of complex scalar operations.
///
/// A complex multiplication counts as one operation regardless of how many
/// real multiplies it takes. Subtractions are counted as additions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCounter {
    pub cmul: u64,
    pub cdiv: u64,
    pub cadd: u64,
    pub csqrt: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// The "multiply operations" figure: multiplications plus divisions.
    pub fn mul_ops(&self) -> u64 {
        self.cmul + self.cdiv
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(self, rhs: OpCounter) -> OpCounter {
        OpCounter {
            cmul: self.cmul + rhs.cmul,
            cdiv: self.cdiv + rhs.cdiv,
            cadd: self.cadd + rhs.cadd,
            csqrt: self.csqrt + rhs.csqrt,
        }
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: OpCounter) {
        *self = *self + rhs;
    }
}

/// Double precision arithmetic that tallies every operation it performs.
#[derive(Debug, Default)]
pub struct Counting {
    counts: Cell<OpCounter>,
}

impl Counting {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn counts(&self) -> OpCounter {
        self.counts.get()
    }

    #[inline]
    fn bump(&self, f: impl FnOnce(&mut OpCounter)) {
        let mut c = self.counts.get();
        f(&mut c);
        self.counts.set(c);
    }
}

impl Arith for Counting {
    type Elem = C64;

    #[inline]
    fn zero(&self) -> C64 {
        Float.zero()
    }
    #[inline]
    fn one(&self) -> C64 {
        Float.one()
    }
    #[inline]
    fn add(&self, a: C64, b: C64) -> C64 {
        self.bump(|c| c.cadd += 1);
        Float.add(a, b)
    }
    #[inline]
    fn sub(&self, a: C64, b: C64) -> C64 {
        self.bump(|c| c.cadd += 1);
        Float.sub(a, b)
    }
    #[inline]
    fn mul(&self, a: C64, b: C64) -> C64 {
        self.bump(|c| c.cmul += 1);
        Float.mul(a, b)
    }
    #[inline]
    fn div(&self, a: C64, b: C64) -> C64 {
        self.bump(|c| c.cdiv += 1);
        Float.div(a, b)
    }
    #[inline]
    fn sqrt_re(&self, a: C64) -> C64 {
        self.bump(|c| c.csqrt += 1);
        Float.sqrt_re(a)
    }
    #[inline]
    fn conj(&self, a: C64) -> C64 {
        a.conj()
    }
    #[inline]
    fn re_only(&self, a: C64) -> C64 {
        Float.re_only(a)
    }
    #[inline]
    fn to_c64(&self, a: C64) -> C64 {
        a
    }
    #[inline]
    fn from_c64(&self, z: C64) -> C64 {
        z
    }
}
