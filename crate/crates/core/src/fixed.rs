//! Signed Q-format fixed-point simulation.
//!
//! A `Qm.f` number has one sign bit, `m` integer bits and `f` fractional
//! bits. Raw mantissas are held in `i64`; products and quotients are formed
//! exactly in 128-bit integers and rounded once (nearest, ties to even) back
//! to `f` fractional bits. Overflow saturates.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use crate::arith::{Arith, C64};
use crate::error::{Error, Result};

/// Widest supported format: `m + f` may not exceed this, so raw values fit
/// comfortably in `i64` and exact products in `i128`.
pub const MAX_WIDTH: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QFormat {
    int_bits: u32,
    frac_bits: u32,
}

impl QFormat {
    pub fn new(int_bits: u32, frac_bits: u32) -> Result<Self> {
        if frac_bits == 0 {
            return Err(Error::InvalidFormat(format!(
                "Q{int_bits}.{frac_bits}: need at least one fractional bit"
            )));
        }
        if int_bits + frac_bits > MAX_WIDTH {
            return Err(Error::InvalidFormat(format!(
                "Q{int_bits}.{frac_bits}: m + f must not exceed {MAX_WIDTH}"
            )));
        }
        Ok(Self {
            int_bits,
            frac_bits,
        })
    }

    pub fn int_bits(&self) -> u32 {
        self.int_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    /// Total word length including the sign bit.
    pub fn width(&self) -> u32 {
        self.int_bits + self.frac_bits + 1
    }

    pub fn max_raw(&self) -> i64 {
        (1i64 << (self.int_bits + self.frac_bits)) - 1
    }

    pub fn min_raw(&self) -> i64 {
        -(1i64 << (self.int_bits + self.frac_bits))
    }

    pub fn resolution(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    /// Largest representable value, `2^m - 2^-f`.
    pub fn max_value(&self) -> f64 {
        self.raw_to_f64(self.max_raw())
    }

    pub fn min_value(&self) -> f64 {
        self.raw_to_f64(self.min_raw())
    }

    pub fn raw_to_f64(&self, raw: i64) -> f64 {
        raw as f64 * self.resolution()
    }

    fn saturate(&self, v: i128) -> (i64, bool) {
        if v > self.max_raw() as i128 {
            (self.max_raw(), true)
        } else if v < self.min_raw() as i128 {
            (self.min_raw(), true)
        } else {
            (v as i64, false)
        }
    }
}

impl fmt::Display for QFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.int_bits, self.frac_bits)
    }
}

/// Parses `M.F` (an optional leading `Q` is accepted).
impl FromStr for QFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches(['Q', 'q']);
        let bad = || Error::InvalidFormat(format!("expected M.F, got {s:?}"));
        let (m, f) = body.split_once('.').ok_or_else(bad)?;
        let m = m.parse().map_err(|_| bad())?;
        let f = f.parse().map_err(|_| bad())?;
        QFormat::new(m, f)
    }
}

/// Quantizes `x` to a raw mantissa: round to nearest with ties to even,
/// saturating at the format bounds. `x` must not be NaN.
pub fn quantize(x: f64, fmt: QFormat) -> i64 {
    quantize_checked(x, fmt).0
}

fn quantize_checked(x: f64, fmt: QFormat) -> (i64, bool) {
    assert!(!x.is_nan(), "cannot quantize NaN");
    // Scaling by a power of two is exact, so only the rounding step loses
    // information.
    let scaled = (x * (fmt.frac_bits as f64).exp2()).round_ties_even();
    let limit = ((fmt.int_bits + fmt.frac_bits) as f64).exp2();
    if scaled >= limit {
        (fmt.max_raw(), true)
    } else if scaled < -limit {
        (fmt.min_raw(), true)
    } else {
        (scaled as i64, false)
    }
}

/// Arithmetic right shift by `shift` bits, rounding to nearest, ties to even.
fn round_shift(v: i128, shift: u32) -> i128 {
    if shift == 0 {
        return v;
    }
    let q = v >> shift;
    let rem = v - (q << shift);
    let half = 1i128 << (shift - 1);
    if rem > half || (rem == half && q & 1 == 1) {
        q + 1
    } else {
        q
    }
}

/// `round(num * 2^shift / den)` with ties to even, computed exactly.
///
/// Returns `None` once the magnitude is certain to exceed `limit`.
fn div_round(num: i128, den: u128, shift: u32, limit: u128) -> Option<i128> {
    debug_assert!(den > 0);
    let neg = num < 0;
    let mag = num.unsigned_abs();
    let mut q = mag / den;
    let mut r = mag % den;
    if q > limit {
        return None;
    }
    // Long division one bit at a time; r < den < 2^124 so 2r never overflows.
    for _ in 0..shift {
        q <<= 1;
        r <<= 1;
        if r >= den {
            r -= den;
            q += 1;
        }
        if q > limit {
            return None;
        }
    }
    let twice = r << 1;
    if twice > den || (twice == den && q & 1 == 1) {
        q += 1;
    }
    if q > limit {
        return None;
    }
    let q = q as i128;
    Some(if neg { -q } else { q })
}

/// Complex number with fixed-point real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FxpComplex {
    pub re_raw: i64,
    pub im_raw: i64,
    pub fmt: QFormat,
}

impl FxpComplex {
    pub fn from_raw(re_raw: i64, im_raw: i64, fmt: QFormat) -> Self {
        debug_assert!(re_raw >= fmt.min_raw() && re_raw <= fmt.max_raw());
        debug_assert!(im_raw >= fmt.min_raw() && im_raw <= fmt.max_raw());
        Self {
            re_raw,
            im_raw,
            fmt,
        }
    }

    pub fn zero(fmt: QFormat) -> Self {
        Self::from_raw(0, 0, fmt)
    }

    pub fn from_c64(z: C64, fmt: QFormat) -> Self {
        Self::from_raw(quantize(z.re, fmt), quantize(z.im, fmt), fmt)
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(
            self.fmt.raw_to_f64(self.re_raw),
            self.fmt.raw_to_f64(self.im_raw),
        )
    }

    fn checked_from_c64(z: C64, fmt: QFormat) -> (Self, bool) {
        let (re, sr) = quantize_checked(z.re, fmt);
        let (im, si) = quantize_checked(z.im, fmt);
        (Self::from_raw(re, im, fmt), sr || si)
    }

    fn from_wide(re: i128, im: i128, fmt: QFormat) -> (Self, bool) {
        let (re, sr) = fmt.saturate(re);
        let (im, si) = fmt.saturate(im);
        (Self::from_raw(re, im, fmt), sr || si)
    }

    fn checked_add(self, b: Self) -> (Self, bool) {
        debug_assert_eq!(self.fmt, b.fmt);
        Self::from_wide(
            self.re_raw as i128 + b.re_raw as i128,
            self.im_raw as i128 + b.im_raw as i128,
            self.fmt,
        )
    }

    fn checked_sub(self, b: Self) -> (Self, bool) {
        debug_assert_eq!(self.fmt, b.fmt);
        Self::from_wide(
            self.re_raw as i128 - b.re_raw as i128,
            self.im_raw as i128 - b.im_raw as i128,
            self.fmt,
        )
    }

    fn checked_mul(self, b: Self) -> (Self, bool) {
        debug_assert_eq!(self.fmt, b.fmt);
        let (ar, ai) = (self.re_raw as i128, self.im_raw as i128);
        let (br, bi) = (b.re_raw as i128, b.im_raw as i128);
        let f = self.fmt.frac_bits;
        // Full 2f-bit products, one rounding per component.
        let re = round_shift(ar * br - ai * bi, f);
        let im = round_shift(ar * bi + ai * br, f);
        Self::from_wide(re, im, self.fmt)
    }

    /// Returns `None` when the divisor is exactly zero.
    fn checked_div(self, b: Self) -> Option<(Self, bool)> {
        debug_assert_eq!(self.fmt, b.fmt);
        let fmt = self.fmt;
        let (ar, ai) = (self.re_raw as i128, self.im_raw as i128);
        let (br, bi) = (b.re_raw as i128, b.im_raw as i128);
        let den = (br * br + bi * bi) as u128;
        if den == 0 {
            return None;
        }
        // (a / b) = a * conj(b) / |b|^2; the 2^-f scales cancel, leaving
        // raw = round(2^f * num / den).
        let limit = fmt.max_raw() as u128 + 1;
        let part = |num: i128| match div_round(num, den, fmt.frac_bits, limit) {
            Some(v) => fmt.saturate(v),
            None if num < 0 => (fmt.min_raw(), true),
            None => (fmt.max_raw(), true),
        };
        let (re, sr) = part(ar * br + ai * bi);
        let (im, si) = part(ai * br - ar * bi);
        Some((Self::from_raw(re, im, fmt), sr || si))
    }

    /// Square root of the real part, as a real fixed-point value.
    /// Non-positive inputs give zero.
    fn sqrt_re(self) -> Self {
        let f = self.fmt.frac_bits;
        if self.re_raw <= 0 {
            return Self::zero(self.fmt);
        }
        // sqrt(raw * 2^-f) * 2^f = sqrt(raw * 2^f)
        let v = (self.re_raw as u128) << f;
        let s = v.isqrt();
        // v is an integer, so (s + 1/2)^2 = s^2 + s + 1/4 can never tie.
        let s = if v - s * s > s { s + 1 } else { s };
        let (re, _) = self.fmt.saturate(s as i128);
        Self::from_raw(re, 0, self.fmt)
    }
}

/// Fixed-point complex multiply: exact real products, single rounding per
/// component, saturation on overflow.
pub fn fxp_mul(a: FxpComplex, b: FxpComplex) -> FxpComplex {
    assert_eq!(a.fmt, b.fmt, "operands must share a Q format");
    a.checked_mul(b).0
}

/// Fixed-point arithmetic context.
///
/// Records every saturation and every division by an exact zero so a caller
/// can reject a computation that left the representable range.
#[derive(Debug)]
pub struct Fxp {
    fmt: QFormat,
    saturations: Cell<u64>,
    zero_divisions: Cell<u64>,
}

impl Fxp {
    pub fn new(fmt: QFormat) -> Self {
        Self {
            fmt,
            saturations: Cell::new(0),
            zero_divisions: Cell::new(0),
        }
    }

    pub fn format(&self) -> QFormat {
        self.fmt
    }

    pub fn saturations(&self) -> u64 {
        self.saturations.get()
    }

    pub fn zero_divisions(&self) -> u64 {
        self.zero_divisions.get()
    }

    /// True when no saturation or zero division has occurred.
    pub fn is_clean(&self) -> bool {
        self.saturations() == 0 && self.zero_divisions() == 0
    }

    #[inline]
    fn note(&self, (v, saturated): (FxpComplex, bool)) -> FxpComplex {
        if saturated {
            self.saturations.set(self.saturations.get() + 1);
        }
        v
    }
}

impl Arith for Fxp {
    type Elem = FxpComplex;

    fn zero(&self) -> FxpComplex {
        FxpComplex::zero(self.fmt)
    }

    fn one(&self) -> FxpComplex {
        self.note(FxpComplex::checked_from_c64(C64::new(1.0, 0.0), self.fmt))
    }

    fn add(&self, a: FxpComplex, b: FxpComplex) -> FxpComplex {
        self.note(a.checked_add(b))
    }

    fn sub(&self, a: FxpComplex, b: FxpComplex) -> FxpComplex {
        self.note(a.checked_sub(b))
    }

    fn mul(&self, a: FxpComplex, b: FxpComplex) -> FxpComplex {
        self.note(a.checked_mul(b))
    }

    fn div(&self, a: FxpComplex, b: FxpComplex) -> FxpComplex {
        match a.checked_div(b) {
            Some(r) => self.note(r),
            None => {
                self.zero_divisions.set(self.zero_divisions.get() + 1);
                self.zero()
            }
        }
    }

    fn sqrt_re(&self, a: FxpComplex) -> FxpComplex {
        a.sqrt_re()
    }

    fn conj(&self, a: FxpComplex) -> FxpComplex {
        // -min_raw is not representable.
        self.note(FxpComplex::from_wide(
            a.re_raw as i128,
            -(a.im_raw as i128),
            a.fmt,
        ))
    }

    fn re_only(&self, a: FxpComplex) -> FxpComplex {
        FxpComplex::from_raw(a.re_raw, 0, a.fmt)
    }

    fn to_c64(&self, a: FxpComplex) -> C64 {
        a.to_c64()
    }

    fn from_c64(&self, z: C64) -> FxpComplex {
        self.note(FxpComplex::checked_from_c64(z, self.fmt))
    }
}
