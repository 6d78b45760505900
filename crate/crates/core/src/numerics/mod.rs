//! Arbitrary-precision real and complex numbers.
//!
//! All values are MPFR floats. A [`PrecisionContext`] fixes the working precision in
//! decimal digits; arithmetic carries `guard_digits` extra digits internally while
//! user-facing tolerances are phrased in terms of `decimal_digits` alone.

mod constants;
mod text;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use constants::{eval_constant, ConstantSpec};

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Minimum accepted working precision, in decimal digits.
pub const MIN_DECIMAL_DIGITS: u32 = 15;
pub const DEFAULT_GUARD_DIGITS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    decimal_digits: u32,
    guard_digits: u32,
}

impl PrecisionContext {
    pub fn new(decimal_digits: u32) -> Result<Self> {
        Self::with_guard(decimal_digits, DEFAULT_GUARD_DIGITS)
    }

    pub fn with_guard(decimal_digits: u32, guard_digits: u32) -> Result<Self> {
        if decimal_digits < MIN_DECIMAL_DIGITS {
            return Err(invalid(format!(
                "precision of {decimal_digits} digits is below the minimum of {MIN_DECIMAL_DIGITS}"
            )));
        }
        Ok(PrecisionContext { decimal_digits, guard_digits })
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// Digits actually carried by arithmetic under this context.
    pub fn total_digits(&self) -> u32 {
        self.decimal_digits + self.guard_digits
    }

    /// MPFR mantissa size used for values under this context.
    pub fn bits(&self) -> u32 {
        (f64::from(self.total_digits()) * BITS_PER_DIGIT).ceil() as u32 + 4
    }

    pub fn zero(&self) -> BigReal {
        BigReal(Float::new(self.bits()))
    }

    pub fn one(&self) -> BigReal {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> BigReal {
        BigReal(Float::with_val(self.bits(), v))
    }

    pub fn from_f64(&self, v: f64) -> BigReal {
        assert!(v.is_finite(), "non-finite f64 {v}");
        BigReal(Float::with_val(self.bits(), v))
    }

    pub fn from_integer(&self, v: &Integer) -> BigReal {
        BigReal(Float::with_val(self.bits(), v))
    }

    /// `10^exp` at this context's precision.
    pub fn pow10(&self, exp: i64) -> BigReal {
        let exp = i32::try_from(exp).expect("decimal exponent out of range");
        BigReal(Float::with_val(self.bits(), 10).pow(exp))
    }

    /// Parses a decimal string (`-12.5`, `3e-40`, ...) at this precision.
    pub fn parse_real(&self, s: &str) -> Result<BigReal> {
        text::parse_real(s, self.bits())
    }

    /// Parses `re`, `re+im*I` or `im*I`.
    pub fn parse_complex(&self, s: &str) -> Result<BigComplex> {
        text::parse_complex(s, self.bits())
    }

    /// Rounds `v` to this context's precision.
    pub fn round(&self, v: &BigReal) -> BigReal {
        BigReal(Float::with_val(self.bits(), &v.0))
    }

    pub fn round_complex(&self, z: &BigComplex) -> BigComplex {
        BigComplex::new(self.round(&z.re), self.round(&z.im))
    }
}

/// A finite arbitrary-precision real.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(Float);

impl BigReal {
    pub(crate) fn from_float(f: Float) -> Self {
        debug_assert!(!f.is_nan() && !f.is_infinite(), "non-finite value escaped");
        BigReal(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn abs(&self) -> BigReal {
        BigReal(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> BigReal {
        assert!(!self.is_sign_negative(), "square root of a negative value");
        BigReal(self.0.clone().sqrt())
    }

    pub fn square(&self) -> BigReal {
        BigReal(self.0.clone().square())
    }

    pub fn recip(&self) -> BigReal {
        assert!(!self.is_zero(), "reciprocal of zero");
        BigReal(self.0.clone().recip())
    }

    pub fn pow_u32(&self, e: u32) -> BigReal {
        BigReal(self.0.clone().pow(e))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Decimal exponent estimate `floor(log10 |v|)`, or `None` for zero.
    pub fn log10_floor(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let l = Float::with_val(64, self.0.abs_ref()).log10();
        Some(l.to_f64().floor() as i64)
    }

    /// `e` with `2^(e-1) <= |v| < 2^e`, or `None` for zero.
    pub fn binary_exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_integer(&self) -> Integer {
        self.0.clone().round().to_integer().expect("finite value")
    }

    pub fn floor_to_integer(&self) -> Integer {
        self.0.clone().floor().to_integer().expect("finite value")
    }

    pub fn ceil_to_integer(&self) -> Integer {
        self.0.clone().ceil().to_integer().expect("finite value")
    }

    pub fn with_prec(&self, bits: u32) -> BigReal {
        let mut f = self.0.clone();
        f.set_prec_round(bits, Round::Nearest);
        BigReal(f)
    }

    /// Decimal text with `digits` significant digits, trailing zeros trimmed.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        text::format_real(&self.0, digits)
    }

    /// Decimal text carrying every digit this value's precision supports.
    pub fn to_full_string(&self) -> String {
        text::format_real(&self.0, text::digits_for_bits(self.prec()))
    }

    pub fn max(self, other: BigReal) -> BigReal {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn cmp_abs(&self, other: &BigReal) -> Ordering {
        self.0.cmp_abs(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(20))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_full_string())
    }
}

fn out_prec(a: &Float, b: &Float) -> u32 {
    a.prec().max(b.prec())
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                BigReal(Float::with_val(out_prec(&self.0, &rhs.0), &self.0 $op &rhs.0))
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl AddAssign<&BigReal> for BigReal {
    fn add_assign(&mut self, rhs: &BigReal) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&BigReal> for BigReal {
    fn sub_assign(&mut self, rhs: &BigReal) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&BigReal> for BigReal {
    fn mul_assign(&mut self, rhs: &BigReal) {
        self.0 *= &rhs.0;
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0.clone())
    }
}

/// True iff `|v| < threshold`.
pub fn nearly_zero(v: &BigReal, threshold: &BigReal) -> bool {
    debug_assert!(!threshold.is_sign_negative() && !threshold.is_zero());
    v.0.cmp_abs(&threshold.0) == Some(Ordering::Less)
}

#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn real(re: BigReal) -> Self {
        let im = BigReal(Float::new(re.prec()));
        BigComplex { re, im }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        BigComplex::new(ctx.zero(), ctx.zero())
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        BigComplex::new(ctx.one(), ctx.zero())
    }

    pub fn i(ctx: &PrecisionContext) -> Self {
        BigComplex::new(ctx.zero(), ctx.one())
    }

    pub fn from_i64(re: i64, im: i64, ctx: &PrecisionContext) -> Self {
        BigComplex::new(ctx.from_i64(re), ctx.from_i64(im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Larger binary exponent of the two parts, or `None` for zero.
    pub fn max_exponent(&self) -> Option<i32> {
        match (self.re.binary_exponent(), self.im.binary_exponent()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex::new(self.re.clone(), -&self.im)
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> BigReal {
        let mut acc = self.re.square();
        acc += &self.im.square();
        acc
    }

    pub fn abs(&self) -> BigReal {
        if self.im.is_zero() {
            return self.re.abs();
        }
        BigReal(Float::with_val(out_prec(&self.re.0, &self.im.0), self.re.0.hypot_ref(&self.im.0)))
    }

    pub fn scale(&self, k: &BigReal) -> BigComplex {
        BigComplex::new(&self.re * k, &self.im * k)
    }

    pub fn recip(&self) -> BigComplex {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "reciprocal of complex zero");
        let inv = n.recip();
        BigComplex::new(&self.re * &inv, -(&self.im * &inv))
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &BigComplex, b: &BigComplex) {
        let p = a * b;
        self.re += &p.re;
        self.im += &p.im;
    }

    pub fn with_prec(&self, bits: u32) -> BigComplex {
        BigComplex::new(self.re.with_prec(bits), self.im.with_prec(bits))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// `re+im*I` text, or just `re` for real values.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        text::format_complex(&self.re.0, &self.im.0, digits)
    }

    pub fn to_full_string(&self) -> String {
        self.to_decimal_string(text::digits_for_bits(self.prec()))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(20))
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_full_string())
    }
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        // Real operands are common (real constants, rational rings); skip the zero products.
        if self.im.is_zero() && rhs.im.is_zero() {
            let re = &self.re * &rhs.re;
            let im = BigReal(Float::new(re.prec()));
            return BigComplex::new(re, im);
        }
        let prec = out_prec(&self.re.0, &rhs.re.0);
        let re = Float::with_val(prec, &self.re.0 * &rhs.re.0 - &self.im.0 * &rhs.im.0);
        let im = Float::with_val(prec, &self.re.0 * &rhs.im.0 + &self.im.0 * &rhs.re.0);
        BigComplex::new(BigReal(re), BigReal(im))
    }
}

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        if rhs.im.is_zero() {
            assert!(!rhs.re.is_zero(), "division by complex zero");
            return BigComplex::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        self * &rhs.recip()
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-&self.re, -&self.im)
    }
}

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Serialize for BigReal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.to_full_string())
    }
}

impl Serialize for BigComplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.to_full_string())
    }
}

/// Euclidean norm `sqrt(Σ |v_i|²)`.
pub fn vector_norm(v: &[BigComplex], ctx: &PrecisionContext) -> BigReal {
    let mut acc = ctx.zero();
    for z in v {
        acc += &z.norm_sqr();
    }
    acc.sqrt()
}
