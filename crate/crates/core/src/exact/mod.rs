//! Exact rational arithmetic.
//!
//! [`Rational`] is the scalar used everywhere in this crate. It wraps a
//! canonical `BigRational` (denominator positive, numerator and denominator
//! coprime), so equality is structural and every value printed as `n/d` is
//! already reduced.

mod decimal;
mod poly;

pub use decimal::{decimal_capacity, to_decimal, DecimalRendering, Enclosure, Rounding, Sign};
pub use poly::Poly;

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}: expected \"n/d\" or an integer")]
    ParseRational(String),
    #[error("cannot parse decimal {0:?}")]
    ParseDecimal(String),
    #[error("enclosure is inverted: lower {lower} > upper {upper}")]
    InvertedEnclosure { lower: Box<Rational>, upper: Box<Rational> },
}

/// Arbitrary-precision rational number in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `n/d` in lowest terms with a positive denominator.
    pub fn new(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self, ExactError> {
        let d = d.into();
        if d.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(n.into(), d)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// True for 0, −1, −2, … (the poles of a rising factorial in the denominator).
    pub fn is_nonpositive_integer(&self) -> bool {
        self.is_integer() && !self.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Non-negative integer power.
    pub fn pow(&self, exp: u64) -> Self {
        let e = u32::try_from(exp).expect("exponent exceeds u32");
        Rational(BigRational::new_raw(self.numer().pow(e), self.denom().pow(e)))
    }

    /// Signed integer power; a zero base with a negative exponent is an error.
    pub fn powi(&self, exp: i64) -> Result<Self, ExactError> {
        if exp >= 0 {
            Ok(self.pow(exp as u64))
        } else {
            self.recip().map(|r| r.pow(exp.unsigned_abs()))
        }
    }

    /// Largest integer ≤ self.
    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    /// Integer part, rounding toward zero.
    pub fn trunc(&self) -> BigInt {
        self.0.trunc().to_integer()
    }

    /// Nearest integer, ties to even.
    pub fn round_half_even(&self) -> BigInt {
        let fl = self.floor();
        let frac = self - &Rational::from_integer(fl.clone());
        let half = Rational::new(1, 2).unwrap();
        match frac.cmp(&half) {
            Ordering::Less => fl,
            Ordering::Greater => fl + 1,
            Ordering::Equal => {
                if fl.is_even() {
                    fl
                } else {
                    fl + 1
                }
            }
        }
    }

    /// Integer value, if the rational is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer().clone())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    /// Nearest `f64`, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Approximate `ln |self|`, valid far outside the `f64` range; `-∞` at zero.
    pub fn ln_abs(&self) -> f64 {
        fn ln_big(n: &BigInt) -> f64 {
            let bits = n.bits();
            let shift = bits.saturating_sub(60);
            let top = (n.abs() >> shift).to_f64().unwrap_or(f64::NAN);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_big(self.numer()) - ln_big(self.denom())
    }

    /// Bit length of numerator plus denominator; a cheap size measure.
    pub fn size_bits(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    pub fn min<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Parses a terminating decimal such as `-1.2020` into an exact rational.
    pub fn from_decimal_str(s: &str) -> Result<Self, ExactError> {
        let err = || ExactError::ParseDecimal(s.to_string());
        let t = s.trim();
        let (neg, body) = if let Some(rest) = t.strip_prefix('-').or_else(|| t.strip_prefix('−')) {
            (true, rest)
        } else {
            (false, t.strip_prefix('+').unwrap_or(t))
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
        let d = BigInt::from(10u32).pow(frac_part.len() as u32);
        let r = Rational::new(n, d)?;
        Ok(if neg { -r } else { r })
    }
}

/// Always `n/d`; the alternate form `{:#}` drops a unit denominator.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if f.alternate() && self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ExactError;

    /// Accepts `n/d` or a bare integer. Decimal points are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ExactError::ParseRational(s.to_string());
        let t = s.trim().replace('−', "-");
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t.as_str(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        Rational::new(n, d)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(v: $t) -> Self {
                Rational::from_integer(v)
            }
        }
    )*};
}
from_int!(i32, i64, u32, u64, usize);

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_integer(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(&self.0 $op rhs.0)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
// Panics on a zero divisor, like the integer operators; fallible call sites
// use `checked_div`.
binop!(Div, div, /);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl MulAssign<Rational> for Rational {
    fn mul_assign(&mut self, rhs: Rational) {
        self.0 *= rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(UnreducedProduct::new(), |mut acc, x| {
            acc.mul(&x);
            acc
        })
        .finish()
    }
}

impl<'a> Product<&'a Rational> for Rational {
    fn product<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(UnreducedProduct::new(), |mut acc, x| {
            acc.mul(x);
            acc
        })
        .finish()
    }
}

/// A product of rationals kept as a bare numerator/denominator pair and
/// reduced once in [`finish`](Self::finish). Reducing after every factor
/// costs a big-integer gcd each time, which dominates long products.
#[derive(Debug, Clone)]
pub struct UnreducedProduct {
    num: BigInt,
    den: BigInt,
}

impl Default for UnreducedProduct {
    fn default() -> Self {
        Self::new()
    }
}

impl UnreducedProduct {
    pub fn new() -> Self {
        UnreducedProduct { num: BigInt::one(), den: BigInt::one() }
    }

    pub fn mul(&mut self, r: &Rational) {
        self.num *= r.numer();
        self.den *= r.denom();
    }

    /// Multiplies by `n/d`; `d` must be nonzero.
    pub fn mul_parts(&mut self, n: &BigInt, d: &BigInt) {
        debug_assert!(!d.is_zero());
        self.num *= n;
        self.den *= d;
    }

    pub fn div(&mut self, r: &Rational) -> Result<(), ExactError> {
        if r.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        self.num *= r.denom();
        self.den *= r.numer();
        Ok(())
    }

    pub fn finish(self) -> Rational {
        Rational(BigRational::new(self.num, self.den))
    }
}

/// `Σ aᵢ bᵢ` over a common denominator, reduced once at the end and not at
/// all when the sum vanishes — the usual outcome when checking identities.
pub fn dot(pairs: &[(&Rational, &Rational)]) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (a, b) in pairs {
        let tn = a.numer() * b.numer();
        let td = a.denom() * b.denom();
        num = num * &td + tn * &den;
        den *= td;
    }
    if num.is_zero() {
        Rational::zero()
    } else {
        Rational(BigRational::new(num, den))
    }
}

/// `n/d` from machine integers, panicking on `d = 0`. Handy for literals.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("rat: zero denominator")
}

/// Operation selector for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies a field operation, reporting division by zero as an error.
pub fn arith(a: &Rational, b: &Rational, op: ArithOp) -> Result<Rational, ExactError> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.checked_div(b),
    }
}

/// Canonical `n/d`; an alias of [`Rational::new`] named after the operation.
pub fn normalize(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Rational, ExactError> {
    Rational::new(n, d)
}
