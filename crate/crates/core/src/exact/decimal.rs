//! Certified decimal rendering of rational enclosures.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ExactError, Rational};

/// Closed interval `[lower, upper]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    lower: Rational,
    upper: Rational,
}

impl Enclosure {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self, ExactError> {
        if lower > upper {
            return Err(ExactError::InvertedEnclosure { lower: Box::new(lower), upper: Box::new(upper) });
        }
        Ok(Enclosure { lower, upper })
    }

    pub fn point(x: Rational) -> Self {
        Enclosure { lower: x.clone(), upper: x }
    }

    /// `[center − radius, center + radius]` for `radius ≥ 0`.
    pub fn around(center: &Rational, radius: &Rational) -> Self {
        let r = radius.abs();
        Enclosure { lower: center - &r, upper: center + &r }
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) * Rational::new(1, 2).unwrap()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    #[default]
    Truncate,
    RoundHalfEven,
}

impl Rounding {
    fn apply(self, x: &Rational) -> BigInt {
        match self {
            Rounding::Truncate => x.trunc(),
            Rounding::RoundHalfEven => x.round_half_even(),
        }
    }
}

impl fmt::Display for Rounding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rounding::Truncate => "truncate",
            Rounding::RoundHalfEven => "round-half-even",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// A decimal string whose fraction digits are all certified by an enclosure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalRendering {
    pub sign: Sign,
    pub integer_part: String,
    pub fraction_digits: String,
    pub digits_proven: usize,
    pub rounding: Rounding,
    /// False when even the integer part differs between the two bounds.
    pub integer_certified: bool,
    /// Width of the source enclosure.
    pub width: Rational,
}

impl DecimalRendering {
    pub fn to_rational(&self) -> Rational {
        Rational::from_decimal_str(&self.to_string()).expect("rendering is a valid decimal")
    }
}

impl fmt::Display for DecimalRendering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Minus {
            f.write_str("-")?;
        }
        f.write_str(&self.integer_part)?;
        if !self.fraction_digits.is_empty() {
            write!(f, ".{}", self.fraction_digits)?;
        }
        Ok(())
    }
}

fn scaled(x: &Rational, digits: usize, rounding: Rounding) -> BigInt {
    let p = Rational::from_integer(BigInt::from(10u32).pow(digits as u32));
    rounding.apply(&(x * &p))
}

/// Renders `x` to at most `requested_digits` fraction digits, keeping only
/// the digits on which both endpoints agree after rounding.
///
/// Both rounding maps are monotone, so agreement of the endpoints at `k`
/// digits means every point of the enclosure renders identically; the
/// rendered value is then within `10^-k` of every point.
pub fn to_decimal(x: &Enclosure, requested_digits: usize, rounding: Rounding) -> DecimalRendering {
    let agrees = |k: usize| scaled(&x.lower, k, rounding) == scaled(&x.upper, k, rounding);
    // Round-half-even is not stable under digit dropping, so agreement at k
    // does not imply agreement at k-1; scan downward for the largest k.
    let proven = (0..=requested_digits).rev().find(|&k| agrees(k));

    let (digits, integer_certified, m) = match proven {
        Some(k) => (k, true, scaled(&x.lower, k, rounding)),
        None => (0, false, scaled(&x.midpoint(), 0, rounding)),
    };

    let sign = if m.is_negative() { Sign::Minus } else { Sign::Plus };
    let mag = m.abs().to_string();
    let padded = if mag.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - mag.len()), mag) } else { mag };
    let split = padded.len() - digits;
    let (int_part, frac) = padded.split_at(split);

    DecimalRendering {
        sign: if m.is_zero() { Sign::Plus } else { sign },
        integer_part: int_part.to_string(),
        fraction_digits: frac.to_string(),
        digits_proven: digits,
        rounding,
        integer_certified,
        width: x.width(),
    }
}

/// Upper bound on the number of fraction digits an enclosure can certify,
/// derived from the decimal length of `floor(1 / width)`.
pub fn decimal_capacity(x: &Enclosure, cap: usize) -> usize {
    let w = x.width();
    if w.is_zero() {
        return cap;
    }
    let inv = Rational::one() / w;
    let fl = inv.floor();
    if fl.is_zero() {
        return 0;
    }
    fl.to_string().len().min(cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn third_truncates() {
        let r = to_decimal(&Enclosure::point(rat(1, 3)), 5, Rounding::Truncate);
        assert_eq!(r.to_string(), "0.33333");
        assert_eq!(r.digits_proven, 5);
    }

    #[test]
    fn integer_point() {
        let r = to_decimal(&Enclosure::point(rat(1, 1)), 3, Rounding::Truncate);
        assert_eq!(r.to_string(), "1.000");
        assert_eq!(r.digits_proven, 3);
    }

    #[test]
    fn negative_values() {
        let r = to_decimal(&Enclosure::point(rat(-5, 4)), 3, Rounding::Truncate);
        assert_eq!(r.to_string(), "-1.250");
        let r = to_decimal(&Enclosure::point(rat(-1, 1000)), 2, Rounding::Truncate);
        assert_eq!(r.to_string(), "0.00");
        assert_eq!(r.sign, Sign::Plus);
    }

    #[test]
    fn wide_enclosure_reports_zero_digits() {
        let e = Enclosure::new(rat(9, 10), rat(21, 10)).unwrap();
        let r = to_decimal(&e, 4, Rounding::Truncate);
        assert_eq!(r.digits_proven, 0);
        assert!(!r.integer_certified);
        assert_eq!(r.width, rat(6, 5));
    }

    #[test]
    fn stops_at_first_disagreement() {
        let e = Enclosure::new(rat(12341, 10000), rat(12349, 10000)).unwrap();
        let r = to_decimal(&e, 6, Rounding::Truncate);
        assert_eq!(r.to_string(), "1.234");
        assert_eq!(r.digits_proven, 3);
    }

    #[test]
    fn half_even_can_certify_fewer_digits_than_requested_scan_finds() {
        // [0.049, 0.051] rounds to 0.05 at two digits but straddles 0.05 at one.
        let e = Enclosure::new(rat(49, 1000), rat(51, 1000)).unwrap();
        let r = to_decimal(&e, 2, Rounding::RoundHalfEven);
        assert_eq!(r.to_string(), "0.05");
        assert_eq!(r.digits_proven, 2);
    }

    #[test]
    fn inverted_enclosure_is_rejected() {
        assert!(Enclosure::new(rat(1, 1), rat(0, 1)).is_err());
    }

    #[test]
    fn capacity_bounds_certifiable_digits() {
        let e = Enclosure::new(rat(0, 1), rat(1, 12345)).unwrap();
        let cap = decimal_capacity(&e, 100);
        assert_eq!(cap, 5);
        let r = to_decimal(&e, 100, Rounding::Truncate);
        assert!(r.digits_proven <= cap);
    }
}
