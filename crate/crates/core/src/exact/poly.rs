//! Dense univariate polynomials with rational coefficients.
//!
//! Used to certify sign conditions of term ratios on an integer ray: if the
//! Taylor shift `p(x + x0)` has only non-negative coefficients, then
//! `p(x) ≥ 0` for every real `x ≥ x0`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    // coeffs[k] multiplies x^k; no trailing zeros.
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// `c0 + c1·x`.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Poly::new(vec![c0, c1])
    }

    /// `x + shift`, the usual factor of a rising factorial ratio.
    pub fn x_plus(shift: Rational) -> Self {
        Poly::linear(shift, Rational::one())
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut v = vec![Rational::zero(); degree];
        v.push(c);
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `p(k·x)`.
    pub fn scale_arg(&self, k: &Rational) -> Self {
        let mut pk = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pk);
            pk *= k;
        }
        Poly::new(out)
    }

    /// `p(x + s)` by repeated synthetic division.
    pub fn shift(&self, s: &Rational) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * s;
                c[j] += t;
            }
        }
        Poly::new(c)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Sufficient test for `p(x) ≥ 0` on `[x0, ∞)`.
    pub fn nonnegative_from(&self, x0: &Rational) -> bool {
        self.shift(x0).coeffs.iter().all(|c| !c.is_negative())
    }

    /// Sufficient test for `p(x) > 0` on `[x0, ∞)`.
    pub fn positive_from(&self, x0: &Rational) -> bool {
        let s = self.shift(x0);
        !s.coeffs.is_empty() && s.coeffs.iter().all(|c| !c.is_negative()) && s.coeffs[0].is_positive()
    }

    /// `Σ |c_k| r^k`, an upper bound for `|p(w)|` when `|w| ≤ r`.
    pub fn abs_bound_on_disc(&self, r: &Rational) -> Rational {
        let mut rk = Rational::one();
        let mut acc = Rational::zero();
        for c in &self.coeffs {
            acc += c.abs() * &rk;
            rk *= r;
        }
        acc
    }

    /// `|c_0| − Σ_{k≥1} |c_k| r^k`, a lower bound for `|p(w)|` when `|w| ≤ r`
    /// (meaningful only when positive).
    pub fn min_abs_on_disc(&self, r: &Rational) -> Rational {
        let Some((c0, rest)) = self.coeffs.split_first() else {
            return Rational::zero();
        };
        let mut rk = r.clone();
        let mut acc = c0.abs();
        for c in rest {
            acc -= &(c.abs() * &rk);
            rk *= r;
        }
        acc
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{k}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = Rational::zero();
        Poly::new((0..n).map(|k| self.coeffs.get(k).unwrap_or(&z) + rhs.coeffs.get(k).unwrap_or(&z)).collect())
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
