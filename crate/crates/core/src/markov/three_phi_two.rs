//! The worked `₃φ₂` transformation.
//!
//! The series `Σ_z (a,b;q)_z/(c,d;q)_z · t^z`, `t = cd/(abq)`, is extended to
//!
//! ```text
//! F(x, z) = (a,b;q)_z t^z / (c,d;q)_{x+z} · (cd q^(2z))^x q^(x(x−1))
//! ```
//!
//! and paired through `U = A_x F`, `V = (B_x + C_x q^z) F` with closed-form
//! multipliers. The transformed series `Σ_x V(x, 0)` converges like `q^(x²)`.

use std::sync::Arc;

use serde::Serialize;

use super::{GridFunction, MarkovError, MarkovPair, TermExtension, GRID_CAP};
use crate::exact::{Rational, UnreducedProduct};
use crate::hgterm::{q_pochhammer, q_pochhammer_into, BhgSpec, IndexFn, TermError, TermSequence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkovParams {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub q: Rational,
    pub t: Rational,
}

/// Converts the `(r, r′, s, s′, 𝐪)` parameters of the classical form, with
/// `|𝐪| > 1`, to `a = 1/r, b = 1/r′, c = 1/s, d = 1/s′, q = 1/𝐪`.
pub fn markov_param_map(
    r: &Rational,
    r2: &Rational,
    s: &Rational,
    s2: &Rational,
    big_q: &Rational,
) -> Result<MarkovParams, MarkovError> {
    for (name, v) in [("r", r), ("r′", r2), ("s", s), ("s′", s2), ("𝐪", big_q)] {
        if v.is_zero() {
            return Err(MarkovError::InvalidParameters(format!("{name} must be nonzero")));
        }
    }
    if big_q.abs() <= Rational::one() {
        return Err(MarkovError::InvalidParameters(format!("𝐪 = {big_q} must satisfy |𝐪| > 1")));
    }
    let t = r * r2 * big_q / (s * s2);
    Ok(MarkovParams { a: r.recip()?, b: r2.recip()?, c: s.recip()?, d: s2.recip()?, q: big_q.recip()?, t })
}

/// `n`-th term of the classical form
/// `Π_{k<n} (r𝐪^k − 1)(r′𝐪^k − 1) / ((s𝐪^k − 1)(s′𝐪^k − 1)) · 𝐪^n`.
pub fn markov_original_term(
    r: &Rational,
    r2: &Rational,
    s: &Rational,
    s2: &Rational,
    big_q: &Rational,
    n: u64,
) -> Result<Rational, MarkovError> {
    let one = Rational::one();
    let mut acc = Rational::one();
    let mut qk = Rational::one();
    for k in 0..n {
        let den = (s * &qk - &one) * (s2 * &qk - &one);
        if den.is_zero() {
            return Err(MarkovError::Vanishing(format!("(s𝐪^k − 1)(s′𝐪^k − 1) at k = {k}")));
        }
        acc *= (r * &qk - &one) * (r2 * &qk - &one) / den;
        qk *= big_q;
    }
    Ok(acc * big_q.pow(n))
}

/// Exact evaluators for the worked example at fixed rational parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreePhiTwo {
    params: MarkovParams,
}

/// Validated constructor; see [`ThreePhiTwo::new`].
pub fn markov_3phi2(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    q: &Rational,
) -> Result<ThreePhiTwo, MarkovError> {
    ThreePhiTwo::new(a, b, c, d, q)
}

fn cap(index: u64) -> Result<(), MarkovError> {
    if index > GRID_CAP {
        return Err(MarkovError::BeyondCap { index, cap: GRID_CAP });
    }
    Ok(())
}

impl ThreePhiTwo {
    /// Requires nonzero parameters, `0 < |q| < 1` and `|t| < 1`. Under these
    /// conditions `t q^k ≠ 1` for all `k ≥ 0`, so the multipliers are always
    /// defined; only `(c;q)_n`, `(d;q)_n` can vanish.
    pub fn new(a: &Rational, b: &Rational, c: &Rational, d: &Rational, q: &Rational) -> Result<Self, MarkovError> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d), ("q", q)] {
            if v.is_zero() {
                return Err(MarkovError::InvalidParameters(format!("{name} must be nonzero")));
            }
        }
        let one = Rational::one();
        if q.abs() >= one {
            return Err(MarkovError::InvalidParameters(format!("q = {q} must satisfy |q| < 1")));
        }
        let t = c * d / (a * b * q);
        if t.abs() >= one {
            return Err(MarkovError::InvalidParameters(format!("t = cd/(abq) = {t} must satisfy |t| < 1")));
        }
        Ok(ThreePhiTwo {
            params: MarkovParams { a: a.clone(), b: b.clone(), c: c.clone(), d: d.clone(), q: q.clone(), t },
        })
    }

    pub fn from_markov(
        r: &Rational,
        r2: &Rational,
        s: &Rational,
        s2: &Rational,
        big_q: &Rational,
    ) -> Result<Self, MarkovError> {
        let m = markov_param_map(r, r2, s, s2, big_q)?;
        ThreePhiTwo::new(&m.a, &m.b, &m.c, &m.d, &m.q)
    }

    pub fn params(&self) -> &MarkovParams {
        &self.params
    }

    pub fn t(&self) -> &Rational {
        &self.params.t
    }

    fn cd_pochhammer(&self, n: u64) -> Result<Rational, MarkovError> {
        let p = &self.params;
        let mut acc = UnreducedProduct::new();
        q_pochhammer_into(&mut acc, &p.c, &p.q, n);
        q_pochhammer_into(&mut acc, &p.d, &p.q, n);
        let v = acc.finish();
        if v.is_zero() {
            return Err(MarkovError::Vanishing(format!("(c, d; q)_{n} with c = {}, d = {}, q = {}", p.c, p.d, p.q)));
        }
        Ok(v)
    }

    /// `(c/a, c/b, d/a, d/b; q)_x`.
    fn ratio_pochhammer(&self, x: u64) -> Rational {
        let p = &self.params;
        [(&p.c, &p.a), (&p.c, &p.b), (&p.d, &p.a), (&p.d, &p.b)]
            .into_iter()
            .map(|(u, v)| q_pochhammer(&(u / v), &p.q, x))
            .product()
    }

    pub fn f(&self, x: u64, z: u64) -> Result<Rational, MarkovError> {
        cap(x)?;
        cap(z)?;
        let p = &self.params;
        let den = self.cd_pochhammer(x + z)?;
        let mut acc = UnreducedProduct::new();
        q_pochhammer_into(&mut acc, &p.a, &p.q, z);
        q_pochhammer_into(&mut acc, &p.b, &p.q, z);
        acc.mul(&p.t.pow(z));
        acc.mul(&(&p.c * &p.d).pow(x));
        acc.mul(&p.q.pow(2 * z * x + x * x.saturating_sub(1)));
        acc.div(&den)?;
        Ok(acc.finish())
    }

    /// `A_x = (c/a, c/b, d/a, d/b; q)_x / (q^x (t;q)_{2x})`, so `A_0 = 1`.
    pub fn a_coef(&self, x: u64) -> Result<Rational, MarkovError> {
        cap(x)?;
        let p = &self.params;
        Ok(self.ratio_pochhammer(x) / (p.q.pow(x) * q_pochhammer(&p.t, &p.q, 2 * x)))
    }

    /// `B_x = A_x / (1 − t q^(2x))`.
    pub fn b_coef(&self, x: u64) -> Result<Rational, MarkovError> {
        Ok(self.a_coef(x)? * self.b_factor(x))
    }

    /// `C_x = A_x t q^(2x) ((c+d) q^x − (a+b)) / ((1 − t q^(2x))(1 − t q^(2x+1)))`.
    pub fn c_coef(&self, x: u64) -> Result<Rational, MarkovError> {
        Ok(self.a_coef(x)? * self.c_factor(x))
    }

    /// `M(x, z) = B_x + C_x q^z`.
    pub fn m(&self, x: u64, z: u64) -> Result<Rational, MarkovError> {
        cap(z)?;
        Ok(self.a_coef(x)? * (self.b_factor(x) + self.c_factor(x) * self.params.q.pow(z)))
    }

    fn b_factor(&self, x: u64) -> Rational {
        let p = &self.params;
        Rational::one() / (Rational::one() - &p.t * p.q.pow(2 * x))
    }

    fn c_factor(&self, x: u64) -> Rational {
        let p = &self.params;
        let one = Rational::one();
        let tq2 = &p.t * p.q.pow(2 * x);
        let lin = (&p.c + &p.d) * p.q.pow(x) - (&p.a + &p.b);
        let den = (&one - &tq2) * (&one - &tq2 * &p.q);
        tq2 * lin / den
    }

    /// `M(x, 0)` in closed form:
    /// `A_x (1 − t q^(2x)(a+b+q) + t q^(3x)(c+d)) / ((1 − t q^(2x))(1 − t q^(2x+1)))`.
    pub fn m0(&self, x: u64) -> Result<Rational, MarkovError> {
        let one = Rational::one();
        let p = &self.params;
        let tq2 = &p.t * p.q.pow(2 * x);
        let n = self.numerator_poly(x);
        Ok(self.a_coef(x)? * n / ((&one - &tq2) * (&one - &tq2 * &p.q)))
    }

    fn numerator_poly(&self, x: u64) -> Rational {
        let p = &self.params;
        Rational::one() - &p.t * p.q.pow(2 * x) * (&p.a + &p.b + &p.q) + &p.t * p.q.pow(3 * x) * (&p.c + &p.d)
    }

    /// Term of the transformed series:
    /// `(c/a, c/b, d/a, d/b; q)_x / (c, d; q)_x · (cd)^x q^(x(x−2)) · N(x) / (t;q)_{2x+2}`.
    pub fn v0(&self, x: u64) -> Result<Rational, MarkovError> {
        cap(x)?;
        let p = &self.params;
        let head = self.ratio_pochhammer(x) / self.cd_pochhammer(x)?;
        let pw = (&p.c * &p.d).pow(x) * p.q.powi(x as i64 * (x as i64 - 2))?;
        Ok(head * pw * self.numerator_poly(x) / q_pochhammer(&p.t, &p.q, 2 * x + 2))
    }

    pub fn extension(&self) -> TermExtension {
        let me = self.clone();
        let p = &self.params;
        let params = vec![
            ("a".to_string(), p.a.clone()),
            ("b".to_string(), p.b.clone()),
            ("c".to_string(), p.c.clone()),
            ("d".to_string(), p.d.clone()),
            ("q".to_string(), p.q.clone()),
        ];
        TermExtension::new("F", params, Arc::new(move |x, z| me.f(x, z)))
    }

    pub fn pair(&self) -> MarkovPair {
        let (mu, mv) = (self.clone(), self.clone());
        let u = GridFunction::new("U", Arc::new(move |x, z| Ok(mu.a_coef(x)? * mu.f(x, z)?)));
        let v = GridFunction::new("V", Arc::new(move |x, z| Ok(mv.m(x, z)? * mv.f(x, z)?)));
        MarkovPair::new(u, v, "markov-3phi2")
    }

    /// The original series as a basic hypergeometric spec.
    pub fn series_spec(&self) -> Result<BhgSpec, MarkovError> {
        let p = &self.params;
        Ok(BhgSpec::three_phi_two(&p.a, &p.b, &p.c, &p.d, &p.q)?)
    }

    /// `x ↦ V(x, 0)` as a term sequence.
    pub fn transformed_sequence(&self) -> TermSequence {
        let me = self.clone();
        let term: IndexFn = Arc::new(move |x| me.v0(x).map_err(|e| TermError::InvalidSpec(e.to_string())));
        TermSequence::from_terms(0, term)
    }

    /// `p0(x) = 1 − t q^(2x)`; the certificate's `P` is its negative.
    pub fn p0(&self, x: u64) -> Rational {
        Rational::one() - &self.params.t * self.params.q.pow(2 * x)
    }
}

/// Residuals of the four coefficient equations at `x` with the closed-form
/// multipliers substituted; all four vanish for valid parameters.
pub fn coefficient_residuals(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    q: &Rational,
    x: u64,
) -> Result<[Rational; 4], MarkovError> {
    let s = ThreePhiTwo::new(a, b, c, d, q)?;
    let (ax, ax1, bx, cx) = (s.a_coef(x)?, s.a_coef(x + 1)?, s.b_coef(x)?, s.c_coef(x)?);
    Ok(coefficient_residuals_with(s.params(), x, &ax, &ax1, &bx, &cx))
}

/// The four coefficient equations evaluated at arbitrary `A_x, A_{x+1}, B_x, C_x`.
pub fn coefficient_residuals_with(
    p: &MarkovParams,
    x: u64,
    ax: &Rational,
    ax1: &Rational,
    bx: &Rational,
    cx: &Rational,
) -> [Rational; 4] {
    let one = Rational::one();
    let (a, b, c, d, q, t) = (&p.a, &p.b, &p.c, &p.d, &p.q, &p.t);
    let qx = q.pow(x);
    let q2x = q.pow(2 * x);
    let cpd = c + d;
    let apb = a + b;
    let r0 = ax - bx * (&one - t * &q2x);
    let r1 = -(ax * &cpd * &qx) - (cx - bx * &cpd * &qx + bx * &apb * &q2x * t - cx * &q2x * q * t);
    let r2 = (ax - ax1) * c * d * &q2x - (bx * (c * d - a * b * t) * &q2x + cx * (&apb * &q2x * q * t - &cpd * &qx));
    let r3 = cx * (c * d * &q2x - a * b * &q2x * q * t);
    [r0, r1, r2, r3]
}
