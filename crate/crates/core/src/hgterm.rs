//! Hypergeometric and basic hypergeometric term algebra.
//!
//! Conventions: the base satisfies `|q| < 1`. The ordinary series carries the
//! implicit `n!` in its denominator; the basic series carries the implicit
//! `(q;q)_n` and the factor `((−1)^n q^(n(n−1)/2))^(1+s−r)`. An upper
//! parameter equal to `q` therefore cancels the implicit factorial, which is
//! how the `₃φ₂(a,b,1;c,d)` series is written with [`BhgSpec::three_phi_two`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, Rational, UnreducedProduct};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("denominator factor for parameter {parameter} vanishes at n = {index}")]
    VanishingDenominator { parameter: Rational, index: u64 },
    #[error("term {index} is zero, so the ratio to the next term is undefined")]
    ZeroTerm { index: u64 },
    #[error("index {index} lies before the first index {first}")]
    BeforeStart { index: u64, first: u64 },
    #[error("invalid parameters: {0}")]
    InvalidSpec(String),
    #[error("limit check restricted to integer parameters")]
    NonIntegerLimit,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `a (a+1) … (a+n−1)`; 1 for `n = 0`.
pub fn rising_factorial(a: &Rational, n: u64) -> Rational {
    let mut acc = UnreducedProduct::new();
    rising_factorial_into(&mut acc, a, n);
    acc.finish()
}

/// Multiplies `acc` by `(a)_n` without intermediate reduction: with
/// `a = α/δ`, factor `k` is `(α + kδ) / δ`.
pub fn rising_factorial_into(acc: &mut UnreducedProduct, a: &Rational, n: u64) {
    let delta = a.denom();
    let mut f = a.numer().clone();
    for _ in 0..n {
        acc.mul_parts(&f, delta);
        f += delta;
    }
}

/// `(1−a)(1−qa)…(1−q^(n−1)a)`; 1 for `n = 0`.
pub fn q_pochhammer(a: &Rational, q: &Rational, n: u64) -> Rational {
    let mut acc = UnreducedProduct::new();
    q_pochhammer_into(&mut acc, a, q, n);
    acc.finish()
}

/// Multiplies `acc` by `(a; q)_n` without intermediate reduction: with
/// `a = α/δ`, `q = κ/λ`, factor `k` is `(δλ^k − ακ^k) / (δλ^k)`.
pub fn q_pochhammer_into(acc: &mut UnreducedProduct, a: &Rational, q: &Rational, n: u64) {
    let (alpha, delta) = (a.numer(), a.denom());
    let (kappa, lambda) = (q.numer(), q.denom());
    let mut ak = alpha.clone();
    let mut dk = delta.clone();
    for _ in 0..n {
        acc.mul_parts(&(&dk - &ak), &dk);
        ak *= kappa;
        dk *= lambda;
    }
}

/// Parameters of `ᵣF_s(a₁…a_r; b₁…b_s; z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HgSpec {
    pub upper: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub z: Rational,
}

impl HgSpec {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>, z: Rational) -> Result<Self, TermError> {
        if let Some(b) = lower.iter().find(|b| b.is_nonpositive_integer()) {
            return Err(TermError::InvalidSpec(format!("lower parameter {b} is a non-positive integer")));
        }
        Ok(HgSpec { upper, lower, z })
    }

    /// True when term `n` is zero because an upper Pochhammer has hit zero
    /// (or the argument is zero).
    fn vanishes_at(&self, n: u64) -> bool {
        if n >= 1 && self.z.is_zero() {
            return true;
        }
        self.upper.iter().any(|a| a.is_nonpositive_integer() && a.to_i64().is_some_and(|k| (k.unsigned_abs()) < n))
    }
}

/// `(a₁…a_r)_n / (b₁…b_s, 1)_n · z^n`.
pub fn hg_term(spec: &HgSpec, n: u64) -> Result<Rational, TermError> {
    for b in &spec.lower {
        if let Some(k) = b.to_i64().filter(|k| *k <= 0) {
            if (k.unsigned_abs()) < n {
                return Err(TermError::VanishingDenominator { parameter: b.clone(), index: n });
            }
        }
    }
    let num: Rational = spec.upper.iter().map(|a| rising_factorial(a, n)).product();
    let den: Rational =
        spec.lower.iter().map(|b| rising_factorial(b, n)).product::<Rational>() * rising_factorial(&Rational::one(), n);
    Ok(num / den * spec.z.pow(n))
}

/// Parameters of `ᵣφ_s(a₁…a_r; b₁…b_s; q, z)` with `|q| < 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BhgSpec {
    pub upper: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub q: Rational,
    pub z: Rational,
}

impl BhgSpec {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>, q: Rational, z: Rational) -> Result<Self, TermError> {
        if q.is_zero() || q.abs() >= Rational::one() {
            return Err(TermError::InvalidSpec(format!("base q = {q} must satisfy 0 < |q| < 1")));
        }
        Ok(BhgSpec { upper, lower, q, z })
    }

    /// `Σ (a,b;q)_n/(c,d;q)_n · t^n` with `t = cd/(abq)`, written as a
    /// `₃φ₂` whose third upper parameter is `q` itself.
    pub fn three_phi_two(
        a: &Rational,
        b: &Rational,
        c: &Rational,
        d: &Rational,
        q: &Rational,
    ) -> Result<Self, TermError> {
        let t = (c * d).checked_div(&(a * b * q))?;
        BhgSpec::new(vec![a.clone(), b.clone(), q.clone()], vec![c.clone(), d.clone()], q.clone(), t)
    }

    /// Exponent `1 + s − r` of the quadratic-power correction.
    pub fn correction_exponent(&self) -> i64 {
        1 + self.lower.len() as i64 - self.upper.len() as i64
    }

    fn vanishes_at(&self, n: u64) -> bool {
        if n >= 1 && self.z.is_zero() {
            return true;
        }
        let one = Rational::one();
        self.upper.iter().any(|a| {
            let mut aq = a.clone();
            (0..n).any(|_| {
                let hit = aq == one;
                aq *= &self.q;
                hit
            })
        })
    }
}

/// Basic hypergeometric series term including the correction factor.
pub fn bhg_term(spec: &BhgSpec, n: u64) -> Result<Rational, TermError> {
    let one = Rational::one();
    for b in spec.lower.iter().chain(std::iter::once(&spec.q)) {
        let mut bq = b.clone();
        for k in 0..n {
            if bq == one {
                return Err(TermError::VanishingDenominator { parameter: b.clone(), index: k + 1 });
            }
            bq *= &spec.q;
        }
    }
    let num: Rational = spec.upper.iter().map(|a| q_pochhammer(a, &spec.q, n)).product();
    let den: Rational = spec.lower.iter().map(|b| q_pochhammer(b, &spec.q, n)).product::<Rational>()
        * q_pochhammer(&spec.q, &spec.q, n);
    let e = spec.correction_exponent();
    let sign = if n % 2 == 1 && e % 2 != 0 { -Rational::one() } else { Rational::one() };
    let tri = n * n.saturating_sub(1) / 2;
    let corr = spec.q.powi(tri as i64 * e)?;
    Ok(num / den * spec.z.pow(n) * sign * corr)
}

pub type IndexFn = Arc<dyn Fn(u64) -> Result<Rational, TermError> + Send + Sync>;

/// A series given term-by-term, with the consecutive-term ratio.
#[derive(Clone)]
pub struct TermSequence {
    first: u64,
    term: IndexFn,
    ratio: IndexFn,
}

impl fmt::Debug for TermSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TermSequence").field("first", &self.first).finish_non_exhaustive()
    }
}

impl TermSequence {
    pub fn new(first: u64, term: IndexFn, ratio: IndexFn) -> Self {
        TermSequence { first, term, ratio }
    }

    /// Sequence whose ratio is obtained by dividing consecutive terms.
    pub fn from_terms(first: u64, term: IndexFn) -> Self {
        let t = term.clone();
        let ratio: IndexFn = Arc::new(move |n| {
            let cur = t(n)?;
            if cur.is_zero() {
                return Err(TermError::ZeroTerm { index: n });
            }
            Ok(t(n + 1)? / cur)
        });
        TermSequence { first, term, ratio }
    }

    pub fn first_index(&self) -> u64 {
        self.first
    }

    pub fn term(&self, n: u64) -> Result<Rational, TermError> {
        if n < self.first {
            return Err(TermError::BeforeStart { index: n, first: self.first });
        }
        (self.term)(n)
    }

    /// `term(n+1) / term(n)`.
    pub fn ratio(&self, n: u64) -> Result<Rational, TermError> {
        if n < self.first {
            return Err(TermError::BeforeStart { index: n, first: self.first });
        }
        (self.ratio)(n)
    }

    /// Terms `start, start+1, …` (`count` of them) via running products,
    /// re-evaluating directly whenever a term is zero.
    pub fn terms(&self, start: u64, count: usize) -> Result<Vec<Rational>, TermError> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return Ok(out);
        }
        let mut cur = self.term(start)?;
        for i in 0..count {
            let n = start + i as u64;
            if i > 0 {
                cur = if cur.is_zero() { self.term(n)? } else { &cur * &self.ratio(n - 1)? };
            }
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Sum of the first `count` terms from the first index.
    pub fn partial_sum(&self, count: usize) -> Result<Rational, TermError> {
        Ok(self.terms(self.first, count)?.into_iter().sum())
    }
}

/// Either flavour of series specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesSpec {
    Basic(BhgSpec),
    Ordinary(HgSpec),
}

/// Term sequence for a spec, with the ratio in closed form from parameter shifts.
pub fn term_sequence(spec: &SeriesSpec) -> TermSequence {
    match spec {
        SeriesSpec::Ordinary(s) => {
            let ts = s.clone();
            let rs = s.clone();
            TermSequence::new(
                0,
                Arc::new(move |n| hg_term(&ts, n)),
                Arc::new(move |n| {
                    if rs.vanishes_at(n) {
                        return Err(TermError::ZeroTerm { index: n });
                    }
                    let nn = Rational::from(n);
                    let mut den = &nn + &Rational::one();
                    for b in &rs.lower {
                        let f = b + &nn;
                        if f.is_zero() {
                            return Err(TermError::VanishingDenominator { parameter: b.clone(), index: n + 1 });
                        }
                        den *= f;
                    }
                    let num: Rational = rs.upper.iter().map(|a| a + &nn).product();
                    Ok(num / den * &rs.z)
                }),
            )
        }
        SeriesSpec::Basic(s) => {
            let ts = s.clone();
            let rs = s.clone();
            TermSequence::new(
                0,
                Arc::new(move |n| bhg_term(&ts, n)),
                Arc::new(move |n| {
                    if rs.vanishes_at(n) {
                        return Err(TermError::ZeroTerm { index: n });
                    }
                    let one = Rational::one();
                    let qn = rs.q.pow(n);
                    let mut den = &one - &(&qn * &rs.q);
                    for b in &rs.lower {
                        let f = &one - &(b * &qn);
                        if f.is_zero() {
                            return Err(TermError::VanishingDenominator { parameter: b.clone(), index: n + 1 });
                        }
                        den *= f;
                    }
                    let num: Rational = rs.upper.iter().map(|a| &one - &(a * &qn)).product();
                    let corr = (-&qn).powi(rs.correction_exponent())?;
                    Ok(num / den * &rs.z * corr)
                }),
            )
        }
    }
}

/// `(q^a;q)_n / (q^b;q)_n` at each `q` of the sequence, for integer `a`, `b`.
///
/// As `q → 1` the values approach `(a)_n / (b)_n`.
pub fn q_limit_check(a: &Rational, b: &Rational, n: u64, q_sequence: &[Rational]) -> Result<Vec<Rational>, TermError> {
    let (Some(ai), Some(bi)) = (a.to_i64(), b.to_i64()) else {
        return Err(TermError::NonIntegerLimit);
    };
    if bi <= 0 && (bi.unsigned_abs()) < n {
        return Err(TermError::VanishingDenominator { parameter: b.clone(), index: n });
    }
    q_sequence
        .iter()
        .map(|q| {
            if !q.is_positive() || q >= &Rational::one() {
                return Err(TermError::InvalidSpec(format!("q = {q} must lie in (0, 1)")));
            }
            let num = q_pochhammer(&q.powi(ai)?, q, n);
            let den = q_pochhammer(&q.powi(bi)?, q, n);
            Ok(num.checked_div(&den)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn rising_factorial_examples() {
        assert_eq!(rising_factorial(&r(3), 4), r(360));
        assert_eq!(rising_factorial(&rat(7, 3), 0), r(1));
        assert_eq!(rising_factorial(&r(1), 5), r(120));
        assert_eq!(rising_factorial(&r(-2), 3), r(0));
    }

    #[test]
    fn q_pochhammer_examples() {
        assert_eq!(q_pochhammer(&rat(1, 2), &rat(1, 3), 0), r(1));
        assert_eq!(q_pochhammer(&rat(1, 2), &rat(1, 3), 2), rat(5, 12));
        assert_eq!(q_pochhammer(&rat(1, 2), &rat(1, 2), 3), rat(21, 64));
    }

    #[test]
    fn hg_term_examples() {
        let s = HgSpec::new(vec![r(1), r(1), r(1)], vec![r(2), r(2)], r(1)).unwrap();
        assert_eq!(hg_term(&s, 0).unwrap(), r(1));
        // (1)_2^3 / ((2)_2^2 · 2!) = 8/72
        assert_eq!(hg_term(&s, 2).unwrap(), rat(1, 9));
        let g = HgSpec::new(vec![r(1)], vec![], rat(1, 2)).unwrap();
        assert_eq!(hg_term(&g, 3).unwrap(), rat(1, 8));
    }

    #[test]
    fn hg_spec_rejects_poles() {
        assert!(HgSpec::new(vec![r(1)], vec![r(-2)], r(1)).is_err());
        let bad = HgSpec { upper: vec![r(1)], lower: vec![r(-1)], z: r(1) };
        assert!(hg_term(&bad, 1).is_ok());
        assert_eq!(hg_term(&bad, 3), Err(TermError::VanishingDenominator { parameter: r(-1), index: 3 }));
    }

    #[test]
    fn bhg_term_examples() {
        let s = BhgSpec::new(vec![rat(1, 3)], vec![rat(1, 7), rat(1, 5)], rat(1, 2), rat(3, 4)).unwrap();
        assert_eq!(bhg_term(&s, 0).unwrap(), r(1));

        // ₃φ₂ from the worked example: n = 1 term.
        let tp = BhgSpec::three_phi_two(&rat(1, 3), &rat(1, 5), &rat(1, 7), &rat(1, 11), &rat(1, 2)).unwrap();
        assert_eq!(tp.z, rat(30, 77));
        assert_eq!(tp.correction_exponent(), 0);
        let expected =
            (r(1) - rat(1, 3)) * (r(1) - rat(1, 5)) / ((r(1) - rat(1, 7)) * (r(1) - rat(1, 11))) * rat(30, 77);
        assert_eq!(bhg_term(&tp, 1).unwrap(), expected);

        // A literal upper 1 truncates the series under the (a;q)_n convention.
        let trunc = BhgSpec::new(vec![rat(1, 3), rat(1, 5), r(1)], vec![rat(1, 7), rat(1, 11)], rat(1, 2), rat(30, 77))
            .unwrap();
        for n in 1..6 {
            assert_eq!(bhg_term(&trunc, n).unwrap(), r(0));
        }
    }

    #[test]
    fn bhg_correction_factor() {
        // ₁φ₁: exponent 1, factor (−1)^n q^(n(n−1)/2).
        let s = BhgSpec::new(vec![rat(1, 3)], vec![rat(1, 5)], rat(1, 2), r(1)).unwrap();
        assert_eq!(s.correction_exponent(), 1);
        let q = rat(1, 2);
        let base = q_pochhammer(&rat(1, 3), &q, 2) / (q_pochhammer(&rat(1, 5), &q, 2) * q_pochhammer(&q, &q, 2));
        assert_eq!(bhg_term(&s, 2).unwrap(), base * &q);
    }

    #[test]
    fn bhg_spec_rejects_large_base() {
        assert!(BhgSpec::new(vec![], vec![], r(2), r(1)).is_err());
        assert!(BhgSpec::new(vec![], vec![], r(0), r(1)).is_err());
    }

    #[test]
    fn sequence_ratio_geometric() {
        let seq = term_sequence(&SeriesSpec::Ordinary(HgSpec::new(vec![r(1)], vec![], rat(1, 2)).unwrap()));
        for n in 0..10 {
            assert_eq!(seq.ratio(n).unwrap(), rat(1, 2));
        }
    }

    #[test]
    fn sequence_ratio_consistent_with_terms() {
        let hg =
            term_sequence(&SeriesSpec::Ordinary(HgSpec::new(vec![r(1), r(1), r(1)], vec![r(2), r(2)], r(1)).unwrap()));
        let bhg = term_sequence(&SeriesSpec::Basic(
            BhgSpec::new(vec![rat(1, 3), rat(-2, 5)], vec![rat(3, 7)], rat(-1, 2), rat(5, 3)).unwrap(),
        ));
        for seq in [hg, bhg] {
            for n in 0..=50 {
                assert_eq!(seq.term(n + 1).unwrap(), seq.term(n).unwrap() * seq.ratio(n).unwrap(), "n = {n}");
            }
            let direct: Vec<_> = (0..20).map(|n| seq.term(n).unwrap()).collect();
            assert_eq!(seq.terms(0, 20).unwrap(), direct);
        }
    }

    #[test]
    fn sequence_ratio_undefined_after_zero_term() {
        let seq = term_sequence(&SeriesSpec::Ordinary(HgSpec::new(vec![r(-2)], vec![r(1)], r(1)).unwrap()));
        assert_eq!(seq.term(3).unwrap(), r(0));
        assert!(seq.ratio(2).is_ok());
        assert_eq!(seq.ratio(3), Err(TermError::ZeroTerm { index: 3 }));
        // running products fall back to direct evaluation past the zero
        assert_eq!(seq.terms(0, 6).unwrap()[5], r(0));
    }

    #[test]
    fn q_limit_approaches_ordinary_ratio() {
        let qs = [rat(9, 10), rat(99, 100), rat(999, 1000)];
        let vals = q_limit_check(&r(2), &r(3), 1, &qs).unwrap();
        // (1 − q²)/(1 − q³) at q = 9/10 is 190/271
        assert_eq!(vals[0], rat(190, 271));
        let target = rat(2, 3);
        let errs: Vec<_> = vals.iter().map(|v| (v - &target).abs()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[2] < rat(1, 1000));

        assert!(q_limit_check(&r(4), &r(4), 3, &qs).unwrap().iter().all(|v| v == &r(1)));
        assert!(q_limit_check(&r(4), &r(7), 0, &qs).unwrap().iter().all(|v| v == &r(1)));
        assert_eq!(q_limit_check(&rat(1, 2), &r(3), 2, &qs), Err(TermError::NonIntegerLimit));
    }
}
