//! The limiting case `q → 1` of the `₃φ₂` transformation: an accelerated
//! series for `₃F₂(a, b, 1; c, d; 1)` with terms decaying like `4^-x`.

use std::sync::Arc;

use serde::Serialize;

use super::MarkovError;
use crate::exact::{Poly, Rational};
use crate::hgterm::{rising_factorial, IndexFn, TermError, TermSequence};

/// Parameters `a, b, c, d` with `t = c + d − a − b − 1 > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchellbachParams {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub t: Rational,
}

impl SchellbachParams {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self, MarkovError> {
        let t = &c + &d - &a - &b - Rational::one();
        if !t.is_positive() {
            return Err(MarkovError::InvalidParameters(format!("t = c + d − a − b − 1 = {t} must be positive")));
        }
        for (name, v) in [
            ("c", c.clone()),
            ("d", d.clone()),
            ("c − a", &c - &a),
            ("c − b", &c - &b),
            ("d − a", &d - &a),
            ("d − b", &d - &b),
        ] {
            if v.is_nonpositive_integer() {
                return Err(MarkovError::InvalidParameters(format!("{name} = {v} is a nonpositive integer")));
            }
        }
        Ok(SchellbachParams { a, b, c, d, t })
    }

    /// `p(x) = (c+d−a−1+2x)(c+d−b−1+2x) − (c−1+x)(d−1+x)`.
    pub fn p_poly(&self) -> Poly {
        let one = Rational::one();
        let two = Rational::from(2);
        let cd = &self.c + &self.d - &one;
        let f1 = Poly::linear(&cd - &self.a, two.clone());
        let f2 = Poly::linear(&cd - &self.b, two);
        let g1 = Poly::x_plus(&self.c - &one);
        let g2 = Poly::x_plus(&self.d - &one);
        &(&f1 * &f2) - &(&g1 * &g2)
    }

    /// Numerator and denominator of `term(x+1)/term(x)` as polynomials in `x`:
    /// `(c−a+x)(c−b+x)(d−a+x)(d−b+x) p(x+1)` over
    /// `(c+x)(d+x)(t+2x+2)(t+2x+3) p(x)`.
    pub fn ratio_polys(&self) -> (Poly, Poly) {
        let p = self.p_poly();
        let one = Rational::one();
        let two = Rational::from(2);
        let num = [&self.c - &self.a, &self.c - &self.b, &self.d - &self.a, &self.d - &self.b]
            .into_iter()
            .fold(p.shift(&one), |acc, s| &acc * &Poly::x_plus(s));
        let den = [
            Poly::x_plus(self.c.clone()),
            Poly::x_plus(self.d.clone()),
            Poly::linear(&self.t + &two, two.clone()),
            Poly::linear(&self.t + Rational::from(3), two),
        ]
        .iter()
        .fold(p, |acc, f| &acc * f);
        (num, den)
    }

    /// The direct series `₃F₂(a, b, 1; c, d; 1)`, term `(a)_n (b)_n / ((c)_n (d)_n)`.
    pub fn direct_sequence(&self) -> TermSequence {
        let (a, b, c, d) = (self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone());
        let (a2, b2, c2, d2) = (a.clone(), b.clone(), c.clone(), d.clone());
        let term: IndexFn = Arc::new(move |n| {
            Ok(rising_factorial(&a, n) * rising_factorial(&b, n) / (rising_factorial(&c, n) * rising_factorial(&d, n)))
        });
        let ratio: IndexFn = Arc::new(move |n| {
            let n = Rational::from(n);
            let num = (&a2 + &n) * (&b2 + &n);
            if num.is_zero() {
                return Err(TermError::ZeroTerm { index: 0 });
            }
            Ok(num / ((&c2 + &n) * (&d2 + &n)))
        });
        TermSequence::new(0, term, ratio)
    }

    /// The transformed series, `x ↦ schellbach_term(self, x)`.
    pub fn sequence(&self) -> TermSequence {
        let (me, me2) = (self.clone(), self.clone());
        let (num, den) = self.ratio_polys();
        let term: IndexFn =
            Arc::new(move |x| schellbach_term(&me, x).map_err(|e| TermError::InvalidSpec(e.to_string())));
        let ratio: IndexFn = Arc::new(move |x| {
            let xr = Rational::from(x);
            let d = den.eval(&xr);
            if d.is_zero() {
                // Zero term or a vanishing factor: fall back to the quotient.
                let t0 = schellbach_term(&me2, x).map_err(|e| TermError::InvalidSpec(e.to_string()))?;
                if t0.is_zero() {
                    return Err(TermError::ZeroTerm { index: x });
                }
                let t1 = schellbach_term(&me2, x + 1).map_err(|e| TermError::InvalidSpec(e.to_string()))?;
                return Ok(t1 / t0);
            }
            Ok(num.eval(&xr) / d)
        });
        TermSequence::new(0, term, ratio)
    }
}

/// `(c−a, c−b, d−a, d−b)_x p(x) / ((c, d)_x (t)_{2x+2})`.
pub fn schellbach_term(p: &SchellbachParams, x: u64) -> Result<Rational, MarkovError> {
    let num = [&p.c - &p.a, &p.c - &p.b, &p.d - &p.a, &p.d - &p.b]
        .iter()
        .map(|s| rising_factorial(s, x))
        .product::<Rational>()
        * p.p_poly().eval(&Rational::from(x));
    let den = rising_factorial(&p.c, x) * rising_factorial(&p.d, x) * rising_factorial(&p.t, 2 * x + 2);
    if den.is_zero() {
        return Err(MarkovError::Vanishing(format!("(c, d)_{x} (t)_{}", 2 * x + 2)));
    }
    Ok(num / den)
}

/// `term(x) · 4^x · x^(a+b−1/2)` in floating point, for checking that the
/// terms follow the predicted power law. Not an exact quantity.
pub fn schellbach_asymptotics(p: &SchellbachParams, x: u64) -> Result<f64, MarkovError> {
    if x < 2 {
        return Err(MarkovError::InvalidParameters("asymptotic diagnostic needs x ≥ 2".into()));
    }
    let term = schellbach_term(p, x)?;
    let sign = f64::from(term.signum());
    let expo = (&p.a + &p.b).to_f64() - 0.5;
    let xf = x as f64;
    Ok(sign * (term.ln_abs() + xf * 4f64.ln() + expo * xf.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn basel() -> SchellbachParams {
        SchellbachParams::new(rat(1, 1), rat(1, 1), rat(2, 1), rat(2, 1)).unwrap()
    }

    #[test]
    fn first_terms() {
        let p = basel();
        assert_eq!(p.t, Rational::one());
        assert_eq!(schellbach_term(&p, 0).unwrap(), rat(3, 2));
        assert_eq!(schellbach_term(&p, 1).unwrap(), rat(1, 8));
        let s: Rational = (0..=3).map(|x| schellbach_term(&p, x).unwrap()).sum();
        assert_eq!(s, rat(3, 2) + rat(1, 8) + rat(1, 60) + rat(3 * 36, 40320));
    }

    #[test]
    fn reduces_to_factorial_form() {
        // 3 x!² / (2x+2)!
        let p = basel();
        let mut fact = vec![Rational::one()];
        for k in 1..=42u64 {
            fact.push(&fact[k as usize - 1] * Rational::from(k));
        }
        for x in 0..20usize {
            let expect = Rational::from(3) * &fact[x] * &fact[x] / &fact[2 * x + 2];
            assert_eq!(schellbach_term(&p, x as u64).unwrap(), expect);
        }
    }

    #[test]
    fn closed_ratio_matches_quotient() {
        let p = SchellbachParams::new(rat(1, 3), rat(2, 5), rat(7, 4), rat(9, 5)).unwrap();
        let seq = p.sequence();
        for x in 0..15 {
            let q = schellbach_term(&p, x + 1).unwrap() / schellbach_term(&p, x).unwrap();
            assert_eq!(seq.ratio(x).unwrap(), q);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SchellbachParams::new(rat(1, 1), rat(1, 1), rat(3, 2), rat(3, 2)).is_err());
        assert!(SchellbachParams::new(rat(1, 1), rat(1, 1), rat(-2, 1), rat(6, 1)).is_err());
        assert!(SchellbachParams::new(rat(3, 1), rat(1, 2), rat(3, 1), rat(5, 2)).is_err());
    }

    #[test]
    fn power_law_flattens() {
        let p = basel();
        let r: Vec<f64> = [8, 16, 32].iter().map(|&x| schellbach_asymptotics(&p, x).unwrap()).collect();
        // Each doubling moves the value by less than 10%, and by less each time.
        let steps: Vec<f64> = r.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).collect();
        assert!(steps.iter().all(|&s| s < 0.1), "{r:?}");
        assert!(steps[1] < steps[0], "{r:?}");
        assert!(schellbach_asymptotics(&p, 1).is_err());
    }
}
