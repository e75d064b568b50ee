//! Certified tail bounds.
//!
//! Every bound here is proved for all indices past a threshold, not merely
//! observed on a prefix: rational-function conditions are reduced to
//! polynomial inequalities on a ray and checked by Taylor shifting.

use serde::Serialize;

use crate::exact::{Poly, Rational};
use crate::hgterm::rising_factorial;

/// `term(n+1)/term(n) ∈ [lower, upper]` for every `n ≥ valid_from`.
///
/// Either `max(|lower|, |upper|) < 1`, or the ratio is confined to
/// `[−1, 0]` (alternating terms of non-increasing magnitude).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioBound {
    pub lower: Rational,
    pub upper: Rational,
    pub valid_from: u64,
}

impl RatioBound {
    pub fn rho(&self) -> Rational {
        std::cmp::max(self.lower.abs(), self.upper.abs())
    }

    /// True when `ρ < 1`, so the tail decays geometrically.
    pub fn is_geometric(&self) -> bool {
        self.rho() < Rational::one()
    }

    /// Range of `tail / term(N+1)`, where `tail = Σ_{n>N} term(n)` and
    /// `N + 1 ≥ valid_from`.
    ///
    /// * ratios in `[0, ρ]`: `[1, 1/(1−ρ)]`;
    /// * ratios in `[−ρ, 0]`: `[1−ρ, 1]` (tail has the sign of its first term
    ///   and at most its size);
    /// * otherwise: `1 ± ρ/(1−ρ)`.
    pub fn tail_factor(&self) -> (Rational, Rational) {
        let one = Rational::one();
        let rho = self.rho();
        if !self.upper.is_positive() {
            return (&one - &rho, one);
        }
        let spread = &rho / (&one - &rho);
        if !self.lower.is_negative() {
            (one.clone(), &one + &spread)
        } else {
            (&one - &spread, &one + &spread)
        }
    }
}

/// Tries to prove `P(n)/Q(n) ∈ [lower, upper]` for real `n ≥ n0`, for the
/// sign classes `[0, ρ]`, `[−ρ, 0]`, `[−ρ, ρ]` in that order.
pub fn certify_ratio_at(p: &Poly, q: &Poly, rho: &Rational, n0: u64) -> Option<RatioBound> {
    let x0 = Rational::from(n0);
    let (p, q) = if q.positive_from(&x0) {
        (p.clone(), q.clone())
    } else if (-q).positive_from(&x0) {
        (-p, -q)
    } else {
        return None;
    };
    let rq = q.scale(rho);
    let above_neg_rho = (&p + &rq).nonnegative_from(&x0);
    let below_rho = (&rq - &p).nonnegative_from(&x0);
    let zero = Rational::zero();
    let bound = |lower: Rational, upper: Rational| Some(RatioBound { lower, upper, valid_from: n0 });
    if p.nonnegative_from(&x0) && below_rho {
        bound(zero, rho.clone())
    } else if (-&p).nonnegative_from(&x0) && above_neg_rho {
        bound(-rho, zero)
    } else if above_neg_rho && below_rho {
        bound(-rho, rho.clone())
    } else {
        None
    }
}

/// Smallest threshold in `first..=max_n0` at which the first workable `ρ`
/// from `rhos` is certified.
pub fn certify_ratio(p: &Poly, q: &Poly, rhos: &[Rational], first: u64, max_n0: u64) -> Option<RatioBound> {
    // A sign class that holds from n0 holds from any later threshold.
    rhos.iter().find_map(|rho| {
        let n0 = first_true_from(first, max_n0, |n0| certify_ratio_at(p, q, rho, n0).is_some())?;
        certify_ratio_at(p, q, rho, n0)
    })
}

/// Ratio of a basic hypergeometric-type sequence written in `w = q^n`:
/// `term(n+1)/term(n) = c · w^k · P(w) / Q(w)`.
#[derive(Debug, Clone)]
pub struct QRatio {
    pub c: Rational,
    pub k: u32,
    pub p: Poly,
    pub q_poly: Poly,
    pub base: Rational,
}

impl QRatio {
    pub fn eval(&self, n: u64) -> Option<Rational> {
        let w = self.base.pow(n);
        let den = self.q_poly.eval(&w);
        if den.is_zero() {
            return None;
        }
        Some(&self.c * w.pow(u64::from(self.k)) * self.p.eval(&w) / den)
    }

    /// Bound valid for `n ≥ n0`, using `|q^n| ≤ r = |q|^n0`. `None` if `Q`
    /// may vanish on the disc or the bound exceeds `target`.
    pub fn certify_at(&self, n0: u64, target: &Rational) -> Option<RatioBound> {
        let r = self.base.abs().pow(n0);
        let qmin = self.q_poly.min_abs_on_disc(&r);
        if !qmin.is_positive() {
            return None;
        }
        let rho = self.c.abs() * r.pow(u64::from(self.k)) * self.p.abs_bound_on_disc(&r) / qmin;
        if &rho > target {
            return None;
        }
        // P and Q keep the sign of their constant terms on the disc when they
        // do not vanish there; w^k is positive when q > 0 or k is even.
        let p_fixed = self.p.min_abs_on_disc(&r).is_positive();
        let w_fixed = self.base.is_positive() || self.k.is_multiple_of(2);
        let bound = if p_fixed && w_fixed {
            let s = self.c.signum() * self.p.coeffs()[0].signum() * self.q_poly.coeffs()[0].signum();
            if s > 0 {
                RatioBound { lower: Rational::zero(), upper: rho, valid_from: n0 }
            } else {
                RatioBound { lower: -rho, upper: Rational::zero(), valid_from: n0 }
            }
        } else {
            RatioBound { lower: -rho.clone(), upper: rho, valid_from: n0 }
        };
        Some(bound)
    }

    /// Smallest `n0 ≥ first` (up to `max_n0`) certifying `ρ ≤ (|limit| + 1)/2`,
    /// the limit being the ratio at `w = 0`.
    pub fn certify(&self, first: u64, max_n0: u64) -> Option<RatioBound> {
        let limit = if self.k == 0 {
            self.c.abs() * self.p.eval(&Rational::zero()).abs() / self.q_poly.eval(&Rational::zero()).abs()
        } else {
            Rational::zero()
        };
        let target = (limit + Rational::one()) / Rational::from(2);
        (first..=max_n0).find_map(|n0| self.certify_at(n0, &target))
    }
}

/// Proves `n − (n+1)·P(n)/Q(n) ≥ τ` for `n ≥ n0` with `Q > 0` there, which
/// for positive terms with `n·term(n) → 0` gives
/// `Σ_{n≥m} term(n) ≤ m·term(m)/τ` for `m ≥ n0`.
pub fn certify_raabe(p: &Poly, q: &Poly, tau: &Rational, first: u64, max_n0: u64) -> Option<u64> {
    let x = Poly::monomial(Rational::one(), 1);
    let x1 = Poly::x_plus(Rational::one());
    let lhs = &(&(&x * q) - &(&x1 * p)) - &q.scale(tau);
    first_true_from(first, max_n0, |n0| {
        let x0 = Rational::from(n0);
        q.positive_from(&x0) && p.nonnegative_from(&x0) && lhs.nonnegative_from(&x0)
    })
}

/// Smallest `n` in `first..=last` with `holds(n)`, for a predicate that
/// stays true once it is true: gallop up, then bisect.
fn first_true_from(first: u64, last: u64, holds: impl Fn(u64) -> bool) -> Option<u64> {
    if first > last {
        return None;
    }
    if holds(first) {
        return Some(first);
    }
    // Invariant: !holds(lo).
    let (mut lo, mut step) = (first, 1u64);
    let mut hi = loop {
        let next = lo.saturating_add(step).min(last);
        if holds(next) {
            break next;
        }
        if next == last {
            return None;
        }
        lo = next;
        step = step.saturating_mul(2);
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

const BERNOULLI: [(i64, i64); 6] = [(1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730)];

/// `(exponent e, coefficient c)` pairs of `g_m(x) = Σ c x^(−e)`, the
/// Euler–Maclaurin approximation to `Σ_{k≥0} (x+k)^(−s)` truncated after
/// the `B_{2m}` term.
fn em_terms(s: u32, m: usize) -> Vec<(u32, Rational)> {
    let sr = Rational::from(s);
    let mut out = vec![(s - 1, Rational::one() / Rational::from(s - 1)), (s, Rational::new(1, 2).unwrap())];
    let mut fact = Rational::one();
    for k in 1..=m {
        let kk = 2 * k as u64;
        fact *= Rational::from(kk - 1) * Rational::from(kk);
        let (bn, bd) = BERNOULLI[k - 1];
        let coef = Rational::new(bn, bd).unwrap() / &fact * rising_factorial(&sr, kk - 1);
        out.push((s + 2 * k as u32 - 1, coef));
    }
    out
}

fn em_eval(s: u32, m: usize, x: &Rational) -> Rational {
    em_terms(s, m).into_iter().map(|(e, c)| c * x.powi(-i64::from(e)).expect("x > 0")).sum()
}

/// `(g_m(x) − g_m(x+1) − x^(−s)) · x^J (x+1)^J` as a polynomial.
fn em_defect_poly(s: u32, m: usize) -> Poly {
    let terms = em_terms(s, m);
    let j = terms.iter().map(|(e, _)| *e).max().unwrap().max(s);
    let x = Poly::monomial(Rational::one(), 1);
    let x1 = Poly::x_plus(Rational::one());
    let mut acc = -(&x.pow(j - s) * &x1.pow(j));
    for (e, c) in terms {
        let here = &x.pow(j - e) * &x1.pow(j);
        let next = &x.pow(j) * &x1.pow(j - e);
        acc = &acc + &(&here - &next).scale(&c);
    }
    acc
}

/// Two-sided enclosure of `Σ_{k≥0} (x+k)^(−s)` for `x ≥ 1`, `s ∈ {2, 3, …}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerMaclaurin {
    pub s: u32,
    pub upper_order: usize,
    pub lower_order: usize,
}

impl EulerMaclaurin {
    /// Orders 5 (upper) and 6 (lower), after checking that the defects have
    /// the required signs on `[1, ∞)`; `None` if either check fails.
    pub fn certified(s: u32) -> Option<Self> {
        if s < 2 {
            return None;
        }
        let one = Rational::one();
        let upper_ok = em_defect_poly(s, 5).nonnegative_from(&one);
        let lower_ok = (-em_defect_poly(s, 6)).nonnegative_from(&one);
        (upper_ok && lower_ok).then_some(EulerMaclaurin { s, upper_order: 5, lower_order: 6 })
    }

    /// `[g_6(x), g_5(x)]`; requires `x ≥ 1`.
    pub fn enclose(&self, x: &Rational) -> (Rational, Rational) {
        (em_eval(self.s, self.lower_order, x), em_eval(self.s, self.upper_order, x))
    }
}

/// Integral comparison for `Σ_{k≥0} (x+k)^(−s)`, `x > 1`:
/// `[x^(1−s)/(s−1), (x−1)^(1−s)/(s−1)]`.
pub fn integral_enclosure(s: u32, x: &Rational) -> (Rational, Rational) {
    let k = Rational::from(s - 1);
    let one = Rational::one();
    let e = 1 - i64::from(s);
    let lo = x.powi(e).expect("x > 0") / &k;
    let hi = (x - &one).powi(e).expect("x > 1") / &k;
    (lo, hi)
}
