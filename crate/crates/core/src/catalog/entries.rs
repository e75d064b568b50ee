//! The registered series.

use std::sync::Arc;

use num_bigint::BigInt;

use super::bounds::{certify_raabe, certify_ratio, EulerMaclaurin, QRatio, RatioBound};
use super::{CatalogError, DirectTail, FormulaEntry, TailBound};
use crate::exact::{Poly, Rational};
use crate::hgterm::{rising_factorial, term_sequence, IndexFn, SeriesSpec, TermError, TermSequence};
use crate::markov::{SchellbachParams, ThreePhiTwo};

/// Largest index used for ratio checks and threshold searches at registration.
pub const CHECK_LIMIT: u64 = 64;
/// q-series terms shrink like `q^(n²)` and their rationals grow quickly, so
/// the prefix check stops earlier.
const Q_CHECK_LIMIT: u64 = 24;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

fn p(cs: &[i64]) -> Poly {
    Poly::new(cs.iter().map(|&c| Rational::from(c)).collect())
}

fn prod(ps: &[Poly]) -> Poly {
    ps.iter().fold(Poly::one(), |a, b| &a * b)
}

fn sign(n: u64) -> Rational {
    if n.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn factorial(n: u64) -> Rational {
    (1..=n).map(Rational::from).product()
}

/// `1·3·5·…·(2m−1)`.
fn odd_double_factorial(m: u64) -> Rational {
    (0..m).map(|k| Rational::from(2 * k + 1)).product()
}

/// Closed-form ratio from polynomials, falling back to term division where
/// the denominator vanishes.
fn poly_ratio(term: IndexFn, num: Poly, den: Poly) -> IndexFn {
    Arc::new(move |n| {
        let x = Rational::from(n);
        let d = den.eval(&x);
        if d.is_zero() {
            let t0 = term(n)?;
            if t0.is_zero() {
                return Err(TermError::ZeroTerm { index: n });
            }
            return Ok(term(n + 1)? / t0);
        }
        Ok(num.eval(&x) / d)
    })
}

/// Checks the closed ratio against term quotients on `first..=limit`
/// and that `|term(n+1)| ≤ ρ |term(n)|` from the bound's threshold.
fn verify_prefix(id: &str, seq: &TermSequence, bound: Option<&RatioBound>, limit: u64) -> Result<(), CatalogError> {
    let first = seq.first_index();
    let terms = seq.terms(first, (limit - first + 2) as usize)?;
    for (i, w) in terms.windows(2).enumerate() {
        let n = first + i as u64;
        if !w[0].is_zero() {
            let next = seq.term(n + 1)?;
            if seq.ratio(n)? * &w[0] != next {
                return Err(CatalogError::Registration(format!("{id}: closed ratio disagrees with terms at n = {n}")));
            }
            if next != w[1] {
                return Err(CatalogError::Registration(format!("{id}: running product drifted at n = {}", n + 1)));
            }
        }
        if let Some(b) = bound {
            if n >= b.valid_from && w[1].abs() > b.rho() * w[0].abs() {
                return Err(CatalogError::Registration(format!("{id}: |term(n+1)| > ρ|term(n)| at n = {n}")));
            }
        }
    }
    Ok(())
}

struct HgEntry<'a> {
    id: String,
    constant: String,
    description: String,
    first: u64,
    offset: Rational,
    term: IndexFn,
    num: Poly,
    den: Poly,
    rhos: &'a [Rational],
}

fn register_hg(e: HgEntry<'_>) -> Result<FormulaEntry, CatalogError> {
    let ratio = poly_ratio(e.term.clone(), e.num.clone(), e.den.clone());
    let terms = TermSequence::new(e.first, e.term, ratio);
    let bound = certify_ratio(&e.num, &e.den, e.rhos, e.first, CHECK_LIMIT)
        .ok_or_else(|| CatalogError::Registration(format!("{}: no ratio bound could be certified", e.id)))?;
    verify_prefix(&e.id, &terms, Some(&bound), CHECK_LIMIT)?;
    Ok(FormulaEntry {
        id: e.id,
        constant: e.constant,
        description: e.description,
        terms,
        offset: e.offset,
        tail: TailBound::Ratio(bound),
        scan_cap: 100_000,
    })
}

/// `ζ(3) = (5/2) Σ_{n≥1} (−1)^(n−1) / (C(2n, n) n³)`.
pub fn entry_apery() -> FormulaEntry {
    let term: IndexFn = Arc::new(|n| {
        let binom = Rational::from(num_integer::binomial(BigInt::from(2 * n), BigInt::from(n)));
        Ok(r(5, 2) * sign(n - 1) / (binom * Rational::from(n).pow(3)))
    });
    register_hg(HgEntry {
        id: "apery".into(),
        constant: "zeta3".into(),
        description: "ζ(3) = (5/2) Σ_{n≥1} (−1)^(n−1) / (C(2n,n) n³)".into(),
        first: 1,
        offset: Rational::zero(),
        term,
        num: -p(&[0, 0, 0, 1]),
        den: prod(&[p(&[2]), p(&[1, 2]), p(&[1, 1]), p(&[1, 1])]),
        rhos: &[r(1, 4)],
    })
    .expect("built-in entry registers")
}

fn hurwitz_poly(a: &Rational) -> Poly {
    // 5(n+1)² + 6(a−1)(n+1) + 2(a−1)²
    let am1 = a - Rational::one();
    let n1 = Poly::x_plus(Rational::one());
    &(&(&n1 * &n1).scale(&Rational::from(5)) + &n1.scale(&(Rational::from(6) * &am1)))
        + &Poly::constant(Rational::from(2) * &am1 * &am1)
}

/// `ζ(3, a) = Σ_{n≥0} (a+n)^(−3) = (1/4) Σ_{n≥0} (−1)^n n!⁶/(2n+1)! ·
/// [5(n+1)² + 6(a−1)(n+1) + 2(a−1)²] / ((a)_{n+1})⁴`.
pub fn entry_markov_hurwitz(a: &Rational) -> Result<FormulaEntry, CatalogError> {
    if a.is_nonpositive_integer() {
        return Err(CatalogError::InvalidParameters(format!("a = {a} is a pole of ζ(3, a)")));
    }
    let poly = hurwitz_poly(a);
    let (ta, tp) = (a.clone(), poly.clone());
    let term: IndexFn = Arc::new(move |n| {
        let f = factorial(n);
        let head = r(1, 4) * sign(n) * f.pow(6) / factorial(2 * n + 1);
        Ok(head * tp.eval(&Rational::from(n)) / rising_factorial(&ta, n + 1).pow(4))
    });
    let n1 = Poly::x_plus(Rational::one());
    let num = -(&n1.pow(6) * &poly.shift(&Rational::one()));
    let den = prod(&[p(&[2, 2]), p(&[3, 2]), poly, Poly::x_plus(a + Rational::one()).pow(4)]);
    register_hg(HgEntry {
        id: "markov-hurwitz".into(),
        constant: if a.is_one() { "zeta3".into() } else { format!("hurwitz3({a:#})") },
        description: format!("ζ(3, {a:#}) via the accelerated Hurwitz series (ratio → −1/4)"),
        first: 0,
        offset: Rational::zero(),
        term,
        num,
        den,
        rhos: &[r(1, 4), r(1, 3), r(1, 2), r(3, 4)],
    })
}

/// `ζ(3) = (1/4) Σ_{n≥1} (−1)^(n−1) (56n² − 32n + 5) / ((2n−1)² n³) · n!³/(3n)!`.
pub fn entry_ratio27_zeta3() -> FormulaEntry {
    let q = p(&[5, -32, 56]);
    let tq = q.clone();
    let term: IndexFn = Arc::new(move |n| {
        let nn = Rational::from(n);
        let odd = Rational::from(2 * n - 1);
        let head = r(1, 4) * sign(n - 1) * tq.eval(&nn) / (&odd * &odd * nn.pow(3));
        Ok(head * factorial(n).pow(3) / factorial(3 * n))
    });
    let num = -prod(&[q.shift(&Rational::one()), p(&[-1, 2]).pow(2), p(&[0, 1]).pow(3)]);
    let den = prod(&[q, p(&[1, 2]).pow(2), p(&[1, 3]), p(&[2, 3]), p(&[3, 3])]);
    register_hg(HgEntry {
        id: "ratio27-zeta3".into(),
        constant: "zeta3".into(),
        description: "ζ(3) = (1/4) Σ_{n≥1} (−1)^(n−1) (56n²−32n+5)/((2n−1)² n³) · n!³/(3n)!".into(),
        first: 1,
        offset: Rational::zero(),
        term,
        num,
        den,
        rhos: &[r(1, 27), r(1, 26), r(1, 20)],
    })
    .expect("built-in entry registers")
}

/// `ζ(3) = Σ_{n≥0} (−1)^n n!¹⁰ (205n² + 250n + 77) / (64 (2n+1)!⁵)`.
pub fn entry_az_zeta3() -> FormulaEntry {
    let q = p(&[77, 250, 205]);
    let tq = q.clone();
    let term: IndexFn = Arc::new(move |n| {
        Ok(sign(n) * factorial(n).pow(10) * tq.eval(&Rational::from(n))
            / (Rational::from(64) * factorial(2 * n + 1).pow(5)))
    });
    let num = -(&p(&[1, 1]).pow(10) * &q.shift(&Rational::one()));
    let den = &q * &(&p(&[2, 2]) * &p(&[3, 2])).pow(5);
    register_hg(HgEntry {
        id: "az-zeta3".into(),
        constant: "zeta3".into(),
        description: "ζ(3) = Σ_{n≥0} (−1)^n n!¹⁰ (205n²+250n+77) / (64 (2n+1)!⁵)".into(),
        first: 0,
        offset: Rational::zero(),
        term,
        num,
        den,
        rhos: &[r(1, 1024), r(1, 1000), r(1, 512)],
    })
    .expect("built-in entry registers")
}

/// `ζ(2) = 5/3 + Σ_{k≥1} (−1)^k (2k−1)!!³/(6k−1)!! · (1/(4k²) + 5/((6k+1)(6k+3)))`.
pub fn entry_zeta2_27() -> FormulaEntry {
    // 1/(4k²) + 5/((6k+1)(6k+3)) = H(k)/D(k)
    let h = p(&[3, 24, 56]);
    let d = prod(&[p(&[0, 0, 4]), p(&[1, 6]), p(&[3, 6])]);
    let (th, td) = (h.clone(), d.clone());
    let term: IndexFn = Arc::new(move |k| {
        let kk = Rational::from(k);
        let ratio = odd_double_factorial(k).pow(3) / odd_double_factorial(3 * k);
        Ok(sign(k) * ratio * th.eval(&kk) / td.eval(&kk))
    });
    let one = Rational::one();
    let num = -prod(&[p(&[1, 2]).pow(3), h.shift(&one), d.clone()]);
    let den = prod(&[p(&[1, 6]), p(&[3, 6]), p(&[5, 6]), d.shift(&one), h]);
    register_hg(HgEntry {
        id: "zeta2-27".into(),
        constant: "zeta2".into(),
        description: "ζ(2) = 5/3 + Σ_{k≥1} (−1)^k (2k−1)!!³/(6k−1)!! · (1/(4k²) + 5/((6k+1)(6k+3)))".into(),
        first: 1,
        offset: r(5, 3),
        term,
        num,
        den,
        rhos: &[r(1, 27), r(1, 26), r(1, 20)],
    })
    .expect("built-in entry registers")
}

/// The transformed series for `₃F₂(a, b, 1; c, d; 1)`; `(1, 1, 2, 2)` gives ζ(2).
pub fn entry_schellbach(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Result<FormulaEntry, CatalogError> {
    let sp = SchellbachParams::new(a.clone(), b.clone(), c.clone(), d.clone())?;
    let (num, den) = sp.ratio_polys();
    let seq = sp.sequence();
    let two = Rational::from(2);
    let is_basel = a.is_one() && b.is_one() && c == &two && d == &two;
    let term: IndexFn = Arc::new(move |x| seq.term(x));
    register_hg(HgEntry {
        id: "schellbach".into(),
        constant: if is_basel { "zeta2".into() } else { format!("3F2({a:#},{b:#},1;{c:#},{d:#};1)") },
        description: format!("₃F₂({a:#}, {b:#}, 1; {c:#}, {d:#}; 1) via its 4^-x transformed series"),
        first: 0,
        offset: Rational::zero(),
        term,
        num,
        den,
        rhos: &[r(1, 4), r(1, 3), r(1, 2), r(3, 4)],
    })
}

/// Kinds of direct (unaccelerated) series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectKind {
    Zeta2,
    Zeta3,
    Eta2,
    Eta3,
    Hurwitz3(Rational),
}

/// Direct summation with Euler–Maclaurin tails for ζ-type sums.
pub fn entry_direct(kind: DirectKind) -> Result<FormulaEntry, CatalogError> {
    entry_direct_with(kind, DirectTail::EulerMaclaurin)
}

/// Direct summation with a chosen tail method for the ζ-type sums
/// (η sums always use the alternating bound).
pub fn entry_direct_with(kind: DirectKind, method: DirectTail) -> Result<FormulaEntry, CatalogError> {
    let power_term = |s: u32, shift: Rational, alternating: bool| -> IndexFn {
        Arc::new(move |n| {
            let v = (Rational::from(n) + &shift).powi(-i64::from(s))?;
            Ok(if alternating { sign(n - 1) * v } else { v })
        })
    };
    let (id, constant, description, first, s, shift, alternating) = match &kind {
        DirectKind::Zeta2 => {
            ("direct-zeta2", "zeta2".to_string(), "ζ(2) = Σ_{n≥1} n^-2".to_string(), 1, 2, Rational::zero(), false)
        }
        DirectKind::Zeta3 => {
            ("direct-zeta3", "zeta3".to_string(), "ζ(3) = Σ_{n≥1} n^-3".to_string(), 1, 3, Rational::zero(), false)
        }
        DirectKind::Eta2 => (
            "direct-eta2",
            "eta2".to_string(),
            "η(2) = Σ_{n≥1} (−1)^(n−1) n^-2".to_string(),
            1,
            2,
            Rational::zero(),
            true,
        ),
        DirectKind::Eta3 => (
            "direct-eta3",
            "eta3".to_string(),
            "η(3) = Σ_{n≥1} (−1)^(n−1) n^-3".to_string(),
            1,
            3,
            Rational::zero(),
            true,
        ),
        DirectKind::Hurwitz3(a) => {
            if !a.is_positive() {
                return Err(CatalogError::InvalidParameters(format!("Hurwitz parameter a = {a} must be positive")));
            }
            (
                "direct-hurwitz3",
                format!("hurwitz3({a:#})"),
                format!("ζ(3, {a:#}) = Σ_{{n≥0}} (n+{a:#})^-3"),
                0,
                3,
                a.clone(),
                false,
            )
        }
    };
    let term = power_term(s, shift.clone(), alternating);
    let xn = Poly::x_plus(shift.clone()).pow(s);
    let xn1 = Poly::x_plus(&shift + Rational::one()).pow(s);
    let num = if alternating { -xn } else { xn };
    let terms = TermSequence::new(first, term.clone(), poly_ratio(term, num.clone(), xn1.clone()));
    let tail = if alternating {
        let bound = certify_ratio(&num, &xn1, &[Rational::one()], first, CHECK_LIMIT)
            .ok_or_else(|| CatalogError::Registration(format!("{id}: alternating bound not certified")))?;
        verify_prefix(id, &terms, Some(&bound), CHECK_LIMIT)?;
        TailBound::Ratio(bound)
    } else {
        verify_prefix(id, &terms, None, CHECK_LIMIT)?;
        let em = match method {
            DirectTail::EulerMaclaurin => Some(
                EulerMaclaurin::certified(s)
                    .ok_or_else(|| CatalogError::Registration(format!("{id}: Euler–Maclaurin bound not certified")))?,
            ),
            DirectTail::Integral => None,
        };
        TailBound::Direct { s, shift, em }
    };
    Ok(FormulaEntry { id: id.into(), constant, description, terms, offset: Rational::zero(), tail, scan_cap: 5_000 })
}

/// `₄F₃(9/2, 9/2, 9/2, 1; 5, 5, 5; 1) = Σ_{n≥0} ((9/2)_n / (5)_n)³`; terms
/// decay like `n^(−3/2)`, so only a Raabe-type tail bound is available.
pub fn entry_kummer() -> FormulaEntry {
    let (up, lo) = (r(9, 2), Rational::from(5));
    let (tu, tl) = (up.clone(), lo.clone());
    let term: IndexFn = Arc::new(move |n| Ok((rising_factorial(&tu, n) / rising_factorial(&tl, n)).pow(3)));
    let num = Poly::x_plus(up).pow(3);
    let den = Poly::x_plus(lo).pow(3);
    let terms = TermSequence::new(0, term.clone(), poly_ratio(term, num.clone(), den.clone()));
    let tau = r(1, 4);
    let valid_from = certify_raabe(&num, &den, &tau, 0, CHECK_LIMIT).expect("Raabe bound certifies");
    verify_prefix("kummer", &terms, None, CHECK_LIMIT).expect("ratio matches terms");
    FormulaEntry {
        id: "kummer".into(),
        constant: "4F3(9/2,9/2,9/2,1;5,5,5;1)".into(),
        description: "₄F₃(9/2, 9/2, 9/2, 1; 5, 5, 5; 1), slowly convergent (terms ~ n^(−3/2))".into(),
        terms,
        offset: Rational::zero(),
        tail: TailBound::Raabe { tau, valid_from },
        scan_cap: 400,
    }
}

fn linear_w(c: &Rational) -> Poly {
    Poly::linear(Rational::one(), -c)
}

fn register_q(
    id: &str,
    constant: String,
    description: String,
    terms: TermSequence,
    qr: QRatio,
) -> Result<FormulaEntry, CatalogError> {
    let bound = qr
        .certify(terms.first_index(), CHECK_LIMIT)
        .ok_or_else(|| CatalogError::Registration(format!("{id}: no ratio bound could be certified")))?;
    verify_prefix(id, &terms, Some(&bound), Q_CHECK_LIMIT)?;
    Ok(FormulaEntry {
        id: id.into(),
        constant,
        description,
        terms,
        offset: Rational::zero(),
        tail: TailBound::Ratio(bound),
        scan_cap: 10_000,
    })
}

fn q_constant(s: &ThreePhiTwo) -> String {
    let m = s.params();
    format!("3phi2({:#},{:#};{:#},{:#};{:#},{:#})", m.a, m.b, m.c, m.d, m.q, m.t)
}

/// `Σ_n (a, b; q)_n / (c, d; q)_n · t^n` with `t = cd/(abq)`.
pub fn entry_markov_3phi2(s: &ThreePhiTwo) -> Result<FormulaEntry, CatalogError> {
    let m = s.params();
    let seq = term_sequence(&SeriesSpec::Basic(s.series_spec()?));
    let qr = QRatio {
        c: m.t.clone(),
        k: 0,
        p: &linear_w(&m.a) * &linear_w(&m.b),
        q_poly: &linear_w(&m.c) * &linear_w(&m.d),
        base: m.q.clone(),
    };
    register_q(
        "markov-3phi2",
        q_constant(s),
        "the ₃φ₂ series Σ (a,b;q)_n/(c,d;q)_n · t^n, summed directly".into(),
        seq,
        qr,
    )
}

/// The transformed series `Σ_x V(x, 0)` of the same `₃φ₂`, converging like `q^(x²)`.
pub fn entry_markov_3phi2_transformed(s: &ThreePhiTwo) -> Result<FormulaEntry, CatalogError> {
    let m = s.params();
    let (a, b, c, d, q, t) = (&m.a, &m.b, &m.c, &m.d, &m.q, &m.t);
    let one = Rational::one();
    let ab_q = a + b + q;
    let cd = c + d;
    // N(x) = 1 − t(a+b+q) w² + t(c+d) w³ and N(x+1) in w = q^x.
    let n0 = Poly::new(vec![one.clone(), Rational::zero(), -(t * &ab_q), t * &cd]);
    let n1 = n0.scale_arg(q);
    let num = prod(&[linear_w(&(c / a)), linear_w(&(c / b)), linear_w(&(d / a)), linear_w(&(d / b)), n1]);
    let den = prod(&[
        linear_w(c),
        linear_w(d),
        n0,
        Poly::new(vec![one.clone(), Rational::zero(), -(t * q * q)]),
        Poly::new(vec![one, Rational::zero(), -(t * q.pow(3))]),
    ]);
    let qr = QRatio { c: c * d / q, k: 2, p: num, q_poly: den, base: q.clone() };
    let me = s.clone();
    let term: IndexFn = Arc::new(move |x| me.v0(x).map_err(|e| TermError::InvalidSpec(e.to_string())));
    let qr_eval = qr.clone();
    let term_for_ratio = term.clone();
    let ratio: IndexFn = Arc::new(move |x| match qr_eval.eval(x) {
        Some(v) => Ok(v),
        None => {
            let t0 = term_for_ratio(x)?;
            if t0.is_zero() {
                return Err(TermError::ZeroTerm { index: x });
            }
            Ok(term_for_ratio(x + 1)? / t0)
        }
    });
    let seq = TermSequence::new(0, term, ratio);
    register_q(
        "markov-3phi2-transformed",
        q_constant(s),
        "the same ₃φ₂ via its transformed series Σ V(x, 0), decaying like q^(x²)".into(),
        seq,
        qr,
    )
}
