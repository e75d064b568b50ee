//! Registered series with certified tail bounds and digit-certified evaluation.
//!
//! Evaluating an entry with `N` terms yields an exact enclosure
//! `offset + S_N + [tail_lo, tail_hi]`, where `S_N` is the exact partial sum
//! and the tail interval is proved for the omitted remainder. The decimal
//! rendering keeps only digits on which both ends of the enclosure agree.

pub mod bounds;
mod entries;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use bounds::{EulerMaclaurin, RatioBound};
pub use entries::{
    entry_apery, entry_az_zeta3, entry_direct, entry_direct_with, entry_kummer, entry_markov_3phi2,
    entry_markov_3phi2_transformed, entry_markov_hurwitz, entry_ratio27_zeta3, entry_schellbach, entry_zeta2_27,
    DirectKind, CHECK_LIMIT,
};

use crate::exact::decimal_capacity;
use crate::exact::{to_decimal, DecimalRendering, Enclosure, ExactError, Rational, Rounding};
use crate::hgterm::{TermError, TermSequence};
use crate::markov::{MarkovError, ThreePhiTwo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown formula id {0:?}")]
    UnknownEntry(String),
    #[error("{0}: no geometric bound")]
    NoGeometricBound(String),
    #[error("entry registration failed: {0}")]
    Registration(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("{id}: {digits} digits not reached within {cap} terms")]
    Shortfall { id: String, digits: usize, cap: u64 },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// How direct ζ-type sums bound their tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectTail {
    /// Two-sided Euler–Maclaurin enclosure.
    #[default]
    EulerMaclaurin,
    /// Integral comparison, `∫_x^∞ ≤ tail ≤ ∫_{x−1}^∞`.
    Integral,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailBound {
    /// Certified bounds on the term ratio.
    Ratio(RatioBound),
    /// `n − (n+1)·ratio(n) ≥ τ` from `valid_from`: positive terms whose tail
    /// from `m` is at most `m·term(m)/τ`.
    Raabe { tau: Rational, valid_from: u64 },
    /// `Σ_{n>N} (n + shift)^(−s)`, enclosed by Euler–Maclaurin when `em` is
    /// set and by integral comparison otherwise.
    Direct { s: u32, shift: Rational, em: Option<EulerMaclaurin> },
}

impl TailBound {
    /// First index from which the tail formula applies.
    fn valid_from(&self) -> u64 {
        match self {
            TailBound::Ratio(b) => b.valid_from,
            TailBound::Raabe { valid_from, .. } => *valid_from,
            TailBound::Direct { .. } => 0,
        }
    }

    /// Enclosure of `Σ_{n≥m} term(n)` given `term(m)`, for `m ≥ valid_from`.
    fn enclose(&self, m: u64, term_m: &Rational) -> (Rational, Rational) {
        let ordered = |a: Rational, b: Rational| if a <= b { (a, b) } else { (b, a) };
        match self {
            TailBound::Ratio(b) => {
                let (lo, hi) = b.tail_factor();
                ordered(term_m * lo, term_m * hi)
            }
            TailBound::Raabe { tau, .. } => (term_m.clone(), Rational::from(m) * term_m / tau),
            TailBound::Direct { s, shift, em } => {
                let x = Rational::from(m) + shift;
                match em {
                    Some(em) => em.enclose(&x),
                    None => bounds::integral_enclosure(*s, &x),
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TailBound::Ratio(b) if b.is_geometric() => {
                format!("geometric, ratio in [{:#}, {:#}] from n = {}", b.lower, b.upper, b.valid_from)
            }
            TailBound::Ratio(b) => {
                format!("alternating, ratio in [{:#}, {:#}] from n = {}", b.lower, b.upper, b.valid_from)
            }
            TailBound::Raabe { tau, valid_from } => format!("Raabe, tau = {tau:#} from n = {valid_from}"),
            TailBound::Direct { s, em: Some(_), .. } => format!("Euler-Maclaurin, s = {s}"),
            TailBound::Direct { s, em: None, .. } => format!("integral comparison, s = {s}"),
        }
    }
}

#[derive(Clone)]
pub struct FormulaEntry {
    pub id: String,
    /// Short name of the value summed, e.g. `zeta3`.
    pub constant: String,
    pub description: String,
    pub terms: TermSequence,
    /// Constant added to the series.
    pub offset: Rational,
    pub tail: TailBound,
    /// Largest number of terms a digit scan will try.
    pub scan_cap: u64,
}

impl fmt::Debug for FormulaEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormulaEntry")
            .field("id", &self.id)
            .field("constant", &self.constant)
            .field("tail", &self.tail)
            .finish_non_exhaustive()
    }
}

impl FormulaEntry {
    pub fn term(&self, n: u64) -> Result<Rational, CatalogError> {
        Ok(self.terms.term(n)?)
    }

    pub fn first_index(&self) -> u64 {
        self.terms.first_index()
    }

    /// The certified ratio bound, if the entry is geometric.
    pub fn ratio_bound(&self) -> Option<&RatioBound> {
        match &self.tail {
            TailBound::Ratio(b) if b.is_geometric() => Some(b),
            _ => None,
        }
    }

    /// Fewest terms for which the tail formula applies.
    fn min_terms(&self) -> u64 {
        self.tail.valid_from().saturating_sub(self.first_index()).max(1)
    }

    fn enclosure(&self, partial: &Rational, count: u64, next_term: &Rational) -> Enclosure {
        let m = self.first_index() + count;
        let (lo, hi) = self.tail.enclose(m, next_term);
        let base = &self.offset + partial;
        Enclosure::new(&base + lo, base + hi).expect("tail bounds are ordered")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvaluationReport {
    pub id: String,
    pub constant: String,
    pub terms_used: u64,
    pub enclosure: Enclosure,
    pub rendering: DecimalRendering,
    pub digits_proven: usize,
}

impl EvaluationReport {
    /// True when the rendering certifies at least `digits` fraction digits.
    pub fn meets(&self, digits: usize) -> bool {
        self.rendering.integer_certified && self.digits_proven >= digits
    }

    pub fn value(&self) -> String {
        self.rendering.to_string()
    }
}

/// Digits rendered when the enclosure is a single point.
const POINT_DIGITS: usize = 64;

fn report(
    entry: &FormulaEntry,
    count: u64,
    enclosure: Enclosure,
    digits: Option<usize>,
    rounding: Rounding,
) -> EvaluationReport {
    let requested = digits.unwrap_or_else(|| decimal_capacity(&enclosure, POINT_DIGITS));
    let rendering = to_decimal(&enclosure, requested, rounding);
    EvaluationReport {
        id: entry.id.clone(),
        constant: entry.constant.clone(),
        terms_used: count,
        digits_proven: rendering.digits_proven,
        enclosure,
        rendering,
    }
}

/// Evaluates with `n_terms` terms, rendering as many truncated digits as the
/// enclosure certifies.
pub fn evaluate(entry: &FormulaEntry, n_terms: u64) -> Result<EvaluationReport, CatalogError> {
    evaluate_with(entry, n_terms, None, Rounding::Truncate)
}

/// Evaluates with `n_terms` terms (raised to the fewest the tail bound
/// accepts; `terms_used` reports the count actually summed) and renders up to
/// `digits` fraction digits, or as many as certifiable when `None`.
pub fn evaluate_with(
    entry: &FormulaEntry,
    n_terms: u64,
    digits: Option<usize>,
    rounding: Rounding,
) -> Result<EvaluationReport, CatalogError> {
    if n_terms == 0 {
        return Err(CatalogError::InvalidParameters("at least one term is required".into()));
    }
    let count = n_terms.max(entry.min_terms());
    let terms = entry.terms.terms(entry.first_index(), count as usize + 1)?;
    let (head, next) = terms.split_at(count as usize);
    let partial: Rational = head.iter().sum();
    let enclosure = entry.enclosure(&partial, count, &next[0]);
    Ok(report(entry, count, enclosure, digits, rounding))
}

/// Smallest term count, up to `cap`, certifying `digits` fraction digits.
pub fn scan_terms(
    entry: &FormulaEntry,
    digits: usize,
    rounding: Rounding,
    cap: u64,
) -> Result<EvaluationReport, CatalogError> {
    const CHUNK: usize = 64;
    let first = entry.first_index();
    let start = entry.min_terms();
    let mut partial = Rational::zero();
    let mut buf: Vec<Rational> = Vec::new();
    let mut buf_start = first;
    let mut summed = 0u64;
    for count in start..=cap.max(start) {
        // Need terms first..first+count inclusive; fetch in chunks.
        let need = first + count;
        while buf_start + buf.len() as u64 <= need {
            let from = buf_start + buf.len() as u64;
            buf.extend(entry.terms.terms(from, CHUNK)?);
        }
        while summed < count {
            partial += &buf[(first + summed - buf_start) as usize];
            summed += 1;
        }
        let next = &buf[(need - buf_start) as usize];
        let enclosure = entry.enclosure(&partial, count, next);
        if decimal_capacity(&enclosure, digits + 1) > digits {
            let r = report(entry, count, enclosure, Some(digits), rounding);
            if r.meets(digits) {
                return Ok(r);
            }
        }
        // Drop consumed terms to keep memory flat.
        let consumed = (first + summed).saturating_sub(buf_start) as usize;
        if consumed > 4 * CHUNK {
            buf.drain(..consumed);
            buf_start += consumed as u64;
        }
    }
    Err(CatalogError::Shortfall { id: entry.id.clone(), digits, cap })
}

/// Smallest `N` with `evaluate(entry, N)` certifying `digits` digits;
/// only for entries with a geometric ratio bound.
pub fn terms_needed(entry: &FormulaEntry, digits: usize) -> Result<u64, CatalogError> {
    terms_needed_with(entry, digits, Rounding::Truncate)
}

pub fn terms_needed_with(entry: &FormulaEntry, digits: usize, rounding: Rounding) -> Result<u64, CatalogError> {
    if entry.ratio_bound().is_none() {
        return Err(CatalogError::NoGeometricBound(entry.id.clone()));
    }
    Ok(scan_terms(entry, digits, rounding, entry.scan_cap)?.terms_used)
}

/// Optional parameters for parametrised entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntryParams {
    pub a: Option<Rational>,
    pub b: Option<Rational>,
    pub c: Option<Rational>,
    pub d: Option<Rational>,
    pub q: Option<Rational>,
}

/// Registered ids, in listing order.
pub const ENTRY_IDS: [&str; 14] = [
    "apery",
    "markov-hurwitz",
    "ratio27-zeta3",
    "az-zeta3",
    "zeta2-27",
    "schellbach",
    "direct-zeta2",
    "direct-zeta3",
    "direct-eta2",
    "direct-eta3",
    "direct-hurwitz3",
    "kummer",
    "markov-3phi2",
    "markov-3phi2-transformed",
];

/// Default `(a, b, c, d, q)` for the `₃φ₂` entries.
pub fn default_3phi2_params() -> [Rational; 5] {
    let r = |n, d| Rational::new(n, d).unwrap();
    [r(1, 3), r(1, 5), r(1, 7), r(1, 11), r(1, 2)]
}

/// Builds a registered entry. Unused parameters are ignored; missing ones
/// take defaults (`a = 1` for Hurwitz entries, `(1, 1, 2, 2)` for
/// Schellbach, `(1/3, 1/5, 1/7, 1/11, 1/2)` for the `₃φ₂` entries).
pub fn lookup(id: &str, params: &EntryParams) -> Result<FormulaEntry, CatalogError> {
    let one = Rational::one();
    let or = |v: &Option<Rational>, d: Rational| v.clone().unwrap_or(d);
    let three_phi_two = || -> Result<ThreePhiTwo, CatalogError> {
        let [a, b, c, d, q] = default_3phi2_params();
        Ok(ThreePhiTwo::new(
            &or(&params.a, a),
            &or(&params.b, b),
            &or(&params.c, c),
            &or(&params.d, d),
            &or(&params.q, q),
        )?)
    };
    match id {
        "apery" => Ok(entry_apery()),
        "markov-hurwitz" => entry_markov_hurwitz(&or(&params.a, one)),
        "ratio27-zeta3" => Ok(entry_ratio27_zeta3()),
        "az-zeta3" => Ok(entry_az_zeta3()),
        "zeta2-27" => Ok(entry_zeta2_27()),
        "schellbach" => {
            let two = Rational::from(2);
            entry_schellbach(
                &or(&params.a, one.clone()),
                &or(&params.b, one),
                &or(&params.c, two.clone()),
                &or(&params.d, two),
            )
        }
        "direct-zeta2" => entry_direct(DirectKind::Zeta2),
        "direct-zeta3" => entry_direct(DirectKind::Zeta3),
        "direct-eta2" => entry_direct(DirectKind::Eta2),
        "direct-eta3" => entry_direct(DirectKind::Eta3),
        "direct-hurwitz3" => entry_direct(DirectKind::Hurwitz3(or(&params.a, one))),
        "kummer" => Ok(entry_kummer()),
        "markov-3phi2" => entry_markov_3phi2(&three_phi_two()?),
        "markov-3phi2-transformed" => entry_markov_3phi2_transformed(&three_phi_two()?),
        other => Err(CatalogError::UnknownEntry(other.to_string())),
    }
}

/// Entries compared for a constant, or `None` for an unknown constant.
pub fn entries_for(constant: &str) -> Option<Vec<FormulaEntry>> {
    let d = EntryParams::default();
    let ids: &[&str] = match constant {
        "zeta3" => &["direct-zeta3", "apery", "markov-hurwitz", "ratio27-zeta3", "az-zeta3"],
        "zeta2" => &["direct-zeta2", "schellbach", "zeta2-27"],
        _ => return None,
    };
    Some(ids.iter().map(|id| lookup(id, &d).expect("built-in entries register")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn apery_terms_and_partial_sum() {
        let e = entry_apery();
        assert_eq!(e.term(1).unwrap(), rat(5, 4));
        assert_eq!(e.terms.partial_sum(2).unwrap(), rat(115, 96));
        assert_eq!(e.ratio_bound().unwrap().valid_from, 1);
    }

    #[test]
    fn apery_one_term_encloses_zeta3() {
        let r = evaluate(&entry_apery(), 1).unwrap();
        assert_eq!(r.terms_used, 1);
        assert!(r.enclosure.contains(&rat(1_202_056_903, 1_000_000_000)));
    }

    #[test]
    fn hurwitz_terms() {
        let e = entry_markov_hurwitz(&rat(1, 1)).unwrap();
        assert_eq!(e.term(0).unwrap(), rat(5, 4));
        assert_eq!(e.term(1).unwrap(), rat(-5, 96));
        assert!(entry_markov_hurwitz(&rat(-2, 1)).is_err());
        assert_eq!(entry_markov_hurwitz(&rat(1, 2)).unwrap().constant, "hurwitz3(1/2)");
    }

    #[test]
    fn ratio27_and_az_terms() {
        let e = entry_ratio27_zeta3();
        assert_eq!(e.term(1).unwrap(), rat(29, 24));
        assert_eq!(e.term(2).unwrap(), rat(-11, 1728));
        let e = entry_az_zeta3();
        assert_eq!(e.term(0).unwrap(), rat(77, 64));
        assert_eq!(e.term(1).unwrap(), rat(-532, 64 * 7776));
    }

    #[test]
    fn zeta2_27_terms() {
        let e = entry_zeta2_27();
        assert_eq!(e.term(1).unwrap(), rat(-83, 3780));
        assert_eq!(e.term(2).unwrap(), rat(27 * 55, 10395 * 624));
        assert_eq!(e.offset, rat(5, 3));
    }

    #[test]
    fn direct_entries() {
        let z3 = entry_direct(DirectKind::Zeta3).unwrap();
        assert_eq!(z3.terms.partial_sum(2).unwrap(), rat(9, 8));
        let eta = entry_direct(DirectKind::Eta3).unwrap();
        assert_eq!((eta.term(1).unwrap(), eta.term(2).unwrap()), (rat(1, 1), rat(-1, 8)));
        let h = entry_direct(DirectKind::Hurwitz3(rat(1, 1))).unwrap();
        for n in 0..10 {
            assert_eq!(h.term(n).unwrap(), z3.term(n + 1).unwrap());
        }
        assert!(entry_direct(DirectKind::Hurwitz3(rat(-1, 2))).is_err());
        assert!(matches!(terms_needed(&z3, 5), Err(CatalogError::NoGeometricBound(_))));
    }

    #[test]
    fn crude_integral_bound_matches_classical_form() {
        // Tail after N terms of Σ n^-3 is at most 1/(2N²).
        let e = entry_direct_with(DirectKind::Zeta3, DirectTail::Integral).unwrap();
        let r = evaluate(&e, 10).unwrap();
        let s = e.terms.partial_sum(10).unwrap();
        assert_eq!(r.enclosure.upper(), &(&s + rat(1, 200)));
        let e = entry_direct_with(DirectKind::Zeta2, DirectTail::Integral).unwrap();
        let r = evaluate(&e, 10).unwrap();
        assert_eq!(r.enclosure.upper(), &(e.terms.partial_sum(10).unwrap() + rat(1, 10)));
    }

    #[test]
    fn kummer_is_slow() {
        let e = entry_kummer();
        assert_eq!(e.term(0).unwrap(), Rational::one());
        assert_eq!(e.term(1).unwrap(), rat(729, 1000));
        assert!(e.terms.ratio(100).unwrap().to_f64() > 0.98);
        assert!(e.ratio_bound().is_none());
        assert!(matches!(terms_needed(&e, 1), Err(CatalogError::NoGeometricBound(_))));
    }

    #[test]
    fn zero_digits_needs_one_term() {
        for id in ["apery", "ratio27-zeta3", "az-zeta3", "markov-hurwitz"] {
            let e = lookup(id, &EntryParams::default()).unwrap();
            assert_eq!(terms_needed(&e, 0).unwrap(), 1, "{id}");
        }
    }

    #[test]
    fn unknown_id() {
        assert_eq!(lookup("nosuch", &EntryParams::default()).unwrap_err(), CatalogError::UnknownEntry("nosuch".into()));
    }

    #[test]
    fn all_ids_register() {
        for id in ENTRY_IDS {
            let e = lookup(id, &EntryParams::default()).unwrap();
            assert_eq!(e.id, id);
        }
    }
}
