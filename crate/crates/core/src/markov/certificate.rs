//! Recurrence certificates and their conversion to Markov pairs.
//!
//! A certificate `(F, P, Q, R̃)` satisfies
//!
//! ```text
//! P(x) F(x, z) + Q(x) F(x+1, z) = R̃(x, z+1) F(x, z+1) − R̃(x, z) F(x, z).
//! ```
//!
//! Setting `A_x = −Φ(x) P(x)`, `A_{x+1} = Φ(x) Q(x)` and `M = Φ R̃` turns the
//! identity into the pair condition for `U = A F`, `V = M F`, hence
//! `A_{x+1}/A_x = −Q/P` and `M/A_x = −R̃/P`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::three_phi_two::ThreePhiTwo;
use super::{GridFunction, IndexMap, MarkovError, MarkovPair, TermExtension};
use crate::exact::{dot, Rational};

#[derive(Clone)]
pub struct Certificate {
    pub name: String,
    pub f: TermExtension,
    pub p: IndexMap,
    pub q: IndexMap,
    pub r: GridFunction,
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Certificate")
            .field("name", &self.name)
            .field("params", &self.f.params())
            .finish_non_exhaustive()
    }
}

impl Certificate {
    pub fn new(name: impl Into<String>, f: TermExtension, p: IndexMap, q: IndexMap, r: GridFunction) -> Self {
        Certificate { name: name.into(), f, p, q, r }
    }

    /// `P F(x,z) + Q F(x+1,z) − (R̃(x,z+1) F(x,z+1) − R̃(x,z) F(x,z))`.
    pub fn residual(&self, x: u64, z: u64) -> Result<Rational, MarkovError> {
        self.residual_from(x, z, &self.f.at(x, z)?, &self.f.at(x + 1, z)?, &self.f.at(x, z + 1)?)
    }

    /// The residual given `F(x,z)`, `F(x+1,z)` and `F(x,z+1)`.
    fn residual_from(
        &self,
        x: u64,
        z: u64,
        f0: &Rational,
        f_x1: &Rational,
        f_z1: &Rational,
    ) -> Result<Rational, MarkovError> {
        let (p, q) = ((self.p)(x)?, (self.q)(x)?);
        let (r0, r1) = (self.r.at(x, z)?, -self.r.at(x, z + 1)?);
        Ok(dot(&[(&p, f0), (&q, f_x1), (&r1, f_z1), (&r0, f0)]))
    }

    pub fn descriptor(&self) -> FixtureDescriptor {
        FixtureDescriptor { fixture: self.name.clone(), form: "certificate".into(), params: self.f.params().to_vec() }
    }
}

/// JSON form of a pair or certificate fixture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureDescriptor {
    pub fixture: String,
    pub form: String,
    #[serde(serialize_with = "serialize_params")]
    pub params: Vec<(String, Rational)>,
}

fn serialize_params<S: serde::Serializer>(params: &[(String, Rational)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(params.len()))?;
    for (k, v) in params {
        m.serialize_entry(k, v)?;
    }
    m.end()
}

/// The built-in certificate of the `₃φ₂` example:
/// `P = t q^(2x) − 1`,
/// `Q = (1 − (c/a)q^x)(1 − (c/b)q^x)(1 − (d/a)q^x)(1 − (d/b)q^x) / (q (1 − t q^(2x+1)))`,
/// `R̃ = 1 + t q^(2x+z) ((c+d) q^x − (a+b)) / (1 − t q^(2x+1))`.
pub fn three_phi_two_certificate(s: &ThreePhiTwo) -> Certificate {
    let (sp, sq, sr) = (s.clone(), s.clone(), s.clone());
    let p: IndexMap = Arc::new(move |x| Ok(-sp.p0(x)));
    let q: IndexMap = Arc::new(move |x| {
        let m = sq.params();
        let one = Rational::one();
        let qx = m.q.pow(x);
        let num: Rational = [(&m.c, &m.a), (&m.c, &m.b), (&m.d, &m.a), (&m.d, &m.b)]
            .into_iter()
            .map(|(u, v)| &one - u / v * &qx)
            .product();
        Ok(num / (&m.q * (&one - &m.t * m.q.pow(2 * x + 1))))
    });
    let r = GridFunction::new(
        "R̃",
        Arc::new(move |x, z| {
            let m = sr.params();
            let one = Rational::one();
            let lin = (&m.c + &m.d) * m.q.pow(x) - (&m.a + &m.b);
            Ok(&one + &m.t * m.q.pow(2 * x + z) * lin / (&one - &m.t * m.q.pow(2 * x + 1)))
        }),
    );
    Certificate::new("markov-3phi2", s.extension(), p, q, r)
}

/// Multipliers obtained from a certificate on `x ≤ x_cap`.
#[derive(Debug, Clone)]
pub struct CertificateBridge {
    cert: Certificate,
    a: Arc<Vec<Rational>>,
    p: Arc<Vec<Rational>>,
}

impl CertificateBridge {
    /// Runs `A_{x+1} = −Q(x)/P(x) · A_x` from `A_0 = 1`.
    pub fn new(cert: &Certificate, x_cap: u64) -> Result<Self, MarkovError> {
        let mut a = vec![Rational::one()];
        let mut p = Vec::with_capacity(x_cap as usize + 1);
        for x in 0..=x_cap {
            let px = (cert.p)(x)?;
            if px.is_zero() {
                return Err(MarkovError::SingularCertificate(x));
            }
            let next = -((cert.q)(x)? / &px) * &a[x as usize];
            a.push(next);
            p.push(px);
        }
        Ok(CertificateBridge { cert: cert.clone(), a: Arc::new(a), p: Arc::new(p) })
    }

    pub fn x_cap(&self) -> u64 {
        self.p.len() as u64 - 1
    }

    pub fn a(&self, x: u64) -> Result<Rational, MarkovError> {
        self.a.get(x as usize).cloned().ok_or(MarkovError::BeyondCap { index: x, cap: self.x_cap() + 1 })
    }

    /// `M(x, z) = −R̃(x, z)/P(x) · A_x`.
    pub fn m(&self, x: u64, z: u64) -> Result<Rational, MarkovError> {
        let px = self.p.get(x as usize).ok_or(MarkovError::BeyondCap { index: x, cap: self.x_cap() })?;
        Ok(-(self.cert.r.at(x, z)? / px) * &self.a[x as usize])
    }

    pub fn pair(&self) -> MarkovPair {
        let (bu, bv) = (self.clone(), self.clone());
        let u = GridFunction::new("U", Arc::new(move |x, z| Ok(bu.a(x)? * bu.cert.f.at(x, z)?)));
        let v = GridFunction::new("V", Arc::new(move |x, z| Ok(bv.m(x, z)? * bv.cert.f.at(x, z)?)));
        MarkovPair::new(u, v, format!("certificate {}", self.cert.name))
    }
}

/// `U = A F`, `V = M F` from the certificate; `U` is defined for
/// `x ≤ x_cap + 1` and `V` for `x ≤ x_cap`.
pub fn pair_from_certificate(cert: &Certificate, x_cap: u64) -> Result<MarkovPair, MarkovError> {
    Ok(CertificateBridge::new(cert, x_cap)?.pair())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailurePoint {
    pub params: Vec<Rational>,
    pub x: u64,
    pub z: u64,
    pub residual: Rational,
}

/// First grid point in `[0, x_max] × [0, z_max]` where the identity fails.
pub fn verify_certificate_at(
    cert: &Certificate,
    x_max: u64,
    z_max: u64,
) -> Result<Option<(u64, u64, Rational)>, MarkovError> {
    // Each F value feeds up to three residuals; evaluate it once.
    let width = z_max as usize + 2;
    let mut cache: Vec<Option<Rational>> = vec![None; (x_max as usize + 2) * width];
    let mut f = |x: u64, z: u64| -> Result<Rational, MarkovError> {
        let slot = &mut cache[x as usize * width + z as usize];
        if slot.is_none() {
            *slot = Some(cert.f.at(x, z)?);
        }
        Ok(slot.clone().expect("filled above"))
    };
    for x in 0..=x_max {
        for z in 0..=z_max {
            let (f0, f_x1, f_z1) = (f(x, z)?, f(x + 1, z)?, f(x, z + 1)?);
            let r = cert.residual_from(x, z, &f0, &f_x1, &f_z1)?;
            if !r.is_zero() {
                return Ok(Some((x, z, r)));
            }
        }
    }
    Ok(None)
}

/// A parametrised certificate, instantiable at rational parameter tuples.
pub trait CertificateFamily: Send + Sync {
    fn name(&self) -> &str;
    fn param_names(&self) -> &[&'static str];
    fn instantiate(&self, params: &[Rational]) -> Result<Certificate, MarkovError>;
    /// A random tuple; may be invalid, in which case the caller redraws.
    fn sample_params(&self, rng: &mut ChaCha8Rng) -> Vec<Rational>;
}

/// Numerator range and denominator range for random rational parameters.
pub const SAMPLE_NUMERATORS: (i64, i64) = (-12, 12);
pub const SAMPLE_DENOMINATORS: (i64, i64) = (1, 12);

/// A random nonzero rational `n/d` with `n`, `d` drawn uniformly from the
/// sample ranges.
pub fn sample_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let n = rng.gen_range(SAMPLE_NUMERATORS.0..=SAMPLE_NUMERATORS.1);
        if n == 0 {
            continue;
        }
        let d = rng.gen_range(SAMPLE_DENOMINATORS.0..=SAMPLE_DENOMINATORS.1);
        return Rational::new(n, d).expect("positive denominator");
    }
}

/// The `₃φ₂` certificate with parameters `(a, b, c, d, q)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThreePhiTwoFamily;

impl CertificateFamily for ThreePhiTwoFamily {
    fn name(&self) -> &str {
        "markov-3phi2"
    }

    fn param_names(&self) -> &[&'static str] {
        &["a", "b", "c", "d", "q"]
    }

    fn instantiate(&self, params: &[Rational]) -> Result<Certificate, MarkovError> {
        let [a, b, c, d, q] = params else {
            return Err(MarkovError::InvalidParameters(format!("expected 5 parameters, got {}", params.len())));
        };
        Ok(three_phi_two_certificate(&ThreePhiTwo::new(a, b, c, d, q)?))
    }

    fn sample_params(&self, rng: &mut ChaCha8Rng) -> Vec<Rational> {
        // q is drawn from (−1, 1) directly; the other parameters are free.
        let mut v: Vec<Rational> = (0..4).map(|_| sample_rational(rng)).collect();
        let q = loop {
            let c = sample_rational(rng);
            if c.abs() < Rational::one() {
                break c;
            }
        };
        v.push(q);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateVerdict {
    pub family: String,
    pub params: Vec<Rational>,
    pub grid: (u64, u64),
    pub random_points: usize,
    pub seed: u64,
    /// Number of `(parameters, x, z)` points checked.
    pub points_checked: u64,
    pub passed: bool,
    pub first_failure: Option<FailurePoint>,
}

/// Give up drawing random instances after this many invalid draws in a row.
const MAX_REDRAWS: usize = 10_000;

/// Checks the certificate identity exactly on `[0, x_max] × [0, z_max]` at
/// `params`, then at `random_points` seeded random parameter tuples.
///
/// Random tuples whose instance is invalid, or whose evaluation hits a
/// vanishing denominator on the grid, are redrawn; the fixed tuple is not.
pub fn verify_certificate(
    family: &dyn CertificateFamily,
    params: &[Rational],
    grid: (u64, u64),
    random_points: usize,
    seed: u64,
) -> Result<CertificateVerdict, MarkovError> {
    let (x_max, z_max) = grid;
    let per_instance = (x_max + 1) * (z_max + 1);
    let mut verdict = CertificateVerdict {
        family: family.name().to_string(),
        params: params.to_vec(),
        grid,
        random_points,
        seed,
        points_checked: 0,
        passed: true,
        first_failure: None,
    };
    let fail = |v: &mut CertificateVerdict, ps: &[Rational], (x, z, residual): (u64, u64, Rational)| {
        v.passed = false;
        v.first_failure = Some(FailurePoint { params: ps.to_vec(), x, z, residual });
    };

    let cert = family.instantiate(params)?;
    verdict.points_checked += per_instance;
    if let Some(f) = verify_certificate_at(&cert, x_max, z_max)? {
        fail(&mut verdict, params, f);
        return Ok(verdict);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_points {
        let mut redraws = 0;
        loop {
            let ps = family.sample_params(&mut rng);
            let outcome = family.instantiate(&ps).and_then(|c| verify_certificate_at(&c, x_max, z_max));
            match outcome {
                Ok(None) => {
                    verdict.points_checked += per_instance;
                    break;
                }
                Ok(Some(f)) => {
                    verdict.points_checked += per_instance;
                    fail(&mut verdict, &ps, f);
                    return Ok(verdict);
                }
                Err(e) => {
                    redraws += 1;
                    if redraws >= MAX_REDRAWS {
                        return Err(e);
                    }
                }
            }
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::markov::first_pair_failure;

    fn sample() -> ThreePhiTwo {
        ThreePhiTwo::new(&rat(1, 3), &rat(1, 5), &rat(1, 7), &rat(1, 11), &rat(1, 2)).unwrap()
    }

    fn sample_params() -> Vec<Rational> {
        vec![rat(1, 3), rat(1, 5), rat(1, 7), rat(1, 11), rat(1, 2)]
    }

    #[test]
    fn builtin_certificate_holds() {
        let cert = three_phi_two_certificate(&sample());
        assert_eq!(verify_certificate_at(&cert, 8, 8).unwrap(), None);
    }

    #[test]
    fn bridge_reproduces_closed_forms() {
        let s = sample();
        let b = CertificateBridge::new(&three_phi_two_certificate(&s), 15).unwrap();
        for x in 0..=15 {
            assert_eq!(b.a(x).unwrap(), s.a_coef(x).unwrap(), "A at x = {x}");
            assert_eq!(b.m(x, 0).unwrap(), s.m0(x).unwrap(), "M at x = {x}");
        }
        assert_eq!(first_pair_failure(&b.pair(), 5, 5).unwrap(), None);
    }

    #[test]
    fn constant_certificate() {
        let f = TermExtension::new("1", vec![], Arc::new(|_, _| Ok(Rational::one())));
        let cert = Certificate::new(
            "constant",
            f,
            Arc::new(|_| Ok(Rational::one())),
            Arc::new(|_| Ok(-Rational::one())),
            GridFunction::zero("R̃"),
        );
        assert_eq!(verify_certificate_at(&cert, 3, 3).unwrap(), None);
        let pair = pair_from_certificate(&cert, 6).unwrap();
        for x in 0..=6 {
            for z in 0..4 {
                assert_eq!(pair.u.at(x, z).unwrap(), Rational::one());
                assert_eq!(pair.v.at(x, z).unwrap(), Rational::zero());
            }
        }
        assert_eq!(first_pair_failure(&pair, 5, 3).unwrap(), None);
    }

    #[test]
    fn singular_certificate() {
        let f = TermExtension::new("1", vec![], Arc::new(|_, _| Ok(Rational::one())));
        let cert = Certificate::new(
            "singular",
            f,
            Arc::new(|x| Ok(rat(x as i64 - 2, 1))),
            Arc::new(|_| Ok(Rational::one())),
            GridFunction::zero("R̃"),
        );
        let err = pair_from_certificate(&cert, 5).unwrap_err();
        assert_eq!(err, MarkovError::SingularCertificate(2));
        assert_eq!(err.to_string(), "certificate singular at x = 2");
    }

    #[test]
    fn shifted_r_fails_at_origin() {
        let mut cert = three_phi_two_certificate(&sample());
        let r = cert.r.clone();
        cert.r = GridFunction::new("R̃+1", Arc::new(move |x, z| Ok(r.at(x, z)? + Rational::one())));
        let (x, z, _) = verify_certificate_at(&cert, 3, 3).unwrap().unwrap();
        assert_eq!((x, z), (0, 0));
    }

    #[test]
    fn seeded_verification_is_reproducible() {
        let a = verify_certificate(&ThreePhiTwoFamily, &sample_params(), (4, 4), 5, 7).unwrap();
        let b = verify_certificate(&ThreePhiTwoFamily, &sample_params(), (4, 4), 5, 7).unwrap();
        assert!(a.passed);
        assert_eq!(a, b);
        assert_eq!(a.points_checked, 6 * 25);
    }

    #[test]
    fn single_point_check() {
        let v = verify_certificate(&ThreePhiTwoFamily, &sample_params(), (0, 0), 0, 0).unwrap();
        assert!(v.passed);
        assert_eq!(v.points_checked, 1);
    }

    #[test]
    fn descriptor_serializes() {
        let d = three_phi_two_certificate(&sample()).descriptor();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"fixture":"markov-3phi2","form":"certificate","params":{"a":"1/3","b":"1/5","c":"1/7","d":"1/11","q":"1/2"}}"#
        );
    }
}
