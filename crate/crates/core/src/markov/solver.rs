//! Stepwise determination of Markov multipliers by exact linear algebra.
//!
//! With `U(x, z) = a_x(z) F(x, z)` and `V(x, z) = m_x(z) F(x, z)`, the pair
//! condition at fixed `x` is linear in the coefficients of `a_{x+1}` and
//! `m_x` once `a_x` is known. Sampling it at `z = 0, 1, …` gives an
//! overdetermined exact system; the extra rows confirm that the ansatz fits.
//!
//! | form | `a_x(z)`                  | `m_x(z)`                    |
//! |------|---------------------------|-----------------------------|
//! | u1   | `A_x`                     | `B_x + C_x q^z`             |
//! | u2   | `A_x + B_x z`             | `C_x + D_x z + F_x z²`      |
//! | u3   | `A_x + B̃_x z + C̃_x z²`   | `F̃_x + G̃_x z + H̃_x z²`   |
//!
//! Normalisation: `a_0(z) = 1`.

use std::sync::Arc;

use serde::Serialize;

use super::{GridFunction, MarkovError, MarkovPair, TermExtension};
use crate::exact::Rational;
use crate::hgterm::rising_factorial;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum MultiplierForm {
    U1 { q: Rational },
    U2,
    U3,
}

impl MultiplierForm {
    /// Number of polynomial coefficients in `a_x(z)`.
    fn u_len(&self) -> usize {
        match self {
            MultiplierForm::U1 { .. } => 1,
            MultiplierForm::U2 => 2,
            MultiplierForm::U3 => 3,
        }
    }

    fn m_basis(&self, z: u64) -> Vec<Rational> {
        match self {
            MultiplierForm::U1 { q } => vec![Rational::one(), q.pow(z)],
            MultiplierForm::U2 | MultiplierForm::U3 => {
                let z = Rational::from(z);
                vec![Rational::one(), z.clone(), &z * &z]
            }
        }
    }

    /// Unknowns solved for at each step.
    pub fn unknowns(&self) -> usize {
        self.u_len() + self.m_basis(0).len()
    }

    pub fn tag(&self) -> &'static str {
        match self {
            MultiplierForm::U1 { .. } => "u1",
            MultiplierForm::U2 => "u2",
            MultiplierForm::U3 => "u3",
        }
    }
}

fn powers(z: u64, n: usize) -> Vec<Rational> {
    let z = Rational::from(z);
    let mut out = Vec::with_capacity(n);
    let mut p = Rational::one();
    for _ in 0..n {
        out.push(p.clone());
        p *= &z;
    }
    out
}

/// Solved multiplier tables: `u[x]` holds the coefficients of `a_x(z)` for
/// `x ≤ x_max + 1`, `m[x]` those of `m_x(z)` for `x ≤ x_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplierData {
    pub form: MultiplierForm,
    pub u: Vec<Vec<Rational>>,
    pub m: Vec<Vec<Rational>>,
}

impl MultiplierData {
    pub fn x_max(&self) -> u64 {
        self.m.len() as u64 - 1
    }

    /// The constant coefficient `A_x` of `a_x(z)`.
    pub fn a(&self, x: u64) -> Option<&Rational> {
        self.u.get(x as usize).map(|c| &c[0])
    }

    pub fn u_multiplier(&self, x: u64, z: u64) -> Result<Rational, MarkovError> {
        let c = self.u.get(x as usize).ok_or(MarkovError::BeyondCap { index: x, cap: self.x_max() + 1 })?;
        Ok(c.iter().zip(powers(z, c.len())).map(|(a, p)| a * p).sum())
    }

    pub fn m_multiplier(&self, x: u64, z: u64) -> Result<Rational, MarkovError> {
        let c = self.m.get(x as usize).ok_or(MarkovError::BeyondCap { index: x, cap: self.x_max() })?;
        Ok(c.iter().zip(self.form.m_basis(z)).map(|(a, p)| a * p).sum())
    }

    pub fn pair(&self, f: &TermExtension) -> MarkovPair {
        let (du, dv) = (self.clone(), self.clone());
        let (fu, fv) = (f.clone(), f.clone());
        let u = GridFunction::new("U", Arc::new(move |x, z| Ok(du.u_multiplier(x, z)? * fu.at(x, z)?)));
        let v = GridFunction::new("V", Arc::new(move |x, z| Ok(dv.m_multiplier(x, z)? * fv.at(x, z)?)));
        MarkovPair::new(u, v, format!("{} solved with {}", f.label(), self.form.tag()))
    }
}

enum Solution {
    Unique(Vec<Rational>),
    Underdetermined,
    Inconsistent,
}

/// Gauss–Jordan elimination on `[m | rhs]`.
fn solve_exact(mut rows: Vec<Vec<Rational>>, cols: usize) -> Solution {
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip().expect("pivot is nonzero");
        for v in rows[rank].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let k = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &(&k * pv);
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[cols].is_zero()) {
        return Solution::Inconsistent;
    }
    if rank < cols {
        return Solution::Underdetermined;
    }
    Solution::Unique((0..cols).map(|i| rows[i][cols].clone()).collect())
}

/// Solves for the multipliers step by step for `x = 0..=x_max`, sampling the
/// pair condition at `z = 0..z_samples`.
///
/// Errors: `z_samples` below `unknowns + 2`; "ansatz does not close" when the
/// samples are inconsistent; "ansatz underdetermined" when they do not pin
/// the unknowns.
pub fn solve_multipliers_stepwise(
    f: &TermExtension,
    form: MultiplierForm,
    x_max: u64,
    z_samples: u64,
) -> Result<MultiplierData, MarkovError> {
    let nu = form.u_len();
    let nm = form.m_basis(0).len();
    let unknowns = nu + nm;
    if z_samples < unknowns as u64 + 2 {
        return Err(MarkovError::InvalidParameters(format!(
            "form {} needs at least {} z samples, got {z_samples}",
            form.tag(),
            unknowns + 2
        )));
    }
    let mut current = vec![Rational::zero(); nu];
    current[0] = Rational::one();
    let mut u = vec![current.clone()];
    let mut m = Vec::new();

    for x in 0..=x_max {
        // Column value F is needed at z = 0..=z_samples.
        let fx: Vec<Rational> = (0..=z_samples).map(|z| f.at(x, z)).collect::<Result<_, _>>()?;
        let mut rows = Vec::with_capacity(z_samples as usize);
        for z in 0..z_samples {
            let zi = z as usize;
            let pw = powers(z, nu);
            let f_next = f.at(x + 1, z)?;
            let mut row: Vec<Rational> = pw.iter().map(|p| p * &f_next).collect();
            let (b0, b1) = (form.m_basis(z), form.m_basis(z + 1));
            row.extend(b0.iter().zip(&b1).map(|(p0, p1)| p0 * &fx[zi] - p1 * &fx[zi + 1]));
            let lhs: Rational = current.iter().zip(&pw).map(|(c, p)| c * p).sum::<Rational>() * &fx[zi];
            row.push(lhs);
            rows.push(row);
        }
        match solve_exact(rows, unknowns) {
            Solution::Unique(sol) => {
                current = sol[..nu].to_vec();
                u.push(current.clone());
                m.push(sol[nu..].to_vec());
            }
            Solution::Underdetermined => return Err(MarkovError::Underdetermined(x)),
            Solution::Inconsistent => return Err(MarkovError::DoesNotClose(x)),
        }
    }
    Ok(MultiplierData { form, u, m })
}

/// `F(x, z) = (a, a+h, a−h)_z / (b, b+h, b−h)_{x+z}`, whose first row sums to
/// a `₄F₃` at unit argument.
pub fn four_f_three_extension(a: &Rational, h: &Rational, b: &Rational) -> Result<TermExtension, MarkovError> {
    let lower = [b.clone(), b + h, b - h];
    if let Some(bad) = lower.iter().find(|v| v.is_nonpositive_integer()) {
        return Err(MarkovError::InvalidParameters(format!("lower parameter {bad} is a nonpositive integer")));
    }
    let upper = [a.clone(), a + h, a - h];
    let params = vec![("a".into(), a.clone()), ("h".into(), h.clone()), ("b".into(), b.clone())];
    Ok(TermExtension::new(
        "4F3",
        params,
        Arc::new(move |x, z| {
            let num: Rational = upper.iter().map(|p| rising_factorial(p, z)).product();
            let den: Rational = lower.iter().map(|p| rising_factorial(p, x + z)).product();
            Ok(num / den)
        }),
    ))
}

/// `F(x, z) = (−1)^z (a)_z³ / ((b)_{x+z})³`.
pub fn well_poised_extension(a: &Rational, b: &Rational) -> Result<TermExtension, MarkovError> {
    if b.is_nonpositive_integer() {
        return Err(MarkovError::InvalidParameters(format!("lower parameter {b} is a nonpositive integer")));
    }
    let (a, b) = (a.clone(), b.clone());
    let params = vec![("a".into(), a.clone()), ("b".into(), b.clone())];
    Ok(TermExtension::new(
        "well-poised",
        params,
        Arc::new(move |x, z| {
            let r = rising_factorial(&a, z) / rising_factorial(&b, x + z);
            let cube = r.pow(3);
            Ok(if z % 2 == 1 { -cube } else { cube })
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::markov::first_pair_failure;
    use crate::markov::three_phi_two::ThreePhiTwo;

    #[test]
    fn u1_recovers_closed_forms() {
        let s = ThreePhiTwo::new(&rat(1, 3), &rat(1, 5), &rat(1, 7), &rat(1, 11), &rat(1, 2)).unwrap();
        let data = solve_multipliers_stepwise(&s.extension(), MultiplierForm::U1 { q: rat(1, 2) }, 10, 5).unwrap();
        for x in 0..=10u64 {
            assert_eq!(data.a(x).unwrap(), &s.a_coef(x).unwrap());
            assert_eq!(data.m[x as usize], vec![s.b_coef(x).unwrap(), s.c_coef(x).unwrap()]);
        }
        assert_eq!(data.a(11).unwrap(), &s.a_coef(11).unwrap());
    }

    #[test]
    fn u2_closes_on_four_f_three() {
        let f = four_f_three_extension(&rat(1, 1), &rat(1, 3), &rat(2, 1)).unwrap();
        let data = solve_multipliers_stepwise(&f, MultiplierForm::U2, 9, 7).unwrap();
        assert_eq!(data.u[0], vec![Rational::one(), Rational::zero()]);
        assert_eq!(first_pair_failure(&data.pair(&f), 9, 9).unwrap(), None);
    }

    #[test]
    fn u3_closes_on_well_poised_only() {
        let f = well_poised_extension(&rat(1, 1), &rat(2, 1)).unwrap();
        let data = solve_multipliers_stepwise(&f, MultiplierForm::U3, 4, 8).unwrap();
        assert_eq!(first_pair_failure(&data.pair(&f), 4, 6).unwrap(), None);
        assert_eq!(
            solve_multipliers_stepwise(&f, MultiplierForm::U1 { q: rat(1, 2) }, 4, 8).unwrap_err(),
            MarkovError::DoesNotClose(0)
        );
        assert_eq!(MarkovError::DoesNotClose(0).to_string(), "ansatz does not close at x = 0");
    }

    #[test]
    fn too_few_samples() {
        let f = well_poised_extension(&rat(1, 1), &rat(2, 1)).unwrap();
        assert!(matches!(
            solve_multipliers_stepwise(&f, MultiplierForm::U3, 2, 7),
            Err(MarkovError::InvalidParameters(_))
        ));
    }

    #[test]
    fn underdetermined_on_a_degenerate_extension() {
        // F ≡ 0 leaves every unknown free.
        let f = TermExtension::new("0", vec![], Arc::new(|_, _| Ok(Rational::zero())));
        assert_eq!(
            solve_multipliers_stepwise(&f, MultiplierForm::U2, 3, 7).unwrap_err(),
            MarkovError::Underdetermined(0)
        );
    }
}
