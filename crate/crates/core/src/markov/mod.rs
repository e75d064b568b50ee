//! Markov pairs and the discrete Green identity.
//!
//! A pair `(U, V)` of grid functions on `ℕ × ℕ` is a Markov pair when
//!
//! ```text
//! U(x, z) − U(x+1, z) = V(x, z) − V(x, z+1)
//! ```
//!
//! holds everywhere. Summing over a lattice rectangle telescopes to an exact
//! identity between boundary sums, which turns `Σ_z U(0, z)` into
//! `Σ_x V(x, 0)` once the far edges vanish.

pub mod certificate;
pub mod schellbach;
pub mod solver;
pub mod three_phi_two;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{dot, ExactError, Rational};
use crate::hgterm::{IndexFn, TermError, TermSequence};

pub use certificate::{
    pair_from_certificate, verify_certificate, verify_certificate_at, Certificate, CertificateFamily,
    CertificateVerdict, ThreePhiTwoFamily,
};
pub use schellbach::{schellbach_asymptotics, schellbach_term, SchellbachParams};
pub use solver::{solve_multipliers_stepwise, MultiplierData, MultiplierForm};
pub use three_phi_two::{coefficient_residuals, markov_3phi2, markov_param_map, MarkovParams, ThreePhiTwo};

/// Largest grid index any built-in evaluator accepts. Representation sizes
/// grow like `q^(x²)`, so the cap keeps runaway inputs from exhausting memory.
pub const GRID_CAP: u64 = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkovError {
    #[error("{label} undefined at (x, z) = ({x}, {z}): {reason}")]
    Undefined { label: String, x: u64, z: u64, reason: String },
    #[error("vanishing denominator: {0}")]
    Vanishing(String),
    #[error("certificate singular at x = {0}")]
    SingularCertificate(u64),
    #[error("ansatz underdetermined at x = {0}")]
    Underdetermined(u64),
    #[error("ansatz does not close at x = {0}")]
    DoesNotClose(u64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("index {index} exceeds the cap {cap}")]
    BeyondCap { index: u64, cap: u64 },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub type GridFn = Arc<dyn Fn(u64, u64) -> Result<Rational, MarkovError> + Send + Sync>;
pub type IndexMap = Arc<dyn Fn(u64) -> Result<Rational, MarkovError> + Send + Sync>;

/// A labelled exact evaluator `(x, z) ↦ value`.
#[derive(Clone)]
pub struct GridFunction {
    label: String,
    eval: GridFn,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction").field("label", &self.label).finish_non_exhaustive()
    }
}

impl GridFunction {
    pub fn new(label: impl Into<String>, eval: GridFn) -> Self {
        GridFunction { label: label.into(), eval }
    }

    pub fn zero(label: impl Into<String>) -> Self {
        GridFunction::new(label, Arc::new(|_, _| Ok(Rational::zero())))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Value at `(x, z)`; failures are reported with the location.
    pub fn at(&self, x: u64, z: u64) -> Result<Rational, MarkovError> {
        (self.eval)(x, z).map_err(|e| match e {
            MarkovError::Undefined { .. } => e,
            other => MarkovError::Undefined { label: self.label.clone(), x, z, reason: other.to_string() },
        })
    }
}

/// The two-index extension `F(x, z)` of a series term, `F(0, z)` being the
/// `z`-th term of the series to transform.
#[derive(Clone, Debug)]
pub struct TermExtension {
    grid: GridFunction,
    params: Vec<(String, Rational)>,
}

impl TermExtension {
    pub fn new(label: impl Into<String>, params: Vec<(String, Rational)>, eval: GridFn) -> Self {
        TermExtension { grid: GridFunction::new(label, eval), params }
    }

    pub fn at(&self, x: u64, z: u64) -> Result<Rational, MarkovError> {
        self.grid.at(x, z)
    }

    pub fn label(&self) -> &str {
        self.grid.label()
    }

    pub fn params(&self) -> &[(String, Rational)] {
        &self.params
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }
}

#[derive(Clone, Debug)]
pub struct MarkovPair {
    pub u: GridFunction,
    pub v: GridFunction,
    pub provenance: String,
}

impl MarkovPair {
    pub fn new(u: GridFunction, v: GridFunction, provenance: impl Into<String>) -> Self {
        MarkovPair { u, v, provenance: provenance.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub holds: bool,
    pub residual: Rational,
}

/// Residual `(U(x,z) − U(x+1,z)) − (V(x,z) − V(x,z+1))`.
pub fn check_pair_condition(pair: &MarkovPair, x: u64, z: u64) -> Result<PairCheck, MarkovError> {
    let lhs = pair.u.at(x, z)? - pair.u.at(x + 1, z)?;
    let rhs = pair.v.at(x, z)? - pair.v.at(x, z + 1)?;
    let residual = lhs - rhs;
    Ok(PairCheck { holds: residual.is_zero(), residual })
}

/// First grid point in `[0, x_max] × [0, z_max]` with a nonzero residual.
pub fn first_pair_failure(
    pair: &MarkovPair,
    x_max: u64,
    z_max: u64,
) -> Result<Option<(u64, u64, Rational)>, MarkovError> {
    // Each value enters two residuals; evaluate it once. Rows are filled in
    // scan order, so a singular point is reported where the scan meets it.
    let mut u_next: Vec<Rational> = (0..=z_max).map(|z| pair.u.at(0, z)).collect::<Result<_, _>>()?;
    let one = Rational::one();
    let minus = -Rational::one();
    for x in 0..=x_max {
        let u_here = std::mem::take(&mut u_next);
        let mut v_here = pair.v.at(x, 0)?;
        for z in 0..=z_max {
            u_next.push(pair.u.at(x + 1, z)?);
            let v_up = pair.v.at(x, z + 1)?;
            let r =
                dot(&[(&one, &u_here[z as usize]), (&minus, &u_next[z as usize]), (&minus, &v_here), (&one, &v_up)]);
            if !r.is_zero() {
                return Ok(Some((x, z, r)));
            }
            v_here = v_up;
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreenRectangle {
    pub lhs: Rational,
    pub rhs: Rational,
}

impl GreenRectangle {
    pub fn balanced(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn check_rectangle(i: u64, j: u64) -> Result<(), MarkovError> {
    if i == 0 || j == 0 {
        return Err(MarkovError::InvalidParameters(format!("rectangle sides must be positive, got {i}×{j}")));
    }
    Ok(())
}

fn column_sum(f: &GridFunction, x: u64, j: u64) -> Result<Rational, MarkovError> {
    (0..j).map(|z| f.at(x, z)).sum()
}

fn row_sum(f: &GridFunction, i: u64, z: u64) -> Result<Rational, MarkovError> {
    (0..i).map(|x| f.at(x, z)).sum()
}

/// Both boundary sums of the `i × j` rectangle:
/// `Σ_{z<j} U(0,z) − Σ_{z<j} U(i,z)` and `Σ_{x<i} V(x,0) − Σ_{x<i} V(x,j)`.
pub fn green_rectangle(pair: &MarkovPair, i: u64, j: u64) -> Result<GreenRectangle, MarkovError> {
    check_rectangle(i, j)?;
    let lhs = column_sum(&pair.u, 0, j)? - column_sum(&pair.u, i, j)?;
    let rhs = row_sum(&pair.v, i, 0)? - row_sum(&pair.v, i, j)?;
    Ok(GreenRectangle { lhs, rhs })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformCheck {
    pub u_sum: Rational,
    pub v_sum: Rational,
    pub u_edge: Rational,
    pub v_edge: Rational,
}

impl TransformCheck {
    /// `|u_sum − v_sum|`.
    pub fn discrepancy(&self) -> Rational {
        (&self.u_sum - &self.v_sum).abs()
    }

    /// `|v_edge − u_edge|`, equal to the discrepancy for a Markov pair.
    pub fn edge_discrepancy(&self) -> Rational {
        (&self.v_edge - &self.u_edge).abs()
    }

    /// `|u_edge| + |v_edge|`, an upper bound on the discrepancy.
    pub fn edge_bound(&self) -> Rational {
        self.u_edge.abs() + self.v_edge.abs()
    }
}

/// Partial sums of the original and transformed series together with the far
/// edge sums that account for their difference.
pub fn transform_check(pair: &MarkovPair, i: u64, j: u64) -> Result<TransformCheck, MarkovError> {
    check_rectangle(i, j)?;
    Ok(TransformCheck {
        u_sum: column_sum(&pair.u, 0, j)?,
        v_sum: row_sum(&pair.v, i, 0)?,
        u_edge: column_sum(&pair.u, i, j)?,
        v_edge: row_sum(&pair.v, i, j)?,
    })
}

/// Finite estimates `R̂_m = Σ_{k ≤ k_max} Σ_{m ≤ n ≤ n_cap} a_n^(k)` of the
/// row-remainder sums, for `m = 0..=m_max`. Row `k` of the array is
/// `rows[k]`, indexed by `n` from its first index.
pub fn remainder_diagnostics(
    rows: &[TermSequence],
    m_max: u64,
    k_max: usize,
    n_cap: u64,
) -> Result<Vec<Rational>, MarkovError> {
    let used = &rows[..rows.len().min(k_max + 1)];
    // Suffix sums per row so each R̂_m costs one pass.
    let mut totals = vec![Rational::zero(); m_max as usize + 1];
    for row in used {
        let first = row.first_index();
        if n_cap < first {
            continue;
        }
        let terms = row.terms(first, (n_cap - first + 1) as usize)?;
        let mut suffix = Rational::zero();
        let mut by_index = vec![Rational::zero(); (n_cap + 1) as usize];
        for (offset, t) in terms.iter().enumerate().rev() {
            suffix += t;
            by_index[first as usize + offset] = suffix.clone();
        }
        for m in 0..=m_max.min(n_cap) {
            let start = m.max(first) as usize;
            totals[m as usize] += &by_index[start];
        }
    }
    Ok(totals)
}

/// Rows `a_n^(k) = V(n, k) − V(n, k+1)` for `k = 0..=k_max`: the double
/// array whose row sums are `U(0, k)` and whose column sums are `V(n, 0)`.
pub fn pair_rows(pair: &MarkovPair, k_max: u64) -> Vec<TermSequence> {
    (0..=k_max)
        .map(|k| {
            let v = pair.v.clone();
            let term: IndexFn = Arc::new(move |n| {
                let d = v.at(n, k).and_then(|a| Ok(a - v.at(n, k + 1)?));
                d.map_err(|e| TermError::InvalidSpec(e.to_string()))
            });
            TermSequence::from_terms(0, term)
        })
        .collect()
}
