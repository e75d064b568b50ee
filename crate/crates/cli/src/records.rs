//! Report records. Every record carries `schema = "1"`; rationals are exact
//! `n/d` strings and the same record type is used for JSON and CSV, so CSV
//! rows deserialize back into these structs.

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeRecord {
    pub schema: String,
    pub id: String,
    pub constant: String,
    pub digits_requested: usize,
    pub rounding: String,
    pub terms_used: u64,
    pub digits_proven: usize,
    pub value: String,
    pub lower: String,
    pub upper: String,
    pub tail: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub schema: String,
    pub constant: String,
    pub id: String,
    pub terms_needed: u64,
    pub digits_proven: usize,
    /// `ρ` of the geometric tail bound, or `None` for other tails.
    pub ratio_bound: Option<String>,
    pub tail: String,
    pub value: String,
    pub lower: String,
    pub upper: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: String,
    pub constant: String,
    pub digits: usize,
    pub agree: bool,
    pub rows: Vec<CompareRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub schema: String,
    pub fixture: String,
    pub params: String,
    pub grid_x: u64,
    pub grid_z: u64,
    pub points_checked: u64,
    pub rect_i: u64,
    pub rect_j: u64,
    pub green_lhs: String,
    pub green_rhs: String,
    pub failure_x: Option<u64>,
    pub failure_z: Option<u64>,
    pub residual: Option<String>,
    pub fuzz: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub schema: String,
    pub family: String,
    pub params: String,
    pub grid_x: u64,
    pub grid_z: u64,
    pub random: usize,
    pub seed: u64,
    pub points_checked: u64,
    pub failure_params: Option<String>,
    pub failure_x: Option<u64>,
    pub failure_z: Option<u64>,
    pub residual: Option<String>,
    pub fuzz: bool,
    pub passed: bool,
}

/// One coefficient of a solved multiplier: `kind` is `a` for `a_x(z)` and
/// `m` for `m_x(z)`, `index` its position in the ansatz basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub schema: String,
    pub family: String,
    pub form: String,
    pub x: u64,
    pub kind: String,
    pub index: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStep {
    pub x: u64,
    pub a: Vec<String>,
    pub m: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: String,
    pub family: String,
    pub form: String,
    pub x_max: u64,
    pub status: String,
    pub failing_x: Option<u64>,
    pub message: Option<String>,
    /// Pair condition re-checked on `[0, x_max]²` from the solved tables.
    pub pair_verified: Option<bool>,
    /// Only for the `₃φ₂` family under `u1`: agreement with the closed forms.
    pub closed_form_match: Option<bool>,
    pub steps: Vec<SolveStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListRecord {
    pub schema: String,
    pub id: String,
    pub constant: String,
    pub tail: String,
    pub description: String,
}

/// Serializes records as CSV with a header row.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Parses CSV produced by [`to_csv`].
pub fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}
