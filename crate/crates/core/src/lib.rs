//! Exact series transformations built on discrete telescoping.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact`]: rational arithmetic, certified decimal rendering, polynomials.
//! * [`hgterm`]: Pochhammer symbols and (basic) hypergeometric terms.
//! * [`markov`]: Markov pairs, the discrete Green identity, telescoping
//!   certificates, the worked `₃φ₂` transformation, Schellbach's series and
//!   a stepwise multiplier solver.
//! * [`catalog`]: accelerated series for ζ(2), ζ(3) and ζ(3, a) with
//!   rigorous tail bounds and digit-certified evaluation.

pub mod catalog;
pub mod exact;
pub mod hgterm;
pub mod markov;

pub use exact::{rat, Rational};
