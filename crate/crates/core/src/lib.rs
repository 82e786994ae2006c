//! Exact multidimensional continued fractions over formal Laurent series.
//!
//! The ambient field is F((z^-1)) with F = GF(p): series sum_{t >= i} a_t z^-t
//! with finitely many positive-exponent terms. Everything here is exact
//! arithmetic; there is no floating point. The layers, bottom up:
//!
//! - [`field`]: the prime field GF(p), p chosen at runtime.
//! - [`poly`]: dense polynomials over GF(p) with a total degree order
//!   (the zero polynomial has a dedicated minus-infinity degree).
//! - [`series`]: truncated Laurent series with explicit precision windows.
//!   Operations compute the provable result window and never fabricate
//!   coefficients beyond it.
//! - [`iv`]: indexed valuations, the linear order on (component, valuation)
//!   pairs that drives every pivot decision.
//! - [`cf`]: m-dimensional pre-continued-fraction structures, their derived
//!   quantity tables, validity conditions 1-4, convergents and evaluation.
//! - [`transform`]: the expansion algorithm mapping a series vector to its
//!   continued fraction, with pluggable carry strategies, plus the
//!   matrix-form twin used for cross-verification.
//! - [`approx`]: rational approximants, precision measurement and the
//!   brute-force best-approximation oracle.
//! - [`synthesis`]: linear complexity profiles of multisequences and the
//!   brute-force minimal polynomial oracle.
//! - [`gen`]: seeded random generators for test corpora.
//!
//! All public types are immutable after construction and thus Send + Sync.

pub mod approx;
pub mod cf;
pub mod field;
pub mod gen;
pub mod iv;
pub mod poly;
pub mod series;
pub mod synthesis;
pub mod transform;

pub use field::PrimeField;
pub use iv::IndexedVal;
pub use poly::{Degree, Poly};
pub use series::{SeriesVec, TruncSeries};

use std::fmt;

/// Errors shared by the whole crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Modulus is not a prime (or is < 2).
    NotPrime(u64),
    /// Operands belong to different prime fields.
    FieldMismatch,
    /// Vector or matrix dimensions disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// Division by zero in a field, polynomial or series context.
    DivisionByZero,
    /// The stored window is too short to decide the requested quantity.
    InsufficientPrecision(String),
    /// Input outside an operation's domain (zero vector, bad valuation, oversized enumeration, ...).
    Domain(String),
    /// A structure violates the continued fraction conditions.
    InvalidCf { step: usize, reason: String },
    /// A supplied carry vector violates its admissibility constraint.
    InvalidEpsilon { step: usize, reason: String },
    /// An internal cross-check failed; indicates a bug, not bad input.
    Internal(String),
    /// Malformed textual input.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not a prime modulus"),
            Error::FieldMismatch => write!(f, "operands belong to different prime fields"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::InsufficientPrecision(msg) => write!(f, "insufficient precision: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InvalidCf { step, reason } => {
                write!(f, "invalid continued fraction at step {step}: {reason}")
            }
            Error::InvalidEpsilon { step, reason } => {
                write!(f, "invalid carry at step {step}: {reason}")
            }
            Error::Internal(msg) => write!(f, "internal check failed: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
