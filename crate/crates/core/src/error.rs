use std::fmt;

use num_bigint::BigInt;

/// Library-wide error type.
///
/// Certified operations refuse rather than guess: any comparison or floor that
/// cannot be decided at the configured precision ceiling surfaces as
/// `PrecisionExhausted` instead of a silently rounded answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A certified decision (floor, sign, comparison) was still ambiguous at
    /// the precision ceiling.
    PrecisionExhausted { context: &'static str, bits: u32 },
    /// Input to solve_beta is not the expansion of 1 for any base: some shift
    /// fails the strict lexicographic condition.
    NotExpansionOfOne { shift: u64, reason: ShiftDefect },
    /// Input series/word diverges or lies outside the domain (for example a
    /// leading digit 0 handed to solve_beta, or |z| >= 1 handed to mahler_f).
    DivergentInput(String),
    /// A solved base's integer part disagrees with the requested digit b.
    FloorMismatch { expected: BigInt, got: BigInt },
    /// Digit statistics of an expansion disagree with the slope that was
    /// claimed to generate it (first offending index reported).
    SlopeMismatch { index: u64 },
    /// A strict inequality the caller asked to certify could not be separated
    /// from zero at the working precision.
    InequalityUnresolved { context: &'static str },
    /// Independent evaluation routes of an identity failed to overlap.
    IdentityViolated { gap: String },
    /// Malformed or out-of-domain input (parse errors, rational slopes, ...).
    InvalidInput(String),
    /// Operation is well defined but not provided for this representation.
    Unsupported(&'static str),
}

/// Why a shifted word failed `sigma^n(s) < s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDefect {
    /// The shift is lexicographically greater than the word.
    Greater { at: u64 },
    /// No strict difference was found up to the comparison horizon.
    EqualToHorizon { horizon: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PrecisionExhausted { context, bits } => {
                write!(f, "precision exhausted at {bits} bits: {context}")
            }
            Error::NotExpansionOfOne { shift, reason } => match reason {
                ShiftDefect::Greater { at } => write!(
                    f,
                    "not an expansion of 1: shift {shift} exceeds the word at digit {at}"
                ),
                ShiftDefect::EqualToHorizon { horizon } => write!(
                    f,
                    "not an expansion of 1: shift {shift} is not strictly smaller \
                     within horizon {horizon}"
                ),
            },
            Error::DivergentInput(msg) => write!(f, "divergent input: {msg}"),
            Error::FloorMismatch { expected, got } => {
                write!(f, "integer part mismatch: requested b = {expected}, solved floor = {got}")
            }
            Error::SlopeMismatch { index } => {
                write!(f, "digit statistics disagree with the slope at index {index}")
            }
            Error::InequalityUnresolved { context } => {
                write!(f, "strict inequality unresolved at working precision: {context}")
            }
            Error::IdentityViolated { gap } => {
                write!(f, "identity evaluation routes disagree: {gap}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
