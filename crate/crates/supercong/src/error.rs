//! Error type shared across the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A p-adic integer was required but the value has negative valuation.
    NotPIntegral,
    /// Residual denominator shares a factor with p after valuation stripping.
    NotCoprime,
    /// Inversion of a residue divisible by p.
    NotUnit,
    /// Division by a p-adic value indistinguishable from zero.
    DivisionByZero,
    /// Valuation of zero requested.
    ZeroInput,
    /// Rational argument has denominator divisible by p.
    DenominatorDivisible,
    /// Partial-sum index would put p into a denominator.
    IndexOutOfRange,
    /// A p-adic evaluation lost too many digits, even after one retry.
    PrecisionExhausted,
    /// Check preconditions not met for the given (p, x).
    PreconditionViolated(String),
    /// A sum expected to be p-integral was not.
    IntegralityViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPIntegral => write!(f, "value is not a p-adic integer"),
            Error::NotCoprime => write!(f, "residual denominator not coprime to p"),
            Error::NotUnit => write!(f, "residue is not a unit"),
            Error::DivisionByZero => write!(f, "division by (p-adic) zero"),
            Error::ZeroInput => write!(f, "valuation of zero"),
            Error::DenominatorDivisible => write!(f, "denominator divisible by p"),
            Error::IndexOutOfRange => write!(f, "summation index out of range"),
            Error::PrecisionExhausted => write!(f, "p-adic precision exhausted"),
            Error::PreconditionViolated(why) => write!(f, "precondition violated: {why}"),
            Error::IntegralityViolation(why) => write!(f, "integrality violation: {why}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
