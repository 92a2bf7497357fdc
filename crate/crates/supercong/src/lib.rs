//! supercong-lab: a verification engine for congruences between central
//! binomial sums and Euler-polynomial closed forms.
//!
//! The engine evaluates sums of the shape
//! `sum_k binom(x,k) binom(x+k,k) c^k / ((d k + 1) binom(2k,k))`
//! over ranges of odd primes and p-adic arguments x, under two independent
//! strategies (exact rationals and valuation-tracked p-adic arithmetic),
//! and compares each against its registered closed form at a fixed prime
//! power modulus.

pub mod checks;
pub mod cli;
pub mod error;
pub mod identities;
pub mod numeric;
pub mod padicmap;
pub mod primes;
pub mod reporting;
pub mod special;
pub mod sums;
pub mod xstream;

pub use error::{Error, Result};
pub use numeric::{Int, Padic, PadicContext, Rat, Residue};
