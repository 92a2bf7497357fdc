//! Decomposition of a p-adic integer x into its least nonnegative residue
//! r mod p and tail t with x = r + p*t.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::{rat_int, Int, Rat};

/// x = residue + p * tail, with 0 <= residue < p and v_p(tail) >= 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicDecomposition {
    pub residue: u64,
    pub tail: Rat,
    /// residue mod 2
    pub parity: u8,
    /// (floor(residue/2), floor((residue+1)/2))
    pub half_index: (u64, u64),
}

/// Least nonnegative residue of x modulo p.
pub fn residue_of(x: &Rat, p: u64) -> Result<u64> {
    let pi = Int::from(p);
    let den = x.denom() % &pi;
    if den.is_zero() {
        return Err(Error::DenominatorDivisible);
    }
    let r = crate::numeric::mod_reduce(x, p, 1).map_err(|_| Error::DenominatorDivisible)?;
    Ok(num_traits::ToPrimitive::to_u64(&r.value).expect("residue below p"))
}

/// Tail t = (x - <x>_p) / p.
pub fn tail_of(x: &Rat, p: u64) -> Result<Rat> {
    let r = residue_of(x, p)?;
    let t = (x - rat_int(r as i64)) / rat_int(p as i64);
    Ok(t)
}

pub fn decompose(x: &Rat, p: u64) -> Result<PadicDecomposition> {
    let residue = residue_of(x, p)?;
    let tail = (x - rat_int(residue as i64)) / rat_int(p as i64);
    Ok(PadicDecomposition {
        residue,
        tail,
        parity: (residue % 2) as u8,
        half_index: (residue / 2, residue.div_ceil(2)),
    })
}
