//! Exact rationals plus two residue systems: fixed-modulus residues mod p^K
//! and finite-precision p-adic values with valuation tracking.
//!
//! `Rat` (arbitrary-precision, always reduced) is the oracle number type;
//! every congruence is also evaluated through [`Padic`] values, whose
//! valuation/precision bookkeeping lets sums divide by p without leaving
//! the fixed-modulus world.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = Ratio<Int>;

/// Sentinel absolute precision for exact zeros.
pub const PREC_EXACT: i64 = i64::MAX / 4;

pub fn rat(num: i64, den: i64) -> Rat {
    Ratio::new(Int::from(num), Int::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Ratio::from_integer(Int::from(n))
}

/// Parse "a/b" or "a".
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().ok()?;
            let d: Int = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Ratio::new(n, d))
        }
        None => {
            let n: Int = s.parse().ok()?;
            Some(Ratio::from_integer(n))
        }
    }
}

/// Canonical "a/b" form (denominator always printed).
pub fn rat_to_string(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// n = p^v * unit with p not dividing unit.
pub fn int_valuation(n: &Int, p: u64) -> Result<(i64, Int)> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = Int::from(p);
    let mut v = 0i64;
    let mut unit = n.clone();
    loop {
        let (q, r) = unit.div_rem(&p);
        if r.is_zero() {
            v += 1;
            unit = q;
        } else {
            return Ok((v, unit));
        }
    }
}

/// v_p of a non-zero rational (negative when p divides the denominator).
pub fn rat_valuation(q: &Rat, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    let (vn, _) = int_valuation(q.numer(), p)?;
    let (vd, _) = int_valuation(q.denom(), p)?;
    Ok(vn - vd)
}

/// Working context: odd prime p and precision K digits (modulus p^K).
#[derive(Clone, Debug)]
pub struct PadicContext {
    pub p: u64,
    pub k: u32,
    powers: Vec<BigUint>,
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PadicContext {
    pub fn new(p: u64, k: u32) -> Self {
        assert!(is_odd_prime(p), "p = {p} must be an odd prime");
        assert!(k >= 1, "precision K must be at least 1");
        let mut powers = Vec::with_capacity(k as usize + 1);
        let mut acc = BigUint::one();
        let pb = BigUint::from(p);
        for _ in 0..=k {
            powers.push(acc.clone());
            acc *= &pb;
        }
        PadicContext { p, k, powers }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.powers[self.k as usize]
    }

    /// p^i for i <= K.
    pub fn power(&self, i: u32) -> &BigUint {
        &self.powers[i as usize]
    }
}

/// Integer in [0, p^exp) tagged with its modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue {
    pub value: BigUint,
    pub p: u64,
    pub exp: u32,
}

impl Residue {
    pub fn modulus(&self) -> BigUint {
        BigUint::from(self.p).pow(self.exp)
    }

    pub fn from_biguint(value: BigUint, p: u64, exp: u32) -> Self {
        let m = BigUint::from(p).pow(exp);
        Residue { value: value % m, p, exp }
    }

    pub fn from_int(n: &Int, p: u64, exp: u32) -> Self {
        let m = Int::from(BigUint::from(p).pow(exp));
        let mut r = n % &m;
        if r.is_negative() {
            r += &m;
        }
        Residue { value: r.to_biguint().expect("non-negative"), p, exp }
    }

    pub fn from_u64(n: u64, p: u64, exp: u32) -> Self {
        Self::from_biguint(BigUint::from(n), p, exp)
    }

    pub fn zero(p: u64, exp: u32) -> Self {
        Residue { value: BigUint::zero(), p, exp }
    }

    pub fn one(p: u64, exp: u32) -> Self {
        Self::from_biguint(BigUint::one(), p, exp)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check_same(&self, other: &Residue) {
        assert!(
            self.p == other.p && self.exp == other.exp,
            "mixed moduli: {}^{} vs {}^{}",
            self.p,
            self.exp,
            other.p,
            other.exp
        );
    }

    pub fn add(&self, other: &Residue) -> Residue {
        self.check_same(other);
        Residue::from_biguint(&self.value + &other.value, self.p, self.exp)
    }

    pub fn sub(&self, other: &Residue) -> Residue {
        self.check_same(other);
        let m = self.modulus();
        Residue::from_biguint(&self.value + (&m - &other.value), self.p, self.exp)
    }

    pub fn neg(&self) -> Residue {
        if self.value.is_zero() {
            return self.clone();
        }
        let m = self.modulus();
        Residue { value: &m - &self.value, p: self.p, exp: self.exp }
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        self.check_same(other);
        Residue::from_biguint(&self.value * &other.value, self.p, self.exp)
    }

    pub fn pow(&self, e: u64) -> Residue {
        let m = self.modulus();
        Residue {
            value: self.value.modpow(&BigUint::from(e), &m),
            p: self.p,
            exp: self.exp,
        }
    }

    /// Reinterpret mod p^new_exp (new_exp <= exp).
    pub fn truncate(&self, new_exp: u32) -> Residue {
        assert!(new_exp <= self.exp);
        Residue::from_biguint(self.value.clone(), self.p, new_exp)
    }

    /// Multiply by p^i, lifting the modulus exponent by i.
    pub fn lift_mul_p(&self, i: u32) -> Residue {
        let exp = self.exp + i;
        Residue::from_biguint(&self.value * BigUint::from(self.p).pow(i), self.p, exp)
    }
}

/// r^-1 mod p^K; `NotUnit` when p divides the value.
pub fn inv_mod(r: &Residue) -> Result<Residue> {
    let value = Int::from(r.value.clone());
    let m = Int::from(r.modulus());
    let ext = value.extended_gcd(&m);
    if !ext.gcd.is_one() {
        return Err(Error::NotUnit);
    }
    Ok(Residue::from_int(&ext.x, r.p, r.exp))
}

/// Reduce a p-integral rational mod p^target.
pub fn mod_reduce(q: &Rat, p: u64, target: u32) -> Result<Residue> {
    if q.is_zero() {
        return Ok(Residue::zero(p, target));
    }
    let (vn, un) = int_valuation(q.numer(), p)?;
    let (vd, ud) = int_valuation(q.denom(), p)?;
    let v = vn - vd;
    if v < 0 {
        return Err(Error::NotPIntegral);
    }
    if v >= target as i64 {
        return Ok(Residue::zero(p, target));
    }
    let num = Residue::from_int(&un, p, target);
    let den = Residue::from_int(&ud, p, target);
    // stripped denominator is a unit by construction
    debug_assert!(!(&den.value % BigUint::from(p)).is_zero() || den.is_zero());
    let inv = inv_mod(&den).map_err(|_| Error::NotCoprime)?;
    let unit_part = num.mul(&inv);
    Ok(Residue::from_biguint(
        unit_part.value * BigUint::from(p).pow(v as u32),
        p,
        target,
    ))
}

/// v_p(n!) by Legendre's formula together with the unit part of n! mod p^K.
pub fn factorial_decompose(n: u64, ctx: &PadicContext) -> (i64, Residue) {
    let mut v = 0i64;
    let mut q = n / ctx.p;
    while q > 0 {
        v += q as i64;
        q /= ctx.p;
    }
    let m = ctx.modulus();
    let mut unit = BigUint::one();
    for i in 1..=n {
        let mut f = i;
        while f % ctx.p == 0 {
            f /= ctx.p;
        }
        unit = unit * BigUint::from(f) % m;
    }
    (v, Residue { value: unit, p: ctx.p, exp: ctx.k })
}

/// Finite-precision p-adic value: p^val * unit with the unit known mod p^rel.
///
/// The zero variant records only how many digits are known to vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Padic {
    Zero { prec: i64 },
    Val { val: i64, unit: BigUint, rel: u32 },
}

impl Padic {
    /// Absolute precision: the value is known mod p^prec.
    pub fn prec(&self) -> i64 {
        match self {
            Padic::Zero { prec } => *prec,
            Padic::Val { val, rel, .. } => val + *rel as i64,
        }
    }

    pub fn valuation(&self) -> Option<i64> {
        match self {
            Padic::Zero { .. } => None,
            Padic::Val { val, .. } => Some(*val),
        }
    }

    pub fn exact_zero() -> Padic {
        Padic::Zero { prec: PREC_EXACT }
    }
}

fn sat(a: i64, b: i64) -> i64 {
    a.saturating_add(b).min(PREC_EXACT)
}

impl PadicContext {
    fn clamp_rel(&self, rel: i64) -> u32 {
        rel.clamp(0, self.k as i64) as u32
    }

    /// Exact integer as a p-adic value at working precision.
    pub fn padic_from_int(&self, n: &Int) -> Padic {
        if n.is_zero() {
            return Padic::exact_zero();
        }
        let (v, unit) = int_valuation(n, self.p).expect("non-zero");
        let unit = Residue::from_int(&unit, self.p, self.k);
        Padic::Val { val: v, unit: unit.value, rel: self.k }
    }

    pub fn padic_from_rat(&self, q: &Rat) -> Padic {
        if q.is_zero() {
            return Padic::exact_zero();
        }
        let num = self.padic_from_int(q.numer());
        let den = self.padic_from_int(q.denom());
        self.padic_div(&num, &den).expect("denominator non-zero")
    }

    pub fn padic_neg(&self, a: &Padic) -> Padic {
        match a {
            Padic::Zero { .. } => a.clone(),
            Padic::Val { val, unit, rel } => {
                let m = self.power(*rel);
                Padic::Val { val: *val, unit: m - unit, rel: *rel }
            }
        }
    }

    /// Exact sum truncated to the minimum of the operands' precision.
    pub fn padic_add(&self, a: &Padic, b: &Padic) -> Padic {
        match (a, b) {
            (Padic::Zero { prec: pa }, Padic::Zero { prec: pb }) => {
                Padic::Zero { prec: (*pa).min(*pb) }
            }
            (Padic::Zero { prec }, v @ Padic::Val { .. })
            | (v @ Padic::Val { .. }, Padic::Zero { prec }) => self.truncate_to(v, *prec),
            (
                Padic::Val { val: va, unit: ua, rel: ra },
                Padic::Val { val: vb, unit: ub, rel: rb },
            ) => {
                let prec = (va + *ra as i64).min(vb + *rb as i64);
                let vmin = (*va).min(*vb);
                let digits = self.clamp_rel(prec - vmin);
                if digits == 0 {
                    return Padic::Zero { prec };
                }
                let m = self.power(digits);
                // a shift at or beyond the digit window contributes nothing
                let shifted = |u: &BigUint, shift: i64| -> BigUint {
                    if shift >= digits as i64 {
                        BigUint::zero()
                    } else {
                        u * self.power(shift as u32) % m
                    }
                };
                let sa = shifted(ua, va - vmin);
                let sb = shifted(ub, vb - vmin);
                let s = (sa + sb) % m;
                if s.is_zero() {
                    return Padic::Zero { prec };
                }
                let (vs, unit) = strip_p(s, self.p);
                let val = vmin + vs;
                let rel = self.clamp_rel(prec - val);
                Padic::Val { val, unit: unit % self.power(rel), rel }
            }
        }
    }

    pub fn padic_sub(&self, a: &Padic, b: &Padic) -> Padic {
        self.padic_add(a, &self.padic_neg(b))
    }

    pub fn padic_mul(&self, a: &Padic, b: &Padic) -> Padic {
        match (a, b) {
            (Padic::Zero { prec: pa }, Padic::Zero { prec: pb }) => {
                Padic::Zero { prec: sat(*pa, *pb) }
            }
            (Padic::Zero { prec }, Padic::Val { val, .. })
            | (Padic::Val { val, .. }, Padic::Zero { prec }) => {
                Padic::Zero { prec: sat(*prec, *val) }
            }
            (
                Padic::Val { val: va, unit: ua, rel: ra },
                Padic::Val { val: vb, unit: ub, rel: rb },
            ) => {
                let rel = (*ra).min(*rb);
                let m = self.power(rel);
                Padic::Val { val: va + vb, unit: ua * ub % m, rel }
            }
        }
    }

    pub fn padic_div(&self, a: &Padic, b: &Padic) -> Result<Padic> {
        match b {
            Padic::Zero { .. } => Err(Error::DivisionByZero),
            Padic::Val { val: vb, unit: ub, rel: rb } => match a {
                Padic::Zero { prec } => Ok(Padic::Zero { prec: prec.saturating_sub(*vb) }),
                Padic::Val { val: va, unit: ua, rel: ra } => {
                    let rel = (*ra).min(*rb);
                    let m = self.power(rel);
                    let inv = inv_mod(&Residue {
                        value: ub % m,
                        p: self.p,
                        exp: rel,
                    })?;
                    Ok(Padic::Val { val: va - vb, unit: ua * inv.value % m, rel })
                }
            },
        }
    }

    /// Multiply by an exact p^v * u with u a unit (fast path for term updates).
    pub fn padic_mul_unit(&self, a: &Padic, v: i64, u: &BigUint) -> Padic {
        match a {
            Padic::Zero { prec } => Padic::Zero { prec: sat(*prec, v) },
            Padic::Val { val, unit, rel } => Padic::Val {
                val: val + v,
                unit: unit * u % self.power(*rel),
                rel: *rel,
            },
        }
    }

    fn truncate_to(&self, a: &Padic, prec: i64) -> Padic {
        match a {
            Padic::Zero { prec: p0 } => Padic::Zero { prec: (*p0).min(prec) },
            Padic::Val { val, unit, rel } => {
                let prec = prec.min(val + *rel as i64);
                if prec <= *val {
                    return Padic::Zero { prec };
                }
                let rel = self.clamp_rel(prec - val);
                Padic::Val { val: *val, unit: unit % self.power(rel), rel }
            }
        }
    }

    /// Extract a Residue mod p^target; fails when precision or integrality
    /// does not reach the target.
    pub fn padic_to_residue(&self, a: &Padic, target: u32) -> Result<Residue> {
        if a.prec() < target as i64 {
            return Err(Error::PrecisionExhausted);
        }
        match a {
            Padic::Zero { .. } => Ok(Residue::zero(self.p, target)),
            Padic::Val { val, unit, .. } => {
                if *val < 0 {
                    return Err(Error::NotPIntegral);
                }
                if *val >= target as i64 {
                    return Ok(Residue::zero(self.p, target));
                }
                let m = BigUint::from(self.p).pow(target);
                let value = unit * self.power(*val as u32) % m;
                Ok(Residue { value, p: self.p, exp: target })
            }
        }
    }
}

fn strip_p(mut n: BigUint, p: u64) -> (i64, BigUint) {
    debug_assert!(!n.is_zero());
    let pb = BigUint::from(p);
    let mut v = 0i64;
    loop {
        let (q, r) = n.div_rem(&pb);
        if r.is_zero() {
            v += 1;
            n = q;
        } else {
            return (v, n);
        }
    }
}

/// Integer binomial coefficient.
pub fn binom_int(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for j in 0..k {
        acc = acc * Int::from(n - j) / Int::from(j + 1);
    }
    acc
}

/// Generalized binomial coefficient binom(x, k) = x(x-1)...(x-k+1)/k!.
pub fn binom_rat(x: &Rat, k: u64) -> Rat {
    let mut acc = Rat::one();
    for j in 0..k {
        acc *= (x - rat_int(j as i64)) / rat_int(j as i64 + 1);
    }
    acc
}

/// Modular exponentiation for machine-sized moduli.
pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// a^-1 mod m for machine-sized m, via extended Euclid.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r.abs() != 1 {
        return None;
    }
    let mut inv = old_s * old_r.signum();
    inv %= m as i128;
    if inv < 0 {
        inv += m as i128;
    }
    Some(inv as u64)
}
