//! The paper's finite sums: the central family
//! `sum_k binom(x,k) binom(x+k,k) c^k / ((d k + 1) binom(2k,k))` and the
//! auxiliary central-binomial sums, each under both evaluation strategies.
//!
//! Terms are generated incrementally through
//! `binom(x+k+1, 2k+2) = binom(x+k, 2k) (x+k+1)(x-k) / ((2k+1)(2k+2))`,
//! using the identity binom(x,k)binom(x+k,k) = binom(x+k,2k)binom(2k,k)
//! (verified exactly by the identities module).

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    binom_int, binom_rat, int_valuation, rat, rat_int, Int, Padic, PadicContext, Rat, Residue,
};

/// Prefactor applied to the whole sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    None,
    TwoXPlusOne,
}

/// Summation upper index, fixed relative to p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Upper {
    PMinus1,
    PMinus2,
}

impl Upper {
    pub fn index(self, p: u64) -> u64 {
        match self {
            Upper::PMinus1 => p - 1,
            Upper::PMinus2 => p - 2,
        }
    }
}

/// One member of the central sum family.
#[derive(Clone, Debug)]
pub struct SumSpec {
    pub c: Rat,
    pub d: u32,
    pub scale: Scale,
    pub upper: Upper,
}

impl SumSpec {
    pub fn new(c: Rat, d: u32, scale: Scale, upper: Upper) -> Self {
        assert!(d <= 2, "d must lie in {{0, 1, 2}}");
        SumSpec { c, d, scale, upper }
    }
}

/// The named sum families used by the lemma identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaFamily {
    /// c = -4, d = 2, (2x+1) prefactor.
    F,
    /// c = -2, d = 0.
    G,
    /// c = -2, d = 2, (2x+1) prefactor.
    H,
    /// c = -4, d = 0.
    D0,
    /// c = -4, d = 1.
    D1,
}

impl LemmaFamily {
    pub fn c(self) -> Rat {
        match self {
            LemmaFamily::F | LemmaFamily::D0 | LemmaFamily::D1 => rat_int(-4),
            LemmaFamily::G | LemmaFamily::H => rat_int(-2),
        }
    }

    pub fn d(self) -> u32 {
        match self {
            LemmaFamily::G | LemmaFamily::D0 => 0,
            LemmaFamily::D1 => 1,
            LemmaFamily::F | LemmaFamily::H => 2,
        }
    }

    pub fn scale(self) -> Scale {
        match self {
            LemmaFamily::F | LemmaFamily::H => Scale::TwoXPlusOne,
            _ => Scale::None,
        }
    }
}

/// Single term binom(x+k, 2k) c^k / (dk+1); the scale factor is not applied
/// per-term.
pub fn core_term(x: &Rat, k: u64, spec: &SumSpec) -> Rat {
    let ck = spec.c.pow(k as i32);
    binom_rat(&(x + rat_int(k as i64)), 2 * k) * ck / rat_int((spec.d as i64) * k as i64 + 1)
}

/// Exact value of the (optionally scaled) family sum up to index n.
pub fn family_sum_exact(x: &Rat, c: &Rat, d: u32, scale: Scale, n: u64) -> Rat {
    let mut term = Rat::one();
    let mut sum = Rat::one(); // k = 0 term
    for k in 0..n {
        let ki = k as i64;
        let num = (x + rat_int(ki + 1)) * (x - rat_int(ki)) * c * rat_int(d as i64 * ki + 1);
        let den = rat_int((2 * ki + 1) * (2 * ki + 2) * (d as i64 * (ki + 1) + 1));
        if num.is_zero() {
            break; // once a factor vanishes every later term is zero
        }
        term *= num / den;
        sum += &term;
    }
    match scale {
        Scale::None => sum,
        Scale::TwoXPlusOne => (rat_int(2) * x + rat_int(1)) * sum,
    }
}

pub fn core_sum_exact(x: &Rat, spec: &SumSpec, p: u64) -> Result<Rat> {
    if (x.denom() % Int::from(p)).is_zero() {
        return Err(Error::DenominatorDivisible);
    }
    Ok(family_sum_exact(x, &spec.c, spec.d, spec.scale, spec.upper.index(p)))
}

/// Running fraction accumulator for p-adic sums: keeps numerator and
/// denominator separate so no per-term inversion is needed.
pub struct PadicSum<'a> {
    ctx: &'a PadicContext,
    num: Padic,
    den: Padic,
}

impl<'a> PadicSum<'a> {
    pub fn new(ctx: &'a PadicContext) -> Self {
        PadicSum { ctx, num: Padic::exact_zero(), den: one_padic(ctx) }
    }

    /// Add the term t_num / t_den (t_den must be non-zero).
    pub fn add_ratio(&mut self, t_num: &Padic, t_den: &Padic) {
        debug_assert!(!matches!(t_den, Padic::Zero { .. }));
        let lhs = self.ctx.padic_mul(&self.num, t_den);
        let rhs = self.ctx.padic_mul(t_num, &self.den);
        self.num = self.ctx.padic_add(&lhs, &rhs);
        self.den = self.ctx.padic_mul(&self.den, t_den);
    }

    pub fn finish(self) -> Result<Padic> {
        self.ctx.padic_div(&self.num, &self.den)
    }
}

fn one_padic(ctx: &PadicContext) -> Padic {
    ctx.padic_from_int(&Int::one())
}

/// Multiply by an exact integer, tracking its p-valuation; None when f = 0.
fn padic_mul_int(ctx: &PadicContext, a: &Padic, f: &Int) -> Option<Padic> {
    if f.is_zero() {
        return None;
    }
    let (v, unit) = int_valuation(f, ctx.p).expect("non-zero");
    let u = Residue::from_int(&unit, ctx.p, ctx.k).value;
    Some(ctx.padic_mul_unit(a, v, &u))
}

fn padic_div_int(ctx: &PadicContext, a: &Padic, f: &Int) -> Padic {
    debug_assert!(!f.is_zero());
    let (v, unit) = int_valuation(f, ctx.p).expect("non-zero");
    let u = Residue::from_int(&unit, ctx.p, ctx.k);
    let inv = crate::numeric::inv_mod(&u).expect("unit");
    ctx.padic_mul_unit(a, -v, &inv.value)
}

/// p-adic evaluation of the family sum; equals the exact value at every
/// precision within reach of the context.
pub fn family_sum_padic(
    ctx: &PadicContext,
    x: &Rat,
    c: &Rat,
    d: u32,
    scale: Scale,
    n: u64,
) -> Result<Padic> {
    if (x.denom() % Int::from(ctx.p)).is_zero() {
        return Err(Error::DenominatorDivisible);
    }
    let (a, b) = (x.numer().clone(), x.denom().clone());
    let b_sq = &b * &b;

    let mut term_num = one_padic(ctx);
    let mut term_den = one_padic(ctx);
    let mut acc = PadicSum::new(ctx);
    acc.add_ratio(&term_num, &term_den);

    // running linear factors a + (k+1) b and a - k b
    let mut rise = &a + &b;
    let mut fall = a.clone();
    for k in 0..n {
        let ki = k as i64;
        let mut next = padic_mul_int(ctx, &term_num, &rise).and_then(|t| {
            padic_mul_int(ctx, &t, &fall)
        });
        next = next.and_then(|t| padic_mul_int(ctx, &t, c.numer()));
        next = next.and_then(|t| padic_mul_int(ctx, &t, &Int::from(d as i64 * ki + 1)));
        let Some(next) = next else {
            break; // a vanished factor kills all remaining terms
        };
        term_num = next;
        for f in [
            b_sq.clone(),
            Int::from(2 * ki + 1),
            Int::from(2 * ki + 2),
            c.denom().clone(),
            Int::from(d as i64 * (ki + 1) + 1),
        ] {
            term_den = padic_mul_int(ctx, &term_den, &f).expect("denominator factors non-zero");
        }
        acc.add_ratio(&term_num, &term_den);
        rise += &b;
        fall -= &b;
    }

    let sum = acc.finish()?;
    match scale {
        Scale::None => Ok(sum),
        Scale::TwoXPlusOne => {
            let two_x_plus_one = Int::from(2) * &a + &b;
            match padic_mul_int(ctx, &sum, &two_x_plus_one) {
                Some(v) => Ok(padic_div_int(ctx, &v, &b)),
                None => Ok(Padic::exact_zero()),
            }
        }
    }
}

pub fn core_sum_padic(ctx: &PadicContext, x: &Rat, spec: &SumSpec) -> Result<Padic> {
    family_sum_padic(ctx, x, &spec.c, spec.d, spec.scale, spec.upper.index(ctx.p))
}

/// The auxiliary sums quoted from the literature. Kinds whose statement
/// multiplies by p include that factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AuxKind {
    /// p * sum_{k=1}^{p-1} 4^k / (k binom(2k,k))
    Mt4K,
    /// p * sum_{k=1}^{p-1} 4^k / (k^2 binom(2k,k))
    Mt4K2,
    /// p * sum_{k=1}^{p-1} 4^k / ((2k+1) binom(2k,k))
    Mt4Odd,
    /// p * sum_{k=1}^{p-1} 2^k / (k binom(2k,k))
    Mt2K,
    /// p * sum_{k=1}^{p-1} 2^k / (k^2 binom(2k,k))
    Mt2K2,
    /// p * sum_{k=1}^{p-1} 2^k / ((2k+1) binom(2k,k))
    Mt2Odd,
    /// p * sum_{k=0}^{p-1} binom(2k,k) / ((2k+1) 4^k)
    SunCentral,
    /// sum_{k=0}^{p-1} binom(3k,k) 2^k
    Zps3,
    /// sum_{k=0}^{p-1} binom(3k,k) (4/27)^k
    Zws3Center,
    /// sum_{k=0}^{p-1} binom(3k,k+1) (4/27)^k
    Zws3Plus,
    /// sum_{k=1}^{p-1} binom(3k,k-1) (4/27)^k
    Zws3Minus,
}

impl AuxKind {
    /// (first index, initial term, whether the statement scales by p)
    fn shape(self) -> (u64, Rat, bool) {
        match self {
            AuxKind::Mt4K => (1, rat_int(2), true),
            AuxKind::Mt4K2 => (1, rat_int(2), true),
            AuxKind::Mt4Odd => (1, rat(2, 3), true),
            AuxKind::Mt2K => (1, rat_int(1), true),
            AuxKind::Mt2K2 => (1, rat_int(1), true),
            AuxKind::Mt2Odd => (1, rat(1, 3), true),
            AuxKind::SunCentral => (0, rat_int(1), true),
            AuxKind::Zps3 => (0, rat_int(1), false),
            AuxKind::Zws3Center => (0, rat_int(1), false),
            AuxKind::Zws3Plus | AuxKind::Zws3Minus => {
                unreachable!("handled through the center term")
            }
        }
    }

    /// Term ratio u_{k+1}/u_k as integer factor lists (numerator, denominator).
    fn ratio(self, k: u64) -> (Vec<i64>, Vec<i64>) {
        let k = k as i64;
        match self {
            AuxKind::Mt4K => (vec![2 * k], vec![2 * k + 1]),
            AuxKind::Mt4K2 => (vec![2, k, k], vec![2 * k + 1, k + 1]),
            AuxKind::Mt4Odd => (vec![2, k + 1], vec![2 * k + 3]),
            AuxKind::Mt2K => (vec![k], vec![2 * k + 1]),
            AuxKind::Mt2K2 => (vec![k, k], vec![2 * k + 1, k + 1]),
            AuxKind::Mt2Odd => (vec![k + 1], vec![2 * k + 3]),
            AuxKind::SunCentral => (vec![2 * k + 1, 2 * k + 1], vec![2, k + 1, 2 * k + 3]),
            AuxKind::Zps3 => (vec![3, 3 * k + 1, 3 * k + 2], vec![2 * k + 1, k + 1]),
            AuxKind::Zws3Center => (vec![2, 3 * k + 1, 3 * k + 2], vec![9, 2 * k + 1, k + 1]),
            AuxKind::Zws3Plus | AuxKind::Zws3Minus => unreachable!(),
        }
    }

    /// Per-k multiplier on the center term for the shifted-column sums.
    fn column_shift(self, k: u64) -> Option<(i64, i64)> {
        let k = k as i64;
        match self {
            AuxKind::Zws3Plus => Some((2 * k, k + 1)),
            AuxKind::Zws3Minus => Some((k, 2 * k + 1)),
            _ => None,
        }
    }
}

/// Exact rational value of an auxiliary sum.
pub fn aux_sum_exact(kind: AuxKind, p: u64) -> Rat {
    if kind.column_shift(0).is_some() {
        // shifted columns ride on the running center term
        let mut term = Rat::one();
        let mut acc = Rat::zero();
        for k in 0..=(p - 1) {
            if k > 0 {
                let (num, den) = AuxKind::Zws3Center.ratio(k - 1);
                term *= ints_to_rat(&num, &den);
            }
            let (sn, sd) = kind.column_shift(k).expect("column kind");
            if sn != 0 {
                acc += &term * rat(sn, sd);
            }
        }
        return acc;
    }
    let (k0, first, p_scaled) = kind.shape();
    let mut term = first;
    let mut acc = term.clone();
    for k in k0..(p - 1) {
        let (num, den) = kind.ratio(k);
        term *= ints_to_rat(&num, &den);
        acc += &term;
    }
    if p_scaled {
        acc * rat_int(p as i64)
    } else {
        acc
    }
}

fn ints_to_rat(num: &[i64], den: &[i64]) -> Rat {
    let mut n = Int::one();
    for f in num {
        n *= Int::from(*f);
    }
    let mut d = Int::one();
    for f in den {
        d *= Int::from(*f);
    }
    Rat::new(n, d)
}

/// p-adic evaluation of an auxiliary sum.
pub fn aux_sum_padic(ctx: &PadicContext, kind: AuxKind, p: u64) -> Result<Padic> {
    debug_assert_eq!(ctx.p, p);
    if kind.column_shift(0).is_some() {
        let mut term_num = one_padic(ctx);
        let mut term_den = one_padic(ctx);
        let mut acc = PadicSum::new(ctx);
        for k in 0..=(p - 1) {
            if k > 0 {
                let (num, den) = AuxKind::Zws3Center.ratio(k - 1);
                for f in num {
                    term_num = padic_mul_int(ctx, &term_num, &Int::from(f))
                        .expect("center factors non-zero");
                }
                for f in den {
                    term_den = padic_mul_int(ctx, &term_den, &Int::from(f))
                        .expect("denominator non-zero");
                }
            }
            let (sn, sd) = kind.column_shift(k).expect("column kind");
            if sn == 0 {
                continue;
            }
            let shifted = padic_mul_int(ctx, &term_num, &Int::from(sn)).expect("non-zero");
            let shifted_den =
                padic_mul_int(ctx, &term_den, &Int::from(sd)).expect("non-zero");
            acc.add_ratio(&shifted, &shifted_den);
        }
        return acc.finish();
    }

    let (k0, first, p_scaled) = kind.shape();
    let mut term_num = ctx.padic_from_int(first.numer());
    let mut term_den = ctx.padic_from_int(first.denom());
    let mut acc = PadicSum::new(ctx);
    acc.add_ratio(&term_num, &term_den);
    for k in k0..(p - 1) {
        let (num, den) = kind.ratio(k);
        for f in num {
            term_num =
                padic_mul_int(ctx, &term_num, &Int::from(f)).expect("aux factors non-zero");
        }
        for f in den {
            term_den = padic_mul_int(ctx, &term_den, &Int::from(f)).expect("non-zero");
        }
        acc.add_ratio(&term_num, &term_den);
    }
    let sum = acc.finish()?;
    if p_scaled {
        Ok(ctx.padic_mul_unit(&sum, 1, &num_bigint::BigUint::from(1u32)))
    } else {
        Ok(sum)
    }
}

/// Closed-form right-hand sides of the pairing lemmas
/// (F_n(x) + F_n(x+1), G_n(x) + G_n(x+2), H_n(x) + H_n(x+2), and the two
/// single-n difference identities for the D families).
pub fn lemma_rhs(family: LemmaFamily, n: u64, x: &Rat) -> Rat {
    let sign = if n.is_multiple_of(2) { Rat::one() } else { -Rat::one() };
    let c2n = Rat::from(binom_int(2 * n, n));
    let ni = n as i64;
    match family {
        LemmaFamily::F => {
            let pow4 = rat_int(4).pow(ni as i32 + 1);
            sign * pow4 / (rat_int(2 * ni + 1) * &c2n)
                * (x + rat_int(ni + 1))
                * binom_rat(x, n)
                * binom_rat(&(x + rat_int(ni)), n)
        }
        LemmaFamily::G => {
            let pow2 = rat_int(2).pow(ni as i32 + 1);
            sign * pow2 / &c2n
                * binom_rat(&(x + rat_int(1)), n)
                * binom_rat(&(x + rat_int(1 + ni)), n)
        }
        LemmaFamily::H => {
            let pow2 = rat_int(2).pow(ni as i32 + 1);
            sign * pow2 * (rat_int(2) * x + rat_int(3)) / (rat_int(2 * ni + 1) * &c2n)
                * binom_rat(&(x + rat_int(1)), n)
                * binom_rat(&(x + rat_int(1 + ni)), n)
        }
        LemmaFamily::D0 => {
            let pow4 = rat_int(4).pow(ni as i32 + 1);
            sign * pow4 * (rat_int(ni) - x) * (rat_int(ni + 1) + x)
                / (rat_int(2 * ni + 1) * &c2n)
                * binom_rat(x, n)
                * binom_rat(&(x + rat_int(ni)), n)
        }
        LemmaFamily::D1 => {
            let pow2 = rat_int(2).pow(2 * ni as i32 + 1);
            rat_int(1)
                + sign * pow2 * (rat_int(ni) - x) * (rat_int(ni + 1) + x)
                    / (rat_int(ni + 1) * &c2n)
                    * binom_rat(x, n)
                    * binom_rat(&(x + rat_int(ni)), n)
        }
    }
}
