//! Declarative registry binding every verified congruence to evaluators of
//! both sides, plus the suite runner and the modulus auditor.

use std::time::Instant;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    binom_int, binom_rat, mod_reduce, rat, rat_int, rat_to_string, Int, Padic, PadicContext,
    Rat, Residue,
};
use crate::padicmap;
use crate::special::{
    alt_harmonic, alt_harmonic_exact, alt_odd_harmonic, alt_odd_harmonic_exact,
    alt_odd_harmonic_shift, alt_odd_harmonic_shift_exact, bernoulli_exact, euler_numbers,
    euler_poly, fermat_quotient, legendre_i64,
};
use crate::sums::{
    aux_sum_exact, aux_sum_padic, core_sum_exact, core_sum_padic, AuxKind, Scale, SumSpec, Upper,
};
use crate::xstream::{substream_seed, RatStream};

/// Evaluation strategy for one outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Strategy {
    Exact,
    Padic,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Exact => "exact",
            Strategy::Padic => "padic",
        }
    }
}

/// Strategy selection for a whole run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyChoice {
    Exact,
    Padic,
    Both,
}

impl StrategyChoice {
    pub fn strategies(self) -> &'static [Strategy] {
        match self {
            StrategyChoice::Exact => &[Strategy::Exact],
            StrategyChoice::Padic => &[Strategy::Padic],
            StrategyChoice::Both => &[Strategy::Exact, Strategy::Padic],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StrategyChoice::Exact => "exact",
            StrategyChoice::Padic => "padic",
            StrategyChoice::Both => "both",
        }
    }
}

/// Parity constraint on the least nonnegative residue of a free x.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidueParity {
    Even,
    Odd,
}

/// How a check is parameterized beyond the prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgMode {
    /// The check depends on p only.
    None,
    /// Free p-adic integer x, screened by forbidden residues / parity.
    FreeX { forbidden: &'static [i64], parity: Option<ResidueParity> },
    /// Free tail parameter t; the sum argument is p*t or p*t - 1.
    FreeT,
    /// Free (t, k) with k in 1..p.
    FreeTk,
    /// Free (s, m) with m in 1..p.
    FreeSm,
}

/// One registered congruence.
#[derive(Clone, Debug)]
pub struct CheckSpec {
    pub id: &'static str,
    pub description: &'static str,
    pub paper_anchor: &'static str,
    pub modulus_exponent: u32,
    pub min_prime: u64,
    pub max_prime: Option<u64>,
    pub arg: ArgMode,
}

const NO_FORBIDDEN: &[i64] = &[];
const FORBID_0_M1: &[i64] = &[0, -1];

macro_rules! check {
    ($id:expr, $desc:expr, $anchor:expr, $m:expr, $min:expr, $arg:expr) => {
        CheckSpec {
            id: $id,
            description: $desc,
            paper_anchor: $anchor,
            modulus_exponent: $m,
            min_prime: $min,
            max_prime: None,
            arg: $arg,
        }
    };
}

const FREE_X: ArgMode = ArgMode::FreeX { forbidden: NO_FORBIDDEN, parity: None };

/// The full check registry, in id order.
pub fn registry() -> &'static [CheckSpec] {
    static REGISTRY: std::sync::OnceLock<Vec<CheckSpec>> = std::sync::OnceLock::new();
    REGISTRY.get_or_init(build_registry)
}

pub fn find_check(id: &str) -> Option<&'static CheckSpec> {
    registry().iter().find(|c| c.id == id)
}

fn build_registry() -> Vec<CheckSpec> {
    let mut v = vec![
        check!("thm1", "(2x+1) sum of (-4)^k family, d=2, vs Euler closed form mod p^2",
            "Theorem 1.1", 2, 3, FREE_X),
        check!("thm2", "(-2)^k family, d=0, vs Euler closed form mod p^2",
            "Theorem 1.2", 2, 3, FREE_X),
        check!("thm3", "(2x+1) (-2)^k family, d=2, vs Euler closed form mod p^2",
            "Theorem 1.3", 2, 3, FREE_X),
        check!("cor1.1a", "sum binom(4k,2k)/((2k+1)16^k) mod p^2",
            "Corollary 1.1, eq 1", 2, 3, ArgMode::None),
        check!("cor1.1b", "sum binom(3k,k)/(2k+1) (4/27)^k mod p^2",
            "Corollary 1.1, eq 2", 2, 5, ArgMode::None),
        check!("cor1.1c", "sum binom(6k,3k)binom(3k,k)/((2k+1)108^k binom(2k,k)) mod p^2",
            "Corollary 1.1, eq 3", 2, 5, ArgMode::None),
        check!("cor1.2a", "unscaled (-4)^k family, d=0, free x, mod p^2",
            "Corollary 1.2, first display", 2, 3, FREE_X),
        check!("cor1.2b", "2x(x+1) times d=1 sum to p-2 vs d=0 sum correction, mod p^2",
            "Corollary 1.2, second display", 2, 3,
            ArgMode::FreeX { forbidden: FORBID_0_M1, parity: None }),
        check!("cor1.3a", "sum binom(4k,2k)/16^k mod p^2",
            "Corollary 1.3, eq 1", 2, 3, ArgMode::None),
        check!("cor1.3b", "sum_{k<=p-2} binom(4k,2k)/((k+1)16^k) mod p^2",
            "Corollary 1.3, eq 2", 2, 5, ArgMode::None),
        check!("cor1.3c", "sum binom(3k,k)(4/27)^k mod p^2",
            "Corollary 1.3, eq 3", 2, 5, ArgMode::None),
        check!("cor1.3d", "sum_{k<=p-2} binom(3k,k)/(k+1) (4/27)^k mod p^2",
            "Corollary 1.3, eq 4", 2, 5, ArgMode::None),
        check!("cor1.3e", "sum binom(6k,3k)binom(3k,k)/(108^k binom(2k,k)) mod p^2",
            "Corollary 1.3, eq 5", 2, 5, ArgMode::None),
        check!("cor1.3f", "sum_{k<=p-2} binom(6k,3k)binom(3k,k)/((k+1)108^k binom(2k,k)) mod p^2",
            "Corollary 1.3, eq 6", 2, 7, ArgMode::None),
        check!("cor-2a", "sum binom(4k,2k)/32^k, case split on p mod 8",
            "Corollary 2.1, eq 1", 2, 3, ArgMode::None),
        check!("cor-2b", "sum binom(3k,k)(2/27)^k mod p^2",
            "Corollary 2.1, eq 2", 2, 5, ArgMode::None),
        check!("cor-2c", "sum binom(6k,3k)binom(3k,k)/(216^k binom(2k,k)) mod p^2",
            "Corollary 2.1, eq 3", 2, 5, ArgMode::None),
        check!("cor-2k1a", "sum binom(4k,2k)/((2k+1)32^k), case split on p mod 8",
            "Corollary 3.1, eq 1", 2, 3, ArgMode::None),
        check!("cor-2k1b", "sum binom(3k,k)/(2k+1) (2/27)^k mod p^2",
            "Corollary 3.1, eq 2", 2, 5, ArgMode::None),
        check!("cor-2k1c", "sum binom(6k,3k)binom(3k,k)/((2k+1)216^k binom(2k,k)) mod p^2",
            "Corollary 3.1, eq 3", 2, 5, ArgMode::None),
        check!("lem-mt4a", "p sum 4^k/(k binom(2k,k)) mod p^2",
            "Lemma 2.2, eq 1", 2, 3, ArgMode::None),
        check!("lem-mt4b", "p sum 4^k/(k^2 binom(2k,k)) mod p^2",
            "Lemma 2.2, eq 2", 2, 3, ArgMode::None),
        check!("lem-mt4c", "p sum 4^k/((2k+1) binom(2k,k)) = 0 mod p^2",
            "Lemma 2.2, eq 3", 2, 3, ArgMode::None),
        check!("lem-fpt", "F_{p-1}(pt) vs 2t+1+4pt(t+1)q_p(2) mod p^2",
            "Lemma 2.3", 2, 3, ArgMode::FreeT),
        check!("lem-mt2a", "p sum 2^k/(k binom(2k,k)) mod p^2",
            "Lemma 3.2, eq 1", 2, 3, ArgMode::None),
        check!("lem-mt2b", "p sum 2^k/(k^2 binom(2k,k)) mod p^2",
            "Lemma 3.2, eq 2", 2, 3, ArgMode::None),
        check!("lem-gpt-a", "G_{p-1}(pt) closed form mod p^2",
            "Lemma 3.3, eq 1", 2, 3, ArgMode::FreeT),
        check!("lem-gpt-b", "G_{p-1}(pt-1) closed form mod p^2",
            "Lemma 3.3, eq 2", 2, 3, ArgMode::FreeT),
        check!("lem-2k1sum", "p sum 2^k/((2k+1) binom(2k,k)) mod p^2",
            "Lemma 4.2", 2, 3, ArgMode::None),
        check!("lem-hpt-a", "H_{p-1}(pt) closed form mod p^2",
            "Lemma 4.3, eq 1", 2, 3, ArgMode::FreeT),
        check!("lem-hpt-b", "H_{p-1}(pt-1) closed form mod p^2",
            "Lemma 4.3, eq 2", 2, 3, ArgMode::FreeT),
        check!("aux-sun-p3", "p sum binom(2k,k)/((2k+1)4^k) mod p^3",
            "Remark 1.1", 3, 5, ArgMode::None),
        check!("aux-zps", "sum binom(3k,k)2^k mod p",
            "Zhao-Pan-Sun display", 1, 7, ArgMode::None),
        check!("aux-zws1", "sum binom(3k,k)(4/27)^k = 1/9 mod p",
            "Eq (1.1)", 1, 5, ArgMode::None),
        check!("aux-zws2", "sum binom(3k,k+1)(4/27)^k = -16/9 mod p",
            "Eq (1.2)", 1, 5, ArgMode::None),
        check!("aux-zws3", "sum binom(3k,k-1)(4/27)^k = -4/9 mod p",
            "Eq (1.3)", 1, 5, ArgMode::None),
        check!("aux-2pp", "binom(2p,p) = 2 mod p^2",
            "central binomial fact", 2, 3, ArgMode::None),
        check!("aux-carlitz", "p B_{p-1} = p-1 mod p",
            "Carlitz fact", 1, 3, ArgMode::None),
        check!("prf-ptk", "binom(pt,k)binom(pt+k,k) expansion mod p^3",
            "Eq (ptkptk)", 3, 3, ArgMode::FreeTk),
        check!("prf-pt1k", "binom(pt-1,k)binom(pt-1+k,k) expansion mod p^3",
            "Eq (pt-1k)", 3, 3, ArgMode::FreeTk),
        check!("prf-zhsmpt", "binom(m+ps-1,p-1) expansion mod p^3",
            "Lemma 2.4", 3, 3, ArgMode::FreeSm),
        check!("prf-harm", "alternating harmonic sum vs Euler bridge mod p",
            "proof of Theorem 1.1, harmonic bridge", 1, 3, FREE_X),
        check!("prf-key1-1", "alt harmonic to <x>/2 vs Euler form (even residue)",
            "Eq (-2key1-1)", 1, 3,
            ArgMode::FreeX { forbidden: NO_FORBIDDEN, parity: Some(ResidueParity::Even) }),
        check!("prf-key1-2", "alt odd-denominator sum vs Euler form (even residue)",
            "Eq (-2key1-2)", 1, 3,
            ArgMode::FreeX { forbidden: NO_FORBIDDEN, parity: Some(ResidueParity::Even) }),
        check!("prf-key2-3", "alt harmonic to (<x>-1)/2 vs Euler form (odd residue)",
            "Eq (-2key2-3)", 1, 3,
            ArgMode::FreeX { forbidden: NO_FORBIDDEN, parity: Some(ResidueParity::Odd) }),
        check!("prf-key2-4", "alt shifted odd sum vs Euler form (odd residue)",
            "Eq (-2key2-4)", 1, 3,
            ArgMode::FreeX { forbidden: NO_FORBIDDEN, parity: Some(ResidueParity::Odd) }),
    ];
    // the Bernoulli route is exact-only; keep it at desk scale
    for c in v.iter_mut() {
        if c.id == "aux-carlitz" {
            c.max_prime = Some(100);
        }
    }
    v.sort_by(|a, b| a.id.cmp(b.id));
    v
}

/// Concrete parameter for one evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum CheckArg {
    None,
    X(Rat),
    T(Rat),
    Tk(Rat, u64),
    Sm(Rat, u64),
}

impl CheckArg {
    pub fn rat(&self) -> Option<&Rat> {
        match self {
            CheckArg::None => None,
            CheckArg::X(x) => Some(x),
            CheckArg::T(t) => Some(t),
            CheckArg::Tk(t, _) => Some(t),
            CheckArg::Sm(s, _) => Some(s),
        }
    }
}

/// One evaluated side: a residue, or the error that stopped it.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalValue {
    Value(Residue),
    Failed(String),
}

impl EvalValue {
    pub fn as_string(&self) -> String {
        match self {
            EvalValue::Value(r) => r.value.to_string(),
            EvalValue::Failed(e) => format!("!{e}"),
        }
    }
}

/// Record of one evaluation of one check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub check_id: &'static str,
    pub p: u64,
    pub x: Option<Rat>,
    pub modulus_exponent: u32,
    pub lhs: EvalValue,
    pub rhs: EvalValue,
    pub pass: bool,
    pub strategy: Strategy,
    /// absolute precision carried by the evaluation (digits)
    pub prec: i64,
    pub micros: u64,
    pub sample: u32,
}

impl CheckOutcome {
    pub fn modulus(&self) -> num_bigint::BigUint {
        num_bigint::BigUint::from(self.p).pow(self.modulus_exponent)
    }

    pub fn sort_key(&self) -> (String, u64, String, &'static str, u32) {
        (
            self.check_id.to_string(),
            self.p,
            self.x.as_ref().map(rat_to_string).unwrap_or_default(),
            self.strategy.name(),
            self.sample,
        )
    }
}

/// A (check, p) pair whose preconditions rule it out.
#[derive(Clone, Debug)]
pub struct SkipRecord {
    pub check_id: &'static str,
    pub p: u64,
    pub reason: String,
}

// ---------------------------------------------------------------------------
// side evaluators
// ---------------------------------------------------------------------------

fn res(q: &Rat, p: u64, m: u32) -> Result<Residue> {
    mod_reduce(q, p, m)
}

fn sign_for(exp: u64) -> Rat {
    if exp.is_multiple_of(2) {
        Rat::one()
    } else {
        -Rat::one()
    }
}

fn q2_mod(p: u64, exp: u32) -> Residue {
    fermat_quotient(2, p, exp).expect("p odd")
}

/// Evaluate a core family sum to a residue mod p^m under the given strategy,
/// returning the precision actually carried.
fn lhs_core(p: u64, m: u32, strategy: Strategy, x: &Rat, spec: &SumSpec) -> Result<(Residue, i64)> {
    match strategy {
        Strategy::Exact => {
            let v = core_sum_exact(x, spec, p)?;
            let r = mod_reduce(&v, p, m).map_err(|e| match e {
                Error::NotPIntegral => Error::IntegralityViolation(format!(
                    "sum at x = {x} has negative valuation at p = {p}"
                )),
                other => other,
            })?;
            Ok((r, m as i64))
        }
        Strategy::Padic => padic_retry(p, m, |ctx| core_sum_padic(ctx, x, spec)),
    }
}

/// Run a p-adic evaluation at working precision m+4, retrying once with the
/// precision doubled before giving up.
fn padic_retry(
    p: u64,
    m: u32,
    f: impl Fn(&PadicContext) -> Result<Padic>,
) -> Result<(Residue, i64)> {
    let mut k = m + 4;
    for attempt in 0..2 {
        let ctx = PadicContext::new(p, k);
        match f(&ctx).and_then(|v| {
            let prec = v.prec().min(k as i64);
            match ctx.padic_to_residue(&v, m) {
                Ok(r) => Ok((r, prec)),
                Err(Error::NotPIntegral) => Err(Error::IntegralityViolation(format!(
                    "p-adic sum has negative valuation at p = {p}"
                ))),
                Err(e) => Err(e),
            }
        }) {
            Ok(out) => return Ok(out),
            Err(Error::PrecisionExhausted) if attempt == 0 => {
                k = 2 * (m + 4);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::PrecisionExhausted)
}

fn aux_lhs(p: u64, m: u32, strategy: Strategy, kind: AuxKind) -> Result<(Residue, i64)> {
    match strategy {
        Strategy::Exact => {
            let v = aux_sum_exact(kind, p);
            Ok((mod_reduce(&v, p, m)?, m as i64))
        }
        Strategy::Padic => padic_retry(p, m, |ctx| aux_sum_padic(ctx, kind, p)),
    }
}

/// rat_part + p * sum_i coeff_i E_{p-2}(arg_i), reduced mod p^m.
fn rhs_affine_euler(p: u64, m: u32, rat_part: &Rat, terms: &[(Rat, Rat)]) -> Result<Residue> {
    let mut acc = res(rat_part, p, m)?;
    if m >= 2 {
        let exp = m - 1;
        let mut euler_acc = Residue::zero(p, exp);
        for (coeff, arg) in terms {
            let e = euler_poly((p - 2) as usize, arg, p, exp)?;
            euler_acc = euler_acc.add(&res(coeff, p, exp)?.mul(&e));
        }
        acc = acc.add(&euler_acc.lift_mul_p(1));
    }
    Ok(acc)
}

/// RHS of the first theorem: (-1)^<x> (2t+1) - 2p t(t+1) E_{p-2}(-x).
pub fn rhs_thm1(x: &Rat, p: u64, m: u32) -> Result<Residue> {
    let d = padicmap::decompose(x, p)?;
    let t = &d.tail;
    let rat_part = sign_for(d.residue) * (rat_int(2) * t + rat_int(1));
    let coeff = rat_int(-2) * t * (t + rat_int(1));
    rhs_affine_euler(p, m, &rat_part, &[(coeff, -x.clone())])
}

/// RHS of the second theorem (unscaled (-2)^k family).
pub fn rhs_thm2(x: &Rat, p: u64, m: u32) -> Result<Residue> {
    let d = padicmap::decompose(x, p)?;
    let t = &d.tail;
    let leg = rat_int(legendre_i64(-1, p) as i64);
    let inner = rat_int(1) + t - sign_for(d.residue) * &leg * t;
    let rat_part = sign_for(d.half_index.1) * inner;
    let coeff = rat(-1, 2) * t * (t + rat_int(1));
    let a1 = (x + rat_int(1)) / rat_int(2);
    let a2 = -x / rat_int(2);
    rhs_affine_euler(p, m, &rat_part, &[(coeff.clone(), a1), (coeff, a2)])
}

/// RHS of the third theorem (scaled (-2)^k family). The Euler tail is the
/// difference E_{p-2}(-x/2) - E_{p-2}((x+1)/2), the form the proof and the
/// derived corollaries use.
pub fn rhs_thm3(x: &Rat, p: u64, m: u32) -> Result<Residue> {
    let d = padicmap::decompose(x, p)?;
    let t = &d.tail;
    let leg = rat_int(legendre_i64(-1, p) as i64);
    let inner = rat_int(1) + t + sign_for(d.residue) * &leg * t;
    let rat_part = sign_for(d.half_index.0) * inner;
    let coeff = rat(-1, 2) * t * (t + rat_int(1));
    let a1 = (x + rat_int(1)) / rat_int(2);
    let a2 = -x / rat_int(2);
    rhs_affine_euler(p, m, &rat_part, &[(-coeff.clone(), a1), (coeff, a2)])
}

/// Fixed argument and sum shape of each corollary LHS.
fn corollary_lhs(id: &str) -> (Rat, SumSpec) {
    let (num, den, c, d, upper) = match id {
        "cor1.1a" => (-1, 4, -4, 2, Upper::PMinus1),
        "cor1.1b" => (-1, 3, -4, 2, Upper::PMinus1),
        "cor1.1c" => (-1, 6, -4, 2, Upper::PMinus1),
        "cor1.3a" => (-1, 4, -4, 0, Upper::PMinus1),
        "cor1.3b" => (-1, 4, -4, 1, Upper::PMinus2),
        "cor1.3c" => (-1, 3, -4, 0, Upper::PMinus1),
        "cor1.3d" => (-1, 3, -4, 1, Upper::PMinus2),
        "cor1.3e" => (-1, 6, -4, 0, Upper::PMinus1),
        "cor1.3f" => (-1, 6, -4, 1, Upper::PMinus2),
        "cor-2a" => (-1, 4, -2, 0, Upper::PMinus1),
        "cor-2b" => (-1, 3, -2, 0, Upper::PMinus1),
        "cor-2c" => (-1, 6, -2, 0, Upper::PMinus1),
        "cor-2k1a" => (-1, 4, -2, 2, Upper::PMinus1),
        "cor-2k1b" => (-1, 3, -2, 2, Upper::PMinus1),
        "cor-2k1c" => (-1, 6, -2, 2, Upper::PMinus1),
        _ => unreachable!("not a corollary id: {id}"),
    };
    (rat(num, den), SumSpec::new(rat_int(c), d, Scale::None, upper))
}

/// Displayed right-hand side of a corollary, reduced mod p^m.
pub fn rhs_corollary(id: &str, p: u64, m: u32) -> Result<Residue> {
    let pi = rat_int(p as i64);
    let leg2 = rat_int(legendre_i64(2, p) as i64);
    let leg3 = rat_int(legendre_i64(3, p) as i64);
    let s8 = sign_for(p / 8);
    let (rat_part, terms): (Rat, Vec<(Rat, Rat)>) = match id {
        "cor1.1a" => (leg2, vec![(rat(3, 4), rat(1, 4))]),
        "cor1.1b" => (rat_int(1), vec![(rat(4, 3), rat(1, 3))]),
        "cor1.1c" => (leg3, vec![(rat(5, 12), rat(1, 6))]),
        "cor1.3a" => (rat(1, 4) * leg2 + rat(3, 4) * &pi, vec![(rat(3, 16), rat(1, 4))]),
        "cor1.3b" => (
            rat(8, 3) - rat(2, 3) * leg2 + rat(10, 3) * &pi,
            vec![(rat(-1, 2), rat(1, 4))],
        ),
        "cor1.3c" => (rat(1, 9) + rat(8, 9) * &pi, vec![(rat(4, 27), rat(1, 3))]),
        "cor1.3d" => (rat_int(2) + rat(5, 2) * &pi, vec![(rat(-1, 3), rat(1, 3))]),
        "cor1.3e" => (rat(4, 9) * leg3 + rat(5, 9) * &pi, vec![(rat(5, 27), rat(1, 6))]),
        "cor1.3f" => (
            rat(18, 5) - rat(8, 5) * leg3 + rat(26, 5) * &pi,
            vec![(rat(-2, 3), rat(1, 6))],
        ),
        "cor-2a" => {
            let legm2 = rat_int(legendre_i64(-2, p) as i64);
            let base = legm2 * s8;
            let case = if p % 8 == 1 || p % 8 == 7 { base } else { rat(1, 2) * base };
            (case, vec![(rat(3, 32), rat(3, 8)), (rat(3, 32), rat(1, 8))])
        }
        "cor-2b" => (
            rat(1, 3) + rat(2, 3) * leg3,
            vec![(rat(1, 9), rat(1, 3)), (rat(1, 9), rat(1, 6))],
        ),
        "cor-2c" => (
            rat_int(legendre_i64(6, p) as i64),
            vec![(rat(5, 72), rat(5, 12)), (rat(5, 72), rat(1, 12))],
        ),
        "cor-2k1a" => {
            let legm1 = rat_int(legendre_i64(-1, p) as i64);
            let base = legm1 * s8;
            let case = if p % 8 == 1 || p % 8 == 7 { base } else { rat_int(2) * base };
            (case, vec![(rat(3, 16), rat(1, 8)), (rat(-3, 16), rat(3, 8))])
        }
        "cor-2k1b" => (
            rat_int(-1) + rat_int(2) * leg3,
            vec![(rat(1, 3), rat(1, 6)), (rat(-1, 3), rat(1, 3))],
        ),
        "cor-2k1c" => (leg2, vec![(rat(5, 48), rat(1, 12)), (rat(-5, 48), rat(5, 12))]),
        _ => unreachable!("not a corollary id: {id}"),
    };
    rhs_affine_euler(p, m, &rat_part, &terms)
}

/// rat_part mod p^m plus p * (q-part mod p^(m-1)) with q = q_p(2).
fn rhs_with_q(p: u64, m: u32, rat_part: &Rat, q_coeff: &Rat) -> Result<Residue> {
    let mut acc = res(rat_part, p, m)?;
    if m >= 2 && !q_coeff.is_zero() {
        let exp = m - 1;
        let q = q2_mod(p, exp);
        acc = acc.add(&res(q_coeff, p, exp)?.mul(&q).lift_mul_p(1));
    }
    Ok(acc)
}

fn family_spec(c: i64, d: u32, scale: Scale) -> SumSpec {
    SumSpec::new(rat_int(c), d, scale, Upper::PMinus1)
}

/// Product binom(y,k) binom(y+k,k) reduced mod p^m, under either strategy.
fn binom_pair_lhs(p: u64, m: u32, strategy: Strategy, y: &Rat, k: u64) -> Result<(Residue, i64)> {
    match strategy {
        Strategy::Exact => {
            let v = binom_rat(y, k) * binom_rat(&(y + rat_int(k as i64)), k);
            Ok((res(&v, p, m)?, m as i64))
        }
        Strategy::Padic => padic_retry(p, m, |ctx| {
            let mut acc = ctx.padic_from_int(&Int::one());
            // binom(y,k): product of (y - j), j < k, over k!
            for j in 0..k {
                acc = padic_mul_rat(ctx, &acc, &(y - rat_int(j as i64)));
                if matches!(acc, Padic::Zero { .. }) {
                    break;
                }
            }
            // binom(y+k,k): product of (y + i), 1 <= i <= k
            if !matches!(acc, Padic::Zero { .. }) {
                for i in 1..=k {
                    acc = padic_mul_rat(ctx, &acc, &(y + rat_int(i as i64)));
                    if matches!(acc, Padic::Zero { .. }) {
                        break;
                    }
                }
            }
            let mut fact = Int::one();
            for i in 1..=k {
                fact *= Int::from(i);
            }
            let fact2 = &fact * &fact;
            Ok(padic_div_rat(ctx, &acc, &Rat::from(fact2)))
        }),
    }
}

fn padic_mul_rat(ctx: &PadicContext, a: &Padic, q: &Rat) -> Padic {
    if q.is_zero() {
        return Padic::exact_zero();
    }
    ctx.padic_mul(a, &ctx.padic_from_rat(q))
}

fn padic_div_rat(ctx: &PadicContext, a: &Padic, q: &Rat) -> Padic {
    ctx.padic_div(a, &ctx.padic_from_rat(q)).expect("non-zero rational")
}

/// Evaluate both sides of a check at modulus exponent m.
pub fn eval_sides(
    spec: &CheckSpec,
    p: u64,
    arg: &CheckArg,
    strategy: Strategy,
    m: u32,
) -> Result<(Residue, Residue, i64)> {
    let id = spec.id;
    match id {
        "thm1" | "thm2" | "thm3" => {
            let CheckArg::X(x) = arg else { unreachable!() };
            let sum = match id {
                "thm1" => family_spec(-4, 2, Scale::TwoXPlusOne),
                "thm2" => family_spec(-2, 0, Scale::None),
                _ => family_spec(-2, 2, Scale::TwoXPlusOne),
            };
            let (lhs, prec) = lhs_core(p, m, strategy, x, &sum)?;
            let rhs = match id {
                "thm1" => rhs_thm1(x, p, m)?,
                "thm2" => rhs_thm2(x, p, m)?,
                _ => rhs_thm3(x, p, m)?,
            };
            Ok((lhs, rhs, prec))
        }
        "cor1.2a" => {
            let CheckArg::X(x) = arg else { unreachable!() };
            let (lhs, prec) = lhs_core(p, m, strategy, x, &family_spec(-4, 0, Scale::None))?;
            let d = padicmap::decompose(x, p)?;
            let t = &d.tail;
            let two_x_plus_one = rat_int(2) * x + rat_int(1);
            let tt1 = t * (t + rat_int(1));
            let rat_part = sign_for(d.residue) * (rat_int(2) * t + rat_int(1)) * &two_x_plus_one
                - rat_int(4 * p as i64) * &tt1;
            let coeff = rat_int(-2) * &tt1 * &two_x_plus_one;
            let rhs = rhs_affine_euler(p, m, &rat_part, &[(coeff, -x.clone())])?;
            Ok((lhs, rhs, prec))
        }
        "cor1.2b" => {
            let CheckArg::X(x) = arg else { unreachable!() };
            let scale = rat_int(2) * x * (x + rat_int(1));
            let (lhs, prec) = match strategy {
                Strategy::Exact => {
                    let s = core_sum_exact(
                        x,
                        &SumSpec::new(rat_int(-4), 1, Scale::None, Upper::PMinus2),
                        p,
                    )?;
                    (res(&(scale.clone() * s), p, m)?, m as i64)
                }
                Strategy::Padic => padic_retry(p, m, |ctx| {
                    let s = core_sum_padic(
                        ctx,
                        x,
                        &SumSpec::new(rat_int(-4), 1, Scale::None, Upper::PMinus2),
                    )?;
                    Ok(padic_mul_rat(ctx, &s, &scale))
                })?,
            };
            // rhs re-evaluates the d = 0 sum under the same strategy
            let (d0, _) = lhs_core(p, m, strategy, x, &family_spec(-4, 0, Scale::None))?;
            let d = padicmap::decompose(x, p)?;
            let t = &d.tail;
            let corr = rat_int(1)
                + rat_int(2 * p as i64) * t * (t + rat_int(1)) / (x * (x + rat_int(1)));
            let rhs = d0.sub(&res(&corr, p, m)?);
            Ok((lhs, rhs, prec))
        }
        _ if id.starts_with("cor") => {
            let (x, sum) = corollary_lhs(id);
            let (lhs, prec) = lhs_core(p, m, strategy, &x, &sum)?;
            let rhs = rhs_corollary(id, p, m)?;
            Ok((lhs, rhs, prec))
        }
        "lem-mt4a" => {
            let (lhs, prec) = aux_lhs(p, m, strategy, AuxKind::Mt4K)?;
            let rat_part = rat_int(-2) + rat_int(2 * p as i64);
            let rhs = rhs_with_q(p, m, &rat_part, &rat_int(-4))?;
            Ok((lhs, rhs, prec))
        }
        "lem-mt4b" => {
            let (lhs, prec) = aux_lhs(p, m, strategy, AuxKind::Mt4K2)?;
            // -4 q - 2 p q^2 needs q at full precision
            let q_full = q2_mod(p, m);
            let mut rhs = q_full.mul(&Residue::from_u64(4, p, m)).neg();
            if m >= 2 {
                let q1 = q2_mod(p, m - 1);
                let two = Residue::from_u64(2, p, m - 1);
                rhs = rhs.sub(&two.mul(&q1).mul(&q1).lift_mul_p(1));
            }
            Ok((lhs, rhs, prec))
        }
        "lem-mt4c" => {
            let (lhs, prec) = aux_lhs(p, m, strategy, AuxKind::Mt4Odd)?;
            Ok((lhs, Residue::zero(p, m), prec))
        }
        "lem-mt2a" => {
            let (lhs, prec) = aux_lhs(p, m, strategy, AuxKind::Mt2K)?;
            let rat_part = rat_int(legendre_i64(-1, p) as i64 - 1);
            let rhs = rhs_with_q(p, m, &rat_part, &rat_int(-1))?;
            Ok((lhs, rhs, prec))
        }
        "lem-mt2b" => {
            let (lhs, prec) = aux_lhs(p, m, strategy, AuxKind::Mt2K2)?;
            let rhs = q2_mod(p, m).neg();
            Ok((lhs, rhs, prec))
        }
        "lem-2k1sum" => {
            let (lhs, prec) = aux_lhs(p, m, strategy, AuxKind::Mt2Odd)?;
            let rhs = res(&rat_int(legendre_i64(-1, p) as i64 - p as i64), p, m)?;
            Ok((lhs, rhs, prec))
        }
        "lem-fpt" | "lem-gpt-a" | "lem-gpt-b" | "lem-hpt-a" | "lem-hpt-b" => {
            let CheckArg::T(t) = arg else { unreachable!() };
            let x_arg = match id {
                "lem-fpt" | "lem-gpt-a" | "lem-hpt-a" => rat_int(p as i64) * t,
                _ => rat_int(p as i64) * t - rat_int(1),
            };
            let sum = match id {
                "lem-fpt" => family_spec(-4, 2, Scale::TwoXPlusOne),
                "lem-gpt-a" | "lem-gpt-b" => family_spec(-2, 0, Scale::None),
                _ => family_spec(-2, 2, Scale::TwoXPlusOne),
            };
            let (lhs, prec) = lhs_core(p, m, strategy, &x_arg, &sum)?;
            let leg = rat_int(legendre_i64(-1, p) as i64);
            let (rat_part, q_coeff) = match id {
                "lem-fpt" => (
                    rat_int(2) * t + rat_int(1),
                    rat_int(4) * t * (t + rat_int(1)),
                ),
                "lem-gpt-a" => (
                    rat_int(1) + t - &leg * t,
                    t * (t + rat_int(1)),
                ),
                "lem-gpt-b" => (
                    rat_int(1) - t + &leg * t,
                    t * (t - rat_int(1)),
                ),
                "lem-hpt-a" => (
                    rat_int(1) + t + &leg * t,
                    t * (t + rat_int(1)),
                ),
                _ => (
                    rat_int(-1) + t + &leg * t,
                    -(t * (t - rat_int(1))),
                ),
            };
            let rhs = rhs_with_q(p, m, &rat_part, &q_coeff)?;
            Ok((lhs, rhs, prec))
        }
        "aux-sun-p3" => {
            let (lhs, prec) = aux_lhs(p, m, strategy, AuxKind::SunCentral)?;
            let sign = sign_for((p - 1) / 2);
            let mut rhs = res(&sign, p, m)?;
            if m >= 3 {
                let table = euler_numbers((p - 3) as usize, p, m - 2);
                let e = table.euler_number((p - 3) as usize);
                rhs = rhs.add(&e.lift_mul_p(2));
            }
            Ok((lhs, rhs, prec))
        }
        "aux-zps" => {
            let (lhs, prec) = aux_lhs(p, m, strategy, AuxKind::Zps3)?;
            let sign = sign_for((p - 1) / 2);
            let rhs = res(&((rat_int(6) * sign - rat_int(1)) / rat_int(5)), p, m)?;
            Ok((lhs, rhs, prec))
        }
        "aux-zws1" => {
            let x = rat(-1, 3);
            let (lhs, prec) = lhs_core(p, m, strategy, &x, &family_spec(-4, 0, Scale::None))?;
            Ok((lhs, res(&rat(1, 9), p, m)?, prec))
        }
        "aux-zws2" | "aux-zws3" => {
            // built from the d = 0 and d in {1,2} core sums through the
            // binom(3k, k+-1) column relations
            let x = rat(-1, 3);
            let (lhs, prec) = match strategy {
                Strategy::Exact => {
                    let d0 = core_sum_exact(&x, &family_spec(-4, 0, Scale::None), p)?;
                    let v = if id == "aux-zws2" {
                        let d1 = core_sum_exact(&x, &family_spec(-4, 1, Scale::None), p)?;
                        rat_int(2) * (d0 - d1)
                    } else {
                        let d2 = core_sum_exact(&x, &family_spec(-4, 2, Scale::None), p)?;
                        (d0 - d2) / rat_int(2)
                    };
                    (res(&v, p, m)?, m as i64)
                }
                Strategy::Padic => padic_retry(p, m, |ctx| {
                    let d0 = core_sum_padic(ctx, &x, &family_spec(-4, 0, Scale::None))?;
                    if id == "aux-zws2" {
                        let d1 = core_sum_padic(ctx, &x, &family_spec(-4, 1, Scale::None))?;
                        let diff = ctx.padic_sub(&d0, &d1);
                        Ok(padic_mul_rat(ctx, &diff, &rat_int(2)))
                    } else {
                        let d2 = core_sum_padic(ctx, &x, &family_spec(-4, 2, Scale::None))?;
                        let diff = ctx.padic_sub(&d0, &d2);
                        Ok(padic_mul_rat(ctx, &diff, &rat(1, 2)))
                    }
                })?,
            };
            let want = if id == "aux-zws2" { rat(-16, 9) } else { rat(-4, 9) };
            Ok((lhs, res(&want, p, m)?, prec))
        }
        "aux-2pp" => {
            let (lhs, prec) = match strategy {
                Strategy::Exact => {
                    (res(&Rat::from(binom_int(2 * p, p)), p, m)?, m as i64)
                }
                Strategy::Padic => padic_retry(p, m, |ctx| {
                    let (v2, u2) = crate::numeric::factorial_decompose(2 * p, ctx);
                    let (v1, u1) = crate::numeric::factorial_decompose(p, ctx);
                    let num = Padic::Val { val: v2, unit: u2.value, rel: ctx.k };
                    let den = Padic::Val { val: 2 * v1, unit: u1.mul(&u1).value, rel: ctx.k };
                    ctx.padic_div(&num, &den)
                })?,
            };
            Ok((lhs, Residue::from_u64(2, p, m), prec))
        }
        "aux-carlitz" => {
            let b = bernoulli_exact((p - 1) as usize);
            let v = rat_int(p as i64) * &b[(p - 1) as usize];
            let lhs = res(&v, p, m)?;
            let rhs = res(&rat_int(p as i64 - 1), p, m)?;
            Ok((lhs, rhs, m as i64))
        }
        "prf-ptk" | "prf-pt1k" => {
            let CheckArg::Tk(t, k) = arg else { unreachable!() };
            let k = *k;
            let pt = rat_int(p as i64) * t;
            let y = if id == "prf-ptk" { pt.clone() } else { &pt - rat_int(1) };
            let (lhs, prec) = binom_pair_lhs(p, m, strategy, &y, k)?;
            let ki = rat_int(k as i64);
            let a = &pt / &ki;
            let sq = &a * &a;
            let rhs_rat = if id == "prf-ptk" {
                sign_for(k + 1) * (&a + &sq)
            } else {
                sign_for(k) * (&a - &sq)
            };
            Ok((lhs, res(&rhs_rat, p, m)?, prec))
        }
        "prf-zhsmpt" => {
            let CheckArg::Sm(s, mm) = arg else { unreachable!() };
            let mm = *mm;
            let ps = rat_int(p as i64) * s;
            let y = rat_int(mm as i64) + &ps - rat_int(1);
            let (lhs, prec) = match strategy {
                Strategy::Exact => (res(&binom_rat(&y, p - 1), p, m)?, m as i64),
                Strategy::Padic => padic_retry(p, m, |ctx| {
                    let mut acc = ctx.padic_from_int(&Int::one());
                    for j in 0..(p - 1) {
                        acc = padic_mul_rat(ctx, &acc, &(&y - rat_int(j as i64)));
                        if matches!(acc, Padic::Zero { .. }) {
                            break;
                        }
                    }
                    let mut fact = Int::one();
                    for i in 1..p {
                        fact *= Int::from(i);
                    }
                    Ok(padic_div_rat(ctx, &acc, &Rat::from(fact)))
                })?,
            };
            let h: Rat = (1..=mm).map(|j| rat(1, j as i64)).sum();
            let mi = rat_int(mm as i64);
            let rhs_rat =
                &ps / &mi - (&ps * &ps) / (&mi * &mi) + rat_int(p as i64) * &ps / &mi * h;
            Ok((lhs, res(&rhs_rat, p, m)?, prec))
        }
        "prf-harm" | "prf-key1-1" | "prf-key1-2" | "prf-key2-3" | "prf-key2-4" => {
            let CheckArg::X(x) = arg else { unreachable!() };
            eval_bridge(id, x, p, m, strategy)
        }
        other => unreachable!("unknown check id {other}"),
    }
}

/// The mod-p alternating-sum bridges from the proofs.
fn eval_bridge(
    id: &str,
    x: &Rat,
    p: u64,
    m: u32,
    strategy: Strategy,
) -> Result<(Residue, Residue, i64)> {
    let d = padicmap::decompose(x, p)?;
    let r = d.residue;
    // the modular fast route only exists at the statements' own modulus p;
    // audits at higher exponents go through the exact route
    let modular = matches!(strategy, Strategy::Padic) && m == 1;
    let (lhs, prec) = if modular {
        let v = match id {
            "prf-harm" => alt_harmonic(r, p)?,
            "prf-key1-1" => alt_harmonic(r / 2, p)?,
            "prf-key1-2" => alt_odd_harmonic(r / 2, p)?,
            "prf-key2-3" => alt_harmonic((r - 1) / 2, p)?,
            _ => alt_odd_harmonic_shift((r - 1) / 2, p)?,
        };
        (v, 1)
    } else {
        let v = match id {
            "prf-harm" => alt_harmonic_exact(r),
            "prf-key1-1" => alt_harmonic_exact(r / 2),
            "prf-key1-2" => alt_odd_harmonic_exact(r / 2),
            "prf-key2-3" => alt_harmonic_exact((r - 1) / 2),
            _ => alt_odd_harmonic_shift_exact((r - 1) / 2),
        };
        (res(&v, p, m)?, m as i64)
    };
    let q = q2_mod(p, m);
    let e_at = |arg: &Rat| euler_poly((p - 2) as usize, arg, p, m);
    let half = res(&rat(1, 2), p, m)?;
    let quarter = res(&rat(1, 4), p, m)?;
    let rhs = match id {
        "prf-harm" => {
            // -q_p(2) + 1/2 (-1)^(r+1) E_{p-2}(-x)
            let e = e_at(&-x.clone())?;
            let signed = if (r + 1) % 2 == 0 { e } else { e.neg() };
            q.neg().add(&half.mul(&signed))
        }
        "prf-key1-1" => {
            let e = e_at(&(-x.clone() / rat_int(2)))?;
            let signed = if (r / 2) % 2 == 0 { e } else { e.neg() };
            q.neg().sub(&half.mul(&signed))
        }
        "prf-key1-2" => {
            let e = e_at(&((x + rat_int(1)) / rat_int(2)))?;
            let signed = if (r / 2) % 2 == 0 { e } else { e.neg() };
            quarter.mul(&signed)
        }
        "prf-key2-3" => {
            let e = e_at(&((x + rat_int(1)) / rat_int(2)))?;
            let signed = if r.div_ceil(2) % 2 == 0 { e } else { e.neg() };
            q.neg().sub(&half.mul(&signed))
        }
        _ => {
            let e = e_at(&(-x.clone() / rat_int(2)))?;
            let one = Residue::one(p, m);
            let signed = if r.div_ceil(2) % 2 == 0 { e } else { e.neg() };
            quarter.mul(&signed).sub(&one)
        }
    };
    Ok((lhs, rhs, prec))
}

// ---------------------------------------------------------------------------
// precondition screening and argument generation
// ---------------------------------------------------------------------------

/// Why a (check, p) pair cannot run.
fn precondition_failure(spec: &CheckSpec, p: u64) -> Option<String> {
    if p < spec.min_prime {
        return Some(format!("requires p >= {}", spec.min_prime));
    }
    if let Some(max) = spec.max_prime {
        if p > max {
            return Some(format!("desk-scale bound p <= {max}"));
        }
    }
    None
}

/// Does x pass the per-check screening at p?
pub fn x_admissible(spec: &CheckSpec, p: u64, x: &Rat) -> bool {
    if (x.denom() % Int::from(p)).is_zero() {
        return false;
    }
    let ArgMode::FreeX { forbidden, parity } = spec.arg else {
        return true;
    };
    let r = match padicmap::residue_of(x, p) {
        Ok(r) => r,
        Err(_) => return false,
    };
    for f in forbidden {
        if r == f.rem_euclid(p as i64) as u64 {
            return false;
        }
    }
    match parity {
        Some(ResidueParity::Even) => r % 2 == 0,
        Some(ResidueParity::Odd) => r % 2 == 1,
        None => true,
    }
}

/// The canonical x probes: the paper's specializations plus degenerate points.
pub fn canonical_x() -> Vec<Rat> {
    [(-1i64, 2i64), (-1, 3), (-1, 4), (-1, 6), (-5, 6), (1, 3), (0, 1), (-1, 1), (5, 1)]
        .iter()
        .map(|&(n, d)| rat(n, d))
        .collect()
}

/// Which fixed probes a run should use.
#[derive(Clone, Debug)]
pub enum XSet {
    Canonical,
    List(Vec<Rat>),
    None,
}

/// Argument policy for a suite run.
#[derive(Clone, Debug)]
pub struct XPolicy {
    pub set: XSet,
    pub random_per_prime: u32,
    pub seed: u64,
    /// include x = p and x = 2p to land on residue zero
    pub residue_targeted: bool,
}

impl XPolicy {
    pub fn describe(&self) -> String {
        let set = match &self.set {
            XSet::Canonical => "canonical".to_string(),
            XSet::List(v) => format!(
                "list[{}]",
                v.iter().map(rat_to_string).collect::<Vec<_>>().join(",")
            ),
            XSet::None => "none".to_string(),
        };
        format!(
            "{set}+random:{}{}",
            self.random_per_prime,
            if self.residue_targeted { "+targeted" } else { "" }
        )
    }
}

/// Deterministic argument list for one (check, p) cell.
pub fn arguments_for(spec: &CheckSpec, p: u64, policy: &XPolicy) -> Vec<CheckArg> {
    let mut out = Vec::new();
    match spec.arg {
        ArgMode::None => out.push(CheckArg::None),
        ArgMode::FreeX { .. } => {
            let mut fixed: Vec<Rat> = match &policy.set {
                XSet::Canonical => canonical_x(),
                XSet::List(v) => v.clone(),
                XSet::None => Vec::new(),
            };
            if policy.residue_targeted {
                fixed.push(rat_int(p as i64));
                fixed.push(rat_int(2 * p as i64));
            }
            for x in fixed {
                if x_admissible(spec, p, &x) {
                    out.push(CheckArg::X(x));
                }
            }
            let mut stream = RatStream::new(substream_seed(policy.seed, spec.id, p), p);
            let mut found = 0;
            let mut attempts = 0;
            while found < policy.random_per_prime && attempts < 400 * (policy.random_per_prime + 1)
            {
                attempts += 1;
                let x = stream.next_rat();
                if x_admissible(spec, p, &x) {
                    out.push(CheckArg::X(x));
                    found += 1;
                }
            }
        }
        ArgMode::FreeT => {
            let fixed: Vec<Rat> = match &policy.set {
                XSet::Canonical => canonical_x(),
                XSet::List(v) => v.clone(),
                XSet::None => Vec::new(),
            };
            for t in fixed {
                if !(t.denom() % Int::from(p)).is_zero() {
                    out.push(CheckArg::T(t));
                }
            }
            let mut stream = RatStream::new(substream_seed(policy.seed, spec.id, p), p);
            for _ in 0..policy.random_per_prime {
                out.push(CheckArg::T(stream.next_rat()));
            }
        }
        ArgMode::FreeTk | ArgMode::FreeSm => {
            let mut stream = RatStream::new(substream_seed(policy.seed, spec.id, p), p);
            let fixed: Vec<Rat> = match &policy.set {
                XSet::Canonical => canonical_x(),
                XSet::List(v) => v.clone(),
                XSet::None => Vec::new(),
            };
            let make = |v: Rat, idx: u64| {
                if matches!(spec.arg, ArgMode::FreeTk) {
                    CheckArg::Tk(v, idx)
                } else {
                    CheckArg::Sm(v, idx)
                }
            };
            for t in fixed {
                if !(t.denom() % Int::from(p)).is_zero() {
                    let idx = stream.next_index();
                    out.push(make(t, idx));
                }
            }
            for _ in 0..policy.random_per_prime {
                let t = stream.next_rat();
                let idx = stream.next_index();
                out.push(make(t, idx));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// runner
// ---------------------------------------------------------------------------

/// Run one check instance; precondition failures come back as Err.
pub fn run_check(
    spec: &CheckSpec,
    p: u64,
    arg: &CheckArg,
    strategy: Strategy,
) -> Result<CheckOutcome> {
    if let Some(reason) = precondition_failure(spec, p) {
        return Err(Error::PreconditionViolated(reason));
    }
    let started = Instant::now();
    let m = spec.modulus_exponent;
    let outcome = match eval_sides(spec, p, arg, strategy, m) {
        Ok((lhs, rhs, prec)) => {
            let pass = lhs == rhs;
            CheckOutcome {
                check_id: spec.id,
                p,
                x: arg.rat().cloned(),
                modulus_exponent: m,
                lhs: EvalValue::Value(lhs),
                rhs: EvalValue::Value(rhs),
                pass,
                strategy,
                prec,
                micros: started.elapsed().as_micros() as u64,
                sample: 0,
            }
        }
        Err(Error::PreconditionViolated(reason)) => {
            return Err(Error::PreconditionViolated(reason))
        }
        Err(e) => CheckOutcome {
            check_id: spec.id,
            p,
            x: arg.rat().cloned(),
            modulus_exponent: m,
            lhs: EvalValue::Failed(e.to_string()),
            rhs: EvalValue::Failed("not evaluated".into()),
            pass: false,
            strategy,
            prec: 0,
            micros: started.elapsed().as_micros() as u64,
            sample: 0,
        },
    };
    Ok(outcome)
}

/// Largest k <= 3 with lhs = rhs (mod p^k), evaluated at exponent 3.
pub fn modulus_audit(spec: &CheckSpec, p: u64, arg: &CheckArg) -> Result<u32> {
    if let Some(reason) = precondition_failure(spec, p) {
        return Err(Error::PreconditionViolated(reason));
    }
    let (lhs, rhs, _) = eval_sides(spec, p, arg, Strategy::Exact, 3)?;
    for k in (1..=3u32).rev() {
        if lhs.truncate(k) == rhs.truncate(k) {
            return Ok(k);
        }
    }
    Ok(0)
}

/// Result of a suite run.
#[derive(Clone, Debug, Default)]
pub struct SuiteResult {
    pub outcomes: Vec<CheckOutcome>,
    pub skips: Vec<SkipRecord>,
    /// per (check, p, x) audit values when auditing was requested
    pub audits: Vec<(String, u64, Option<Rat>, u32)>,
}

/// Which checks a run covers.
pub fn select_checks(filter: &str) -> Result<Vec<&'static CheckSpec>> {
    if filter == "all" {
        return Ok(registry().iter().collect());
    }
    let mut out = Vec::new();
    for id in filter.split(',') {
        let id = id.trim();
        match find_check(id) {
            Some(c) => out.push(c),
            None => {
                return Err(Error::PreconditionViolated(format!("unknown check id: {id}")))
            }
        }
    }
    Ok(out)
}

/// Run every selected check over the prime list under the policy, fanned over
/// `jobs` workers, with deterministic merged output.
pub fn run_suite(
    checks: &[&'static CheckSpec],
    primes: &[u64],
    policy: &XPolicy,
    strategy: StrategyChoice,
    jobs: usize,
    audit: bool,
) -> SuiteResult {
    struct Task {
        spec: &'static CheckSpec,
        p: u64,
        arg: CheckArg,
        strategy: Strategy,
        sample: u32,
    }

    let mut tasks = Vec::new();
    let mut skips = Vec::new();
    for spec in checks {
        for &p in primes {
            if let Some(reason) = precondition_failure(spec, p) {
                skips.push(SkipRecord { check_id: spec.id, p, reason });
                continue;
            }
            let args = arguments_for(spec, p, policy);
            for (i, arg) in args.into_iter().enumerate() {
                for &s in strategy.strategies() {
                    tasks.push(Task {
                        spec,
                        p,
                        arg: arg.clone(),
                        strategy: s,
                        sample: i as u32,
                    });
                }
            }
        }
    }

    let jobs = jobs.max(1);
    let mut outcomes: Vec<CheckOutcome> = Vec::with_capacity(tasks.len());
    let mut audits = Vec::new();
    if jobs == 1 {
        for t in &tasks {
            if let Ok(mut o) = run_check(t.spec, t.p, &t.arg, t.strategy) {
                o.sample = t.sample;
                outcomes.push(o);
            }
        }
    } else {
        let chunks: Vec<Vec<&Task>> = {
            let mut cs: Vec<Vec<&Task>> = (0..jobs).map(|_| Vec::new()).collect();
            for (i, t) in tasks.iter().enumerate() {
                cs[i % jobs].push(t);
            }
            cs
        };
        let results: Vec<Vec<CheckOutcome>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|chunk| {
                    scope.spawn(move || {
                        let mut local = Vec::with_capacity(chunk.len());
                        for t in chunk {
                            if let Ok(mut o) = run_check(t.spec, t.p, &t.arg, t.strategy) {
                                o.sample = t.sample;
                                local.push(o);
                            }
                        }
                        local
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        for r in results {
            outcomes.extend(r);
        }
    }

    if audit {
        // audit once per distinct (check, p, arg); exact strategy at exponent 3
        let mut seen = std::collections::HashSet::new();
        for t in &tasks {
            let key = (t.spec.id, t.p, t.arg.rat().map(rat_to_string), t.sample);
            if !seen.insert(key) {
                continue;
            }
            if let Ok(k) = modulus_audit(t.spec, t.p, &t.arg) {
                audits.push((t.spec.id.to_string(), t.p, t.arg.rat().cloned(), k));
            }
        }
        audits.sort_by(|a, b| {
            (&a.0, a.1, a.2.as_ref().map(rat_to_string))
                .cmp(&(&b.0, b.1, b.2.as_ref().map(rat_to_string)))
        });
    }

    outcomes.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    skips.sort_by(|a, b| (a.check_id, a.p).cmp(&(b.check_id, b.p)));
    SuiteResult { outcomes, skips, audits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::odd_primes_in;

    fn get(id: &str) -> &'static CheckSpec {
        find_check(id).expect("registered")
    }

    #[test]
    fn registry_completeness() {
        let expected = [
            "thm1", "thm2", "thm3",
            "cor1.1a", "cor1.1b", "cor1.1c",
            "cor1.2a", "cor1.2b",
            "cor1.3a", "cor1.3b", "cor1.3c", "cor1.3d", "cor1.3e", "cor1.3f",
            "cor-2a", "cor-2b", "cor-2c",
            "cor-2k1a", "cor-2k1b", "cor-2k1c",
            "lem-mt4a", "lem-mt4b", "lem-mt4c",
            "lem-fpt",
            "lem-mt2a", "lem-mt2b",
            "lem-gpt-a", "lem-gpt-b",
            "lem-2k1sum",
            "lem-hpt-a", "lem-hpt-b",
            "aux-sun-p3", "aux-zps", "aux-zws1", "aux-zws2", "aux-zws3",
            "aux-2pp", "aux-carlitz",
            "prf-ptk", "prf-pt1k", "prf-zhsmpt", "prf-harm",
            "prf-key1-1", "prf-key1-2", "prf-key2-3", "prf-key2-4",
        ];
        let mut want: Vec<&str> = expected.to_vec();
        want.sort();
        let have: Vec<&str> = registry().iter().map(|c| c.id).collect();
        assert_eq!(have, want);
    }

    #[test]
    fn thm1_anchor_p5() {
        let spec = get("thm1");
        let arg = CheckArg::X(rat(-1, 3));
        for s in [Strategy::Exact, Strategy::Padic] {
            let o = run_check(spec, 5, &arg, s).unwrap();
            assert!(o.pass, "{o:?}");
            assert_eq!(o.lhs, EvalValue::Value(Residue::from_u64(22, 5, 2)));
            assert_eq!(o.rhs, EvalValue::Value(Residue::from_u64(22, 5, 2)));
        }
    }

    #[test]
    fn thm1_trivial_points() {
        let spec = get("thm1");
        for p in [3u64, 5, 7, 13] {
            let o = run_check(spec, p, &CheckArg::X(rat_int(0)), Strategy::Exact).unwrap();
            assert!(o.pass);
            assert_eq!(o.lhs, EvalValue::Value(Residue::one(p, 2)));
            let o = run_check(spec, p, &CheckArg::X(rat_int(-1)), Strategy::Exact).unwrap();
            assert!(o.pass);
            // -1 mod p^2
            assert_eq!(
                o.lhs,
                EvalValue::Value(Residue::from_u64(p * p - 1, p, 2))
            );
        }
    }

    #[test]
    fn cor13c_anchor_p5() {
        let o = run_check(get("cor1.3c"), 5, &CheckArg::None, Strategy::Exact).unwrap();
        assert!(o.pass);
        assert_eq!(o.lhs, EvalValue::Value(Residue::from_u64(9, 5, 2)));
        assert_eq!(o.rhs, EvalValue::Value(Residue::from_u64(9, 5, 2)));
    }

    #[test]
    fn mt4_anchors_p5() {
        let o = run_check(get("lem-mt4a"), 5, &CheckArg::None, Strategy::Exact).unwrap();
        assert!(o.pass);
        assert_eq!(o.lhs, EvalValue::Value(Residue::from_u64(23, 5, 2)));
        let o = run_check(get("lem-mt4c"), 5, &CheckArg::None, Strategy::Padic).unwrap();
        assert!(o.pass);
        assert_eq!(o.lhs, EvalValue::Value(Residue::zero(5, 2)));
    }

    #[test]
    fn theorems_small_sweep_both_strategies() {
        let primes = odd_primes_in(3, 31);
        let policy = XPolicy {
            set: XSet::Canonical,
            random_per_prime: 2,
            seed: 42,
            residue_targeted: true,
        };
        for id in ["thm1", "thm2", "thm3", "cor1.2a", "cor1.2b"] {
            let spec = get(id);
            for &p in &primes {
                for arg in arguments_for(spec, p, &policy) {
                    let a = run_check(spec, p, &arg, Strategy::Exact).unwrap();
                    let b = run_check(spec, p, &arg, Strategy::Padic).unwrap();
                    assert!(a.pass, "{id} exact failed at p={p} arg={arg:?}: {a:?}");
                    assert!(b.pass, "{id} padic failed at p={p} arg={arg:?}");
                    assert_eq!(a.lhs, b.lhs, "{id} strategies disagree at p={p}");
                }
            }
        }
    }

    #[test]
    fn corollaries_small_sweep() {
        let primes = odd_primes_in(3, 31);
        for spec in registry() {
            if !spec.id.starts_with("cor") || spec.id.starts_with("cor1.2") {
                continue;
            }
            for &p in &primes {
                match run_check(spec, p, &CheckArg::None, Strategy::Exact) {
                    Ok(o) => assert!(o.pass, "{} failed at p = {p}: {o:?}", spec.id),
                    Err(Error::PreconditionViolated(_)) => {}
                    Err(e) => panic!("{}: {e}", spec.id),
                }
            }
        }
    }

    #[test]
    fn lemma_sums_small_sweep() {
        let primes = odd_primes_in(3, 37);
        let policy = XPolicy {
            set: XSet::Canonical,
            random_per_prime: 2,
            seed: 7,
            residue_targeted: false,
        };
        for spec in registry() {
            if !(spec.id.starts_with("lem-") || spec.id.starts_with("aux-")) {
                continue;
            }
            for &p in &primes {
                for arg in arguments_for(spec, p, &policy) {
                    match run_check(spec, p, &arg, Strategy::Exact) {
                        Ok(o) => assert!(o.pass, "{} at p={p} arg={arg:?}: {o:?}", spec.id),
                        Err(Error::PreconditionViolated(_)) => {}
                        Err(e) => panic!("{}: {e}", spec.id),
                    }
                }
            }
        }
    }

    #[test]
    fn proof_step_checks_small_sweep() {
        let primes = odd_primes_in(3, 23);
        let policy = XPolicy {
            set: XSet::Canonical,
            random_per_prime: 4,
            seed: 11,
            residue_targeted: false,
        };
        for id in [
            "prf-ptk", "prf-pt1k", "prf-zhsmpt", "prf-harm",
            "prf-key1-1", "prf-key1-2", "prf-key2-3", "prf-key2-4",
        ] {
            let spec = get(id);
            for &p in &primes {
                for arg in arguments_for(spec, p, &policy) {
                    for s in [Strategy::Exact, Strategy::Padic] {
                        let o = run_check(spec, p, &arg, s).unwrap();
                        assert!(o.pass, "{id} at p={p} arg={arg:?} [{s:?}]: {o:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn skip_is_not_pass() {
        let spec = get("aux-zps"); // needs p > 5
        assert!(matches!(
            run_check(spec, 3, &CheckArg::None, Strategy::Exact),
            Err(Error::PreconditionViolated(_))
        ));
        let r = run_suite(
            &[spec],
            &[3, 5],
            &XPolicy { set: XSet::None, random_per_prime: 0, seed: 0, residue_targeted: false },
            StrategyChoice::Exact,
            1,
            false,
        );
        assert!(r.outcomes.is_empty());
        assert_eq!(r.skips.len(), 2);
    }

    #[test]
    fn audit_examples() {
        // thm1 at (5, -1/3) holds mod p^2 at least
        let k = modulus_audit(get("thm1"), 5, &CheckArg::X(rat(-1, 3))).unwrap();
        assert!(k >= 2);
        // the bare 1/9 form is mod-p only for most primes
        let k = modulus_audit(get("aux-zws1"), 7, &CheckArg::None).unwrap();
        assert_eq!(k, 1);
        // the remark's congruence reaches p^3
        let k = modulus_audit(get("aux-sun-p3"), 7, &CheckArg::None).unwrap();
        assert!(k >= 3);
    }

    #[test]
    fn non_integral_sum_reports_integrality_violation() {
        // a sum that is genuinely not p-integral must surface as
        // IntegralityViolation under both strategies, never silently reduce
        let sp = SumSpec::new(rat(1, 5), 0, Scale::None, Upper::PMinus1);
        let x = rat(1, 3);
        for s in [Strategy::Exact, Strategy::Padic] {
            match lhs_core(5, 2, s, &x, &sp) {
                Err(Error::IntegralityViolation(_)) => {}
                other => panic!("expected IntegralityViolation, got {other:?}"),
            }
        }
    }

    #[test]
    fn suite_deterministic_across_workers() {
        let checks = select_checks("thm1,lem-fpt,cor1.3c,prf-harm").unwrap();
        let policy = XPolicy {
            set: XSet::Canonical,
            random_per_prime: 3,
            seed: 99,
            residue_targeted: true,
        };
        let primes = odd_primes_in(3, 23);
        let a = run_suite(&checks, &primes, &policy, StrategyChoice::Both, 1, false);
        let b = run_suite(&checks, &primes, &policy, StrategyChoice::Both, 4, false);
        let key = |r: &SuiteResult| {
            r.outcomes
                .iter()
                .map(|o| {
                    format!(
                        "{}|{}|{:?}|{}|{}|{}",
                        o.check_id,
                        o.p,
                        o.x.as_ref().map(rat_to_string),
                        o.lhs.as_string(),
                        o.rhs.as_string(),
                        o.strategy.name()
                    )
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(key(&a), key(&b));
        assert!(a.outcomes.iter().all(|o| o.pass));
    }

    #[test]
    fn empty_prime_range_is_empty_run() {
        let checks = select_checks("all").unwrap();
        let r = run_suite(
            &checks,
            &[],
            &XPolicy { set: XSet::Canonical, random_per_prime: 1, seed: 1, residue_targeted: false },
            StrategyChoice::Exact,
            1,
            false,
        );
        assert!(r.outcomes.is_empty() && r.skips.is_empty());
    }
}
