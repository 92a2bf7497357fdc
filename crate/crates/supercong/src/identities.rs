//! Exact (non-congruence) verification of the algebraic identities the
//! congruence proofs rest on, by random rational substitution.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::{binom_int, binom_rat, rat, rat_int, rat_valuation, Int, Rat};
use crate::padicmap;
use crate::special::{alt_power_sum_lhs, alt_power_sum_rhs_exact};
use crate::sums::{family_sum_exact, lemma_rhs, LemmaFamily, Scale};
use crate::xstream::RatStream;

/// One substitution instance of a lemma identity.
#[derive(Clone, Debug)]
pub struct IdentityCase {
    pub family: LemmaFamily,
    pub n: u64,
    pub x: Rat,
    pub lhs: Rat,
    pub rhs: Rat,
    pub pass: bool,
}

fn case(family: LemmaFamily, n: u64, x: &Rat, lhs: Rat, rhs: Rat) -> IdentityCase {
    let pass = lhs == rhs;
    IdentityCase { family, n, x: x.clone(), lhs, rhs, pass }
}

/// F_n(x) + F_n(x+1) against its closed form.
pub fn check_lemma_f(n: u64, x: &Rat) -> IdentityCase {
    let c = rat_int(-4);
    let lhs = family_sum_exact(x, &c, 2, Scale::TwoXPlusOne, n)
        + family_sum_exact(&(x + rat_int(1)), &c, 2, Scale::TwoXPlusOne, n);
    case(LemmaFamily::F, n, x, lhs, lemma_rhs(LemmaFamily::F, n, x))
}

/// G_n(x) + G_n(x+2) against its closed form.
pub fn check_lemma_g(n: u64, x: &Rat) -> IdentityCase {
    let c = rat_int(-2);
    let lhs = family_sum_exact(x, &c, 0, Scale::None, n)
        + family_sum_exact(&(x + rat_int(2)), &c, 0, Scale::None, n);
    case(LemmaFamily::G, n, x, lhs, lemma_rhs(LemmaFamily::G, n, x))
}

/// H_n(x) + H_n(x+2) against its closed form.
pub fn check_lemma_h(n: u64, x: &Rat) -> IdentityCase {
    let c = rat_int(-2);
    let lhs = family_sum_exact(x, &c, 2, Scale::TwoXPlusOne, n)
        + family_sum_exact(&(x + rat_int(2)), &c, 2, Scale::TwoXPlusOne, n);
    case(LemmaFamily::H, n, x, lhs, lemma_rhs(LemmaFamily::H, n, x))
}

/// The two single-n difference identities tying the d = 0 sum to the
/// d = 2 and d = 1 sums.
pub fn check_lemma_d(n: u64, x: &Rat) -> (IdentityCase, IdentityCase) {
    let c = rat_int(-4);
    let s_d0 = family_sum_exact(x, &c, 0, Scale::None, n);
    let s_d2 = family_sum_exact(x, &c, 2, Scale::None, n);
    let s_d1 = family_sum_exact(x, &c, 1, Scale::None, n);

    let two_x_plus_one = rat_int(2) * x + rat_int(1);
    let lhs1 = &s_d0 - &two_x_plus_one * &two_x_plus_one * s_d2;
    let first = case(LemmaFamily::D0, n, x, lhs1, lemma_rhs(LemmaFamily::D0, n, x));

    let lhs2 = &s_d0 - rat_int(2) * x * (x + rat_int(1)) * s_d1;
    let second = case(LemmaFamily::D1, n, x, lhs2, lemma_rhs(LemmaFamily::D1, n, x));
    (first, second)
}

/// binom(x,k) binom(x+k,k) = binom(x+k,2k) binom(2k,k), exactly.
pub fn check_binom_product(x: &Rat, k: u64) -> bool {
    let lhs = binom_rat(x, k) * binom_rat(&(x + rat_int(k as i64)), k);
    let rhs = binom_rat(&(x + rat_int(k as i64)), 2 * k) * Rat::from(binom_int(2 * k, k));
    lhs == rhs
}

/// (2p-1) binom(2p-2, p-1) = p binom(2p, p) / 2, exactly, for integer p >= 1.
pub fn check_catalan_like(p: u64) -> bool {
    let lhs = Int::from(2 * p - 1) * binom_int(2 * p - 2, p - 1);
    let rhs_twice = Int::from(p) * binom_int(2 * p, p);
    Int::from(2) * lhs == rhs_twice
}

/// Alternating power sum against its Euler-polynomial closed form.
pub fn check_zhsun_sum(n: u64, m: u64, r: i64, s: u32) -> bool {
    let lhs = Rat::from(alt_power_sum_lhs(n, m, r, s));
    lhs == alt_power_sum_rhs_exact(n, m, r, s)
}

/// binom(m+ps-1, p-1) = ps/m - p^2 s^2/m^2 + (p^2 s/m) H_m (mod p^3).
pub fn check_zhsun_mpt(m: u64, s: &Rat, p: u64) -> Result<bool> {
    if m == 0 || m >= p {
        return Err(Error::PreconditionViolated(format!("m = {m} outside 1..{p}")));
    }
    if (s.denom() % Int::from(p)).is_zero() {
        return Err(Error::DenominatorDivisible);
    }
    let ps = rat_int(p as i64) * s;
    let x = rat_int(m as i64) + &ps - rat_int(1);
    let lhs = binom_rat(&x, p - 1);
    let h_m: Rat = (1..=m).map(|k| rat(1, k as i64)).sum();
    let mi = rat_int(m as i64);
    let rhs = &ps / &mi - (&ps * &ps) / (&mi * &mi) + rat_int(p as i64) * &ps / &mi * h_m;
    Ok(congruent_mod_p3(&lhs, &rhs, p))
}

/// Both mod-p^3 expansions of binom(pt,k)binom(pt+k,k) and
/// binom(pt-1,k)binom(pt-1+k,k).
pub fn check_pt_expansions(t: &Rat, k: u64, p: u64) -> Result<(bool, bool)> {
    if k == 0 || k >= p {
        return Err(Error::PreconditionViolated(format!("k = {k} outside 1..{p}")));
    }
    if (t.denom() % Int::from(p)).is_zero() {
        return Err(Error::DenominatorDivisible);
    }
    let pt = rat_int(p as i64) * t;
    let ki = rat_int(k as i64);
    let pt_over_k = &pt / &ki;
    let sq = &pt_over_k * &pt_over_k;

    let lhs1 = binom_rat(&pt, k) * binom_rat(&(&pt + &ki), k);
    let rhs1 = &pt_over_k + &sq;
    let rhs1 = if k % 2 == 1 { rhs1 } else { -rhs1 };

    let lhs2 = binom_rat(&(&pt - rat_int(1)), k) * binom_rat(&(&pt - rat_int(1) + &ki), k);
    let rhs2 = &pt_over_k - &sq;
    let rhs2 = if k.is_multiple_of(2) { rhs2 } else { -rhs2 };

    Ok((congruent_mod_p3(&lhs1, &rhs1, p), congruent_mod_p3(&lhs2, &rhs2, p)))
}

fn congruent_mod_p3(a: &Rat, b: &Rat, p: u64) -> bool {
    let diff = a - b;
    if diff.is_zero() {
        return true;
    }
    rat_valuation(&diff, p).is_ok_and(|v| v >= 3)
}

/// Telescoping consistency of the F family:
/// sum_{k=0}^{r-1} (-1)^k (F_{p-1}(x-k-1) + F_{p-1}(x-k))
///   = F_{p-1}(x) - (-1)^r F_{p-1}(p t).
pub fn check_telescope_f(p: u64, x: &Rat) -> Result<bool> {
    let r = padicmap::residue_of(x, p)?;
    let c = rat_int(-4);
    let f = |arg: &Rat| family_sum_exact(arg, &c, 2, Scale::TwoXPlusOne, p - 1);
    let mut lhs = Rat::zero();
    for k in 0..r {
        let term = f(&(x - rat_int(k as i64 + 1))) + f(&(x - rat_int(k as i64)));
        if k % 2 == 0 {
            lhs += term;
        } else {
            lhs -= term;
        }
    }
    let pt = x - rat_int(r as i64); // p * t
    let tail = f(&pt);
    let rhs = if r % 2 == 0 { f(x) - tail } else { f(x) + tail };
    Ok(lhs == rhs)
}

/// Aggregated result of the identities grid.
#[derive(Clone, Debug, Default)]
pub struct GridReport {
    pub sections: Vec<GridSection>,
}

#[derive(Clone, Debug)]
pub struct GridSection {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    pub first_failures: Vec<String>,
}

impl GridReport {
    pub fn all_pass(&self) -> bool {
        self.sections.iter().all(|s| s.failures == 0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!(
                "{:<18} {:>7} cases  {:>4} failures  {}\n",
                s.name,
                s.cases,
                s.failures,
                if s.failures == 0 { "PASS" } else { "FAIL" }
            ));
            for f in &s.first_failures {
                out.push_str(&format!("    {f}\n"));
            }
        }
        let verdict = if self.all_pass() { "ALL PASS" } else { "FAILURES PRESENT" };
        out.push_str(&format!("identities: {verdict}\n"));
        out
    }
}

struct SectionRun {
    name: String,
    cases: u64,
    failures: u64,
    first_failures: Vec<String>,
}

impl SectionRun {
    fn new(name: &str) -> Self {
        SectionRun { name: name.into(), cases: 0, failures: 0, first_failures: Vec::new() }
    }

    fn record(&mut self, pass: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !pass {
            self.failures += 1;
            if self.first_failures.len() < 5 {
                self.first_failures.push(describe());
            }
        }
    }

    fn finish(self) -> GridSection {
        GridSection {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            first_failures: self.first_failures,
        }
    }
}

/// Run the full identities grid: pairing lemmas for n <= max_n with `trials`
/// random x each, the binomial-product and Catalan-like identities, the
/// alternating-power-sum grid, and sampled mod-p^3 expansions.
pub fn run_grid(max_n: u64, trials: u64, seed: u64) -> GridReport {
    let mut report = GridReport::default();

    // pairing lemmas
    for (name, which) in [
        ("lemma-F", 0u8),
        ("lemma-G", 1),
        ("lemma-H", 2),
        ("lemma-D-pair", 3),
    ] {
        let mut sec = SectionRun::new(name);
        let mut stream = RatStream::new(seed ^ (which as u64 + 1), 2);
        for n in 0..=max_n {
            for _ in 0..trials.max(1) {
                let x = stream.next_rat();
                match which {
                    0 => {
                        let c = check_lemma_f(n, &x);
                        sec.record(c.pass, || format!("F n={n} x={x}"));
                    }
                    1 => {
                        let c = check_lemma_g(n, &x);
                        sec.record(c.pass, || format!("G n={n} x={x}"));
                    }
                    2 => {
                        let c = check_lemma_h(n, &x);
                        sec.record(c.pass, || format!("H n={n} x={x}"));
                    }
                    _ => {
                        let (c1, c2) = check_lemma_d(n, &x);
                        sec.record(c1.pass, || format!("D0 n={n} x={x}"));
                        sec.record(c2.pass, || format!("D1 n={n} x={x}"));
                    }
                }
            }
        }
        report.sections.push(sec.finish());
    }

    // term-equivalence identity
    let mut sec = SectionRun::new("binom-product");
    let mut stream = RatStream::new(seed ^ 0xb1, 2);
    for _ in 0..100 {
        let x = stream.next_rat();
        let k = stream.next_u64() % 31;
        sec.record(check_binom_product(&x, k), || format!("x={x} k={k}"));
    }
    for x in [rat(-1, 3), rat(-1, 4), rat(-1, 6), rat(-1, 2)] {
        for k in 0..=25 {
            sec.record(check_binom_product(&x, k), || format!("x={x} k={k}"));
        }
    }
    report.sections.push(sec.finish());

    let mut sec = SectionRun::new("catalan-like");
    for p in 1..=500u64 {
        sec.record(check_catalan_like(p), || format!("p={p}"));
    }
    report.sections.push(sec.finish());

    // alternating power sums, exact grid
    let mut sec = SectionRun::new("alt-power-sum");
    for n in 0..=30u64 {
        for m in 1..=5u64 {
            for r in -3..=(m as i64 + 3) {
                for s in 0..=8u32 {
                    sec.record(check_zhsun_sum(n, m, r, s), || {
                        format!("n={n} m={m} r={r} s={s}")
                    });
                }
            }
        }
    }
    report.sections.push(sec.finish());

    // sampled mod-p^3 expansions
    let mut sec = SectionRun::new("mpt-binomial");
    for p in [5u64, 7, 13] {
        let mut stream = RatStream::new(seed ^ 0xd00d ^ p, p);
        for _ in 0..10 {
            let s = stream.next_rat();
            let m = stream.next_index();
            let pass = check_zhsun_mpt(m, &s, p).unwrap_or(false);
            sec.record(pass, || format!("p={p} m={m} s={s}"));
        }
        // s = 0 boundary: binom(m-1, p-1) with m-1 < p-1 vanishes
        sec.record(check_zhsun_mpt(1, &Rat::zero(), p).unwrap(), || format!("p={p} s=0"));
    }
    report.sections.push(sec.finish());

    let mut sec = SectionRun::new("pt-expansions");
    for p in [5u64, 7, 13] {
        let mut stream = RatStream::new(seed ^ 0xfeed ^ p, p);
        for _ in 0..10 {
            let t = stream.next_rat();
            let k = stream.next_index();
            match check_pt_expansions(&t, k, p) {
                Ok((a, b)) => {
                    sec.record(a, || format!("ptk p={p} k={k} t={t}"));
                    sec.record(b, || format!("pt-1k p={p} k={k} t={t}"));
                }
                Err(e) => sec.record(false, || format!("p={p} k={k} t={t}: {e}")),
            }
        }
    }
    report.sections.push(sec.finish());

    // telescoping structure of the F family
    let mut sec = SectionRun::new("telescope-F");
    for p in [3u64, 5, 7, 11, 13] {
        let mut stream = RatStream::new(seed ^ 0x7e1e ^ p, p);
        let mut done = 0;
        while done < 5 {
            let x = stream.next_rat();
            if (x.denom() % Int::from(p)).is_zero() {
                continue;
            }
            done += 1;
            let pass = check_telescope_f(p, &x).unwrap_or(false);
            sec.record(pass, || format!("p={p} x={x}"));
        }
    }
    report.sections.push(sec.finish());

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_f_examples() {
        // n = 0: both sides are 4x + 4
        let c = check_lemma_f(0, &rat(9, 2));
        assert!(c.pass);
        assert_eq!(c.lhs, rat_int(4) * rat(9, 2) + rat_int(4));
        assert!(check_lemma_f(3, &rat(2, 5)).pass);
        assert!(check_lemma_f(25, &rat(-7, 3)).pass);
    }

    #[test]
    fn lemma_g_h_examples() {
        assert!(check_lemma_g(0, &rat(11, 4)).pass);
        let h0 = check_lemma_h(0, &rat(11, 4));
        // (2x+1) + (2x+5) = 2(2x+3)
        assert!(h0.pass);
        assert!(check_lemma_g(30, &rat(-11, 4)).pass);
        assert!(check_lemma_h(30, &rat(-11, 4)).pass);
    }

    #[test]
    fn lemma_d_examples() {
        let (a, b) = check_lemma_d(0, &rat(5, 3));
        assert!(a.pass && b.pass);
        let (a, b) = check_lemma_d(1, &rat_int(1));
        assert!(a.pass && b.pass);
        let (a, b) = check_lemma_d(20, &rat(9, 7));
        assert!(a.pass && b.pass);
    }

    #[test]
    fn binom_product_examples() {
        assert!(check_binom_product(&rat(7, 3), 0));
        assert!(check_binom_product(&rat(-1, 3), 2));
        let mut s = RatStream::new(3, 2);
        for _ in 0..100 {
            let x = s.next_rat();
            let k = s.next_u64() % 31;
            assert!(check_binom_product(&x, k), "x={x} k={k}");
        }
    }

    #[test]
    fn catalan_like_examples() {
        assert!(check_catalan_like(1));
        // p = 5: 9 * 70 = 630 = 5 * 252 / 2
        assert!(check_catalan_like(5));
        for p in 1..=500 {
            assert!(check_catalan_like(p));
        }
    }

    #[test]
    fn zhsun_sum_examples() {
        assert!(check_zhsun_sum(4, 1, 0, 2));
        assert!(check_zhsun_sum(1, 1, 0, 0));
        assert!(check_zhsun_sum(9, 2, 1, 3));
    }

    #[test]
    fn zhsun_mpt_examples() {
        // m = 1, s = 0: binom(0, p-1) = 0
        assert!(check_zhsun_mpt(1, &Rat::zero(), 7).unwrap());
        assert!(check_zhsun_mpt(2, &rat(1, 3), 7).unwrap());
        assert!(matches!(
            check_zhsun_mpt(9, &rat(1, 3), 7),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn pt_expansion_examples() {
        // t = 1, k = 1, p = 5: binom(5,1) binom(6,1) = 30 = 5 + 25 (mod 125)
        let (a, b) = check_pt_expansions(&rat_int(1), 1, 5).unwrap();
        assert!(a && b);
        let (a, b) = check_pt_expansions(&Rat::zero(), 3, 7).unwrap();
        assert!(a && b);
    }

    #[test]
    fn telescope_small() {
        assert!(check_telescope_f(5, &rat(-1, 3)).unwrap());
        assert!(check_telescope_f(7, &rat(9, 4)).unwrap());
    }

    #[test]
    fn small_grid_passes() {
        let r = run_grid(6, 3, 1234);
        assert!(r.all_pass(), "{}", r.to_text());
    }
}
