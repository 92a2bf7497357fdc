//! Number-theoretic special values: Legendre symbols, Fermat quotients,
//! Euler numbers and polynomials mod p^K, exact Euler polynomials and
//! Bernoulli numbers for small index, and alternating harmonic sums.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{
    binom_int, inv_mod_u64, mod_reduce, pow_mod_u64, rat, rat_int, Int, Rat, Residue,
};

/// Legendre symbol by Euler's criterion.
pub fn legendre_int(a: &Int, p: u64) -> i32 {
    let pi = Int::from(p);
    let mut r = a % &pi;
    if r.is_negative() {
        r += &pi;
    }
    let r = r.to_u64().expect("reduced");
    if r == 0 {
        return 0;
    }
    let e = pow_mod_u64(r, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

pub fn legendre_i64(a: i64, p: u64) -> i32 {
    legendre_int(&Int::from(a), p)
}

/// Legendre symbol of a p-integral rational: (num/p)(den/p).
pub fn legendre_rat(q: &Rat, p: u64) -> Result<i32> {
    let den = legendre_int(q.denom(), p);
    if den == 0 {
        return Err(Error::DenominatorDivisible);
    }
    Ok(legendre_int(q.numer(), p) * den)
}

/// Fermat quotient q_p(a) = (a^(p-1) - 1)/p, reduced mod p^K.
///
/// Computed by exponentiation at precision K+1 followed by one exact
/// division by p.
pub fn fermat_quotient(a: u64, p: u64, k: u32) -> Result<Residue> {
    if a.is_multiple_of(p) {
        return Err(Error::NotUnit);
    }
    let m = BigUint::from(p).pow(k + 1);
    let pow = BigUint::from(a).modpow(&BigUint::from(p - 1), &m);
    // a^(p-1) = 1 (mod p), so pow - 1 is divisible by p
    let diff = if pow.is_zero() { &m - 1u32 } else { pow - 1u32 };
    let (q, r) = diff.div_rem(&BigUint::from(p));
    debug_assert!(r.is_zero());
    Ok(Residue::from_biguint(q, p, k))
}

/// Euler numbers E_0..E_n_max mod p^k, with factorial tables for fast
/// polynomial evaluation. Requires p^k < 2^32 so products fit in u64.
#[derive(Debug)]
pub struct EulerTable {
    pub p: u64,
    pub k: u32,
    pub n_max: usize,
    modulus: u64,
    values: Vec<u64>,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

type EulerCache = Mutex<HashMap<(u64, u32), Arc<EulerTable>>>;

fn euler_cache() -> &'static EulerCache {
    static CACHE: OnceLock<EulerCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn build_euler_table(n_max: usize, p: u64, k: u32) -> EulerTable {
    let modulus = p.checked_pow(k).filter(|m| *m < 1 << 32).expect("p^k must fit 32 bits");
    let mul = |a: u64, b: u64| a * b % modulus;

    // Pascal row kept up to date while walking n upward; additions only,
    // so n_max above p is fine.
    let mut row: Vec<u64> = vec![1];
    let mut values = vec![1u64]; // E_0 = 1
    for n in 1..=n_max {
        row.push(1);
        for j in (1..n).rev() {
            row[j] = (row[j] + row[j - 1]) % modulus;
        }
        if n % 2 == 1 {
            // parity forces odd entries to zero (n = 1 gives E_1 = 0, then induct)
            values.push(0);
            continue;
        }
        let mut acc = 0u64;
        let mut kk = n % 2;
        while kk < n {
            acc = (acc + mul(row[kk], values[kk])) % modulus;
            kk += 2;
        }
        values.push((modulus - acc) % modulus);
    }

    // factorials stay units as long as the index is below p
    let fact_len = n_max.min(p as usize - 1) + 1;
    let mut fact = vec![1u64; fact_len];
    for i in 1..fact_len {
        fact[i] = mul(fact[i - 1], i as u64);
    }
    let mut inv_fact = vec![1u64; fact_len];
    inv_fact[fact_len - 1] = inv_mod_u64(fact[fact_len - 1], modulus).expect("unit");
    for i in (1..fact_len).rev() {
        inv_fact[i - 1] = mul(inv_fact[i], i as u64);
    }

    EulerTable { p, k, n_max, modulus, values, fact, inv_fact }
}

/// Memoized Euler-number table for (p, K); grows on demand.
pub fn euler_numbers(n_max: usize, p: u64, k: u32) -> Arc<EulerTable> {
    {
        let cache = euler_cache().lock().unwrap();
        if let Some(t) = cache.get(&(p, k)) {
            if t.n_max >= n_max {
                return Arc::clone(t);
            }
        }
    }
    let built = Arc::new(build_euler_table(n_max, p, k));
    let mut cache = euler_cache().lock().unwrap();
    let entry = cache.entry((p, k)).or_insert_with(|| Arc::clone(&built));
    if entry.n_max < n_max {
        *entry = Arc::clone(&built);
    }
    Arc::clone(entry)
}

impl EulerTable {
    pub fn euler_number(&self, n: usize) -> Residue {
        Residue::from_u64(self.values[n], self.p, self.k)
    }

    fn binom_mod(&self, n: usize, j: usize) -> u64 {
        debug_assert!(n < self.fact.len());
        self.fact[n] * self.inv_fact[j] % self.modulus * self.inv_fact[n - j] % self.modulus
    }

    /// E_n(x) mod p^k via the binomial expansion
    /// sum_j binom(n,j) E_j 2^(-j) (x - 1/2)^(n-j).
    pub fn eval_poly(&self, n: usize, x: &Rat) -> Result<Residue> {
        assert!(n <= self.n_max);
        let y = mod_reduce(&(x - rat(1, 2)), self.p, self.k).map_err(|_| Error::DenominatorDivisible)?;
        let y = y.value.to_u64().expect("fits");
        let mul = |a: u64, b: u64| a * b % self.modulus;

        // binomials fall back to a Pascal row when n reaches p
        let pascal: Option<Vec<u64>> = if n >= self.fact.len() {
            let mut row = vec![1u64];
            for nn in 1..=n {
                row.push(1);
                for j in (1..nn).rev() {
                    row[j] = (row[j] + row[j - 1]) % self.modulus;
                }
            }
            Some(row)
        } else {
            None
        };
        let binom = |j: usize| match &pascal {
            Some(row) => row[j],
            None => self.binom_mod(n, j),
        };

        let inv2 = inv_mod_u64(2, self.modulus).expect("p odd");
        // walk j downward so powers of y build up multiplicatively
        let mut ypow = 1u64; // y^(n-j), starting at j = n
        let mut i2pow = pow_mod_u64(inv2, n as u64, self.modulus); // 2^(-j)
        let mut acc = 0u64;
        for j in (0..=n).rev() {
            if self.values[j] != 0 {
                let term = mul(mul(binom(j), self.values[j]), mul(i2pow, ypow));
                acc = (acc + term) % self.modulus;
            }
            ypow = mul(ypow, y);
            i2pow = mul(i2pow, 2);
        }
        Ok(Residue::from_u64(acc, self.p, self.k))
    }
}

/// E_n(x) mod p^target for a p-integral x with p not dividing den(x).
pub fn euler_poly(n: usize, x: &Rat, p: u64, target: u32) -> Result<Residue> {
    let table = euler_numbers(n, p, target);
    table.eval_poly(n, x)
}

/// Exact integer Euler numbers E_0..E_n_max (desk scale).
pub fn euler_numbers_exact(n_max: usize) -> Vec<Int> {
    let mut values = vec![Int::one()];
    for n in 1..=n_max {
        if n % 2 == 1 {
            values.push(Int::zero());
            continue;
        }
        let mut acc = Int::zero();
        let mut k = 0;
        while k < n {
            acc += binom_int(n as u64, k as u64) * &values[k];
            k += 2;
        }
        values.push(-acc);
    }
    values
}

/// Exact Euler polynomial value, the oracle for `euler_poly` (small n).
pub fn euler_poly_exact(n: usize, x: &Rat) -> Rat {
    let numbers = euler_numbers_exact(n);
    let y = x - rat(1, 2);
    let mut acc = Rat::zero();
    let mut ypow = Rat::one(); // y^(n-j) built downward from j = n
    let mut half = rat(1, 2);
    let mut halfpow = Rat::one();
    for _ in 0..n {
        halfpow *= &half;
    }
    half = halfpow; // 2^(-n)
    let mut i2pow = half;
    for j in (0..=n).rev() {
        if !numbers[j].is_zero() {
            acc += Ratio::from_integer(binom_int(n as u64, j as u64) * &numbers[j]) * &i2pow * &ypow;
        }
        ypow *= &y;
        i2pow *= rat_int(2);
    }
    acc
}

/// Exact Bernoulli numbers B_0..B_n_max via the standard recurrence
/// sum_{k=0}^{n} binom(n+1,k) B_k = 0.
pub fn bernoulli_exact(n_max: usize) -> Vec<Rat> {
    let mut values: Vec<Rat> = vec![Rat::one()];
    for n in 1..=n_max {
        let mut acc = Rat::zero();
        for (k, b) in values.iter().enumerate() {
            if !b.is_zero() {
                acc += Ratio::from_integer(binom_int(n as u64 + 1, k as u64)) * b;
            }
        }
        values.push(-acc / rat_int(n as i64 + 1));
    }
    values
}

/// Table of inverses 1..p-1 mod p.
pub fn inverse_table(p: u64) -> Vec<u64> {
    let mut inv = vec![0u64; p as usize];
    if p > 1 {
        inv[1] = 1;
    }
    for i in 2..p as usize {
        inv[i] = (p - p / i as u64) * inv[(p % i as u64) as usize] % p;
    }
    inv
}

/// sum_{k=1}^{m} (-1)^k / k mod p (m < p).
pub fn alt_harmonic(m: u64, p: u64) -> Result<Residue> {
    if m >= p {
        return Err(Error::IndexOutOfRange);
    }
    let inv = inverse_table(p);
    let mut acc = 0u64;
    for k in 1..=m {
        let t = inv[k as usize];
        acc = if k % 2 == 1 { (acc + p - t) % p } else { (acc + t) % p };
    }
    Ok(Residue::from_u64(acc, p, 1))
}

pub fn alt_harmonic_exact(m: u64) -> Rat {
    let mut acc = Rat::zero();
    for k in 1..=m {
        let t = rat(1, k as i64);
        if k % 2 == 1 {
            acc -= t;
        } else {
            acc += t;
        }
    }
    acc
}

/// sum_{k=1}^{m} (-1)^k / (2k-1) mod p.
pub fn alt_odd_harmonic(m: u64, p: u64) -> Result<Residue> {
    if m > 0 && 2 * m > p {
        return Err(Error::IndexOutOfRange);
    }
    let inv = inverse_table(p);
    let mut acc = 0u64;
    for k in 1..=m {
        let t = inv[(2 * k - 1) as usize];
        acc = if k % 2 == 1 { (acc + p - t) % p } else { (acc + t) % p };
    }
    Ok(Residue::from_u64(acc, p, 1))
}

pub fn alt_odd_harmonic_exact(m: u64) -> Rat {
    let mut acc = Rat::zero();
    for k in 1..=m {
        let t = rat(1, 2 * k as i64 - 1);
        if k % 2 == 1 {
            acc -= t;
        } else {
            acc += t;
        }
    }
    acc
}

/// sum_{k=1}^{m} (-1)^k / (2k+1) mod p; errors when some 2k+1 hits p.
pub fn alt_odd_harmonic_shift(m: u64, p: u64) -> Result<Residue> {
    if 2 * m + 1 >= p {
        return Err(Error::IndexOutOfRange);
    }
    let inv = inverse_table(p);
    let mut acc = 0u64;
    for k in 1..=m {
        let t = inv[(2 * k + 1) as usize];
        acc = if k % 2 == 1 { (acc + p - t) % p } else { (acc + t) % p };
    }
    Ok(Residue::from_u64(acc, p, 1))
}

pub fn alt_odd_harmonic_shift_exact(m: u64) -> Rat {
    let mut acc = Rat::zero();
    for k in 1..=m {
        let t = rat(1, 2 * k as i64 + 1);
        if k % 2 == 1 {
            acc -= t;
        } else {
            acc += t;
        }
    }
    acc
}

/// Alternating power sum sum_{0 <= k < n, k = r (mod m)} (-1)^((k-r)/m) k^s,
/// exactly.
pub fn alt_power_sum_lhs(n: u64, m: u64, r: i64, s: u32) -> Int {
    assert!(m >= 1);
    let mut acc = Int::zero();
    let start = r.rem_euclid(m as i64) as u64;
    let mut k = start;
    while k < n {
        let e = (k as i64 - r).div_euclid(m as i64);
        let pw = if s == 0 {
            Int::one()
        } else {
            Int::from(k).pow(s)
        };
        if e.rem_euclid(2) == 0 {
            acc += pw;
        } else {
            acc -= pw;
        }
        k += m;
    }
    acc
}

fn floor_frac(num: i64, den: u64) -> (i64, Rat) {
    let f = num.div_euclid(den as i64);
    let frac = rat(num, den as i64) - rat_int(f);
    (f, frac)
}

/// Closed form -(m^s/2)((-1)^floor((r-n)/m) E_s(n/m + {(r-n)/m})
///                     - (-1)^floor(r/m) E_s({r/m})), exactly (s small).
pub fn alt_power_sum_rhs_exact(n: u64, m: u64, r: i64, s: u32) -> Rat {
    let (f1, frac1) = floor_frac(r - n as i64, m);
    let (f2, frac2) = floor_frac(r, m);
    let arg1 = rat(n as i64, m as i64) + frac1;
    let e1 = euler_poly_exact(s as usize, &arg1);
    let e2 = euler_poly_exact(s as usize, &frac2);
    let sign1 = if f1.rem_euclid(2) == 0 { Rat::one() } else { -Rat::one() };
    let sign2 = if f2.rem_euclid(2) == 0 { Rat::one() } else { -Rat::one() };
    let ms = rat_int(m as i64).pow(s as i32);
    -(ms / rat_int(2)) * (sign1 * e1 - sign2 * e2)
}

/// Same closed form evaluated mod p with s = p - 2 (requires p not dividing m).
pub fn alt_power_sum_rhs_mod_p(n: u64, m: u64, r: i64, p: u64) -> Result<Residue> {
    let s = (p - 2) as usize;
    let (f1, frac1) = floor_frac(r - n as i64, m);
    let (f2, frac2) = floor_frac(r, m);
    let arg1 = rat(n as i64, m as i64) + frac1;
    let e1 = euler_poly(s, &arg1, p, 1)?;
    let e2 = euler_poly(s, &frac2, p, 1)?;
    let t1 = if f1.rem_euclid(2) == 0 { e1 } else { e1.neg() };
    let t2 = if f2.rem_euclid(2) == 0 { e2 } else { e2.neg() };
    let ms = mod_reduce(&(rat_int(m as i64).pow(s as i32) / rat_int(2)), p, 1)?;
    Ok(ms.mul(&t1.sub(&t2)).neg())
}
