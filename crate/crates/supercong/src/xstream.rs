//! Deterministic parameter streams built on the splitmix64 update.
//!
//! Every randomized part of the engine draws from these streams, so a fixed
//! seed reproduces the same run byte for byte, independent of worker count.

use num_integer::Integer;

use crate::numeric::{rat, Rat};

/// splitmix64 state update + output mix.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, bound).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// FNV-1a, used to derive per-(check, prime) substream seeds.
pub fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Substream seed for one (root seed, check id, prime) cell.
pub fn substream_seed(seed: u64, check_id: &str, p: u64) -> u64 {
    let mut mix = SplitMix64::new(seed ^ fnv1a(check_id));
    let a = mix.next_u64();
    let mut mix2 = SplitMix64::new(a ^ p);
    mix2.next_u64()
}

/// Stream of small rationals: numerator in [-12, 12], denominator in [1, 12]
/// coprime to p.
pub struct RatStream {
    rng: SplitMix64,
    p: u64,
}

impl RatStream {
    pub fn new(seed: u64, p: u64) -> Self {
        RatStream { rng: SplitMix64::new(seed), p }
    }

    pub fn next_rat(&mut self) -> Rat {
        let num = self.rng.below(25) as i64 - 12;
        loop {
            let den = self.rng.below(12) as i64 + 1;
            if (den as u64).gcd(&self.p) == 1 {
                return rat(num, den);
            }
        }
    }

    /// Uniform integer in [1, p-1].
    pub fn next_index(&mut self) -> u64 {
        1 + self.rng.below(self.p - 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
