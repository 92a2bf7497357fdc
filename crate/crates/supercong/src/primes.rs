//! Prime sieving for suite runs.

/// Odd primes in [lo, hi], by a plain sieve of Eratosthenes.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 3 || hi < lo {
        return Vec::new();
    }
    let hi_usize = hi as usize;
    let mut composite = vec![false; hi_usize + 1];
    let mut p = 2usize;
    while p * p <= hi_usize {
        if !composite[p] {
            let mut j = p * p;
            while j <= hi_usize {
                composite[j] = true;
                j += p;
            }
        }
        p += 1;
    }
    (lo.max(3)..=hi)
        .filter(|&n| n % 2 == 1 && !composite[n as usize])
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranges() {
        assert_eq!(odd_primes_in(3, 20), vec![3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(odd_primes_in(4, 4), Vec::<u64>::new());
        assert_eq!(odd_primes_in(2, 2), Vec::<u64>::new()); // 2 is never in scope
        assert_eq!(odd_primes_in(10, 3), Vec::<u64>::new());
    }

    #[test]
    fn count_below_500() {
        // 95 primes in [2, 499], minus the even prime
        assert_eq!(odd_primes_in(3, 499).len(), 94);
    }
}
