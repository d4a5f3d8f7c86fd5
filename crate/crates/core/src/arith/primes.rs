//! Deterministic primality, prime generation and a small smallest-prime-factor table.

use std::sync::OnceLock;

/// Upper end of the base prime list used for trial division.
pub const BASE_PRIME_LIMIT: u64 = 1 << 16;

/// Bases that make Miller-Rabin deterministic for every n < 2^64.
const MR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Returns true iff `n` is prime. Deterministic over the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= limit`, ascending, by a plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Floor of the square root, exact for every `u64`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Smallest-prime-factor table over `[0, limit]`.
///
/// Entries for 0 and 1 are 0. Primes map to themselves.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u32) -> Self {
        let limit = limit as usize;
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] != 0 {
                continue;
            }
            spf[i] = i as u32;
            let mut j = i.saturating_mul(i);
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.limit()
    }

    /// Smallest prime factor of `n`, or `None` for 0, 1 or values outside the table.
    pub fn spf(&self, n: u64) -> Option<u64> {
        match self.spf.get(n as usize) {
            Some(&0) | None => None,
            Some(&p) => Some(p as u64),
        }
    }

    /// Appends the (prime, exponent) pairs of `n` in ascending order. `n` must be in range.
    pub(crate) fn factor_into(&self, mut n: u64, out: &mut Vec<(u64, u32)>) {
        debug_assert!(self.contains(n));
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
}

/// Trial division by a fixed odd prime using the multiplicative inverse mod 2^64.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OddDivisor {
    pub p: u64,
    inv: u64,
    max_quotient: u64,
}

impl OddDivisor {
    fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1);
        // Newton iteration doubles the number of correct low bits each round.
        let mut inv = p;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        debug_assert_eq!(p.wrapping_mul(inv), 1);
        Self {
            p,
            inv,
            max_quotient: u64::MAX / p,
        }
    }

    /// `Some(n / p)` when `p | n`.
    #[inline]
    pub fn exact_div(&self, n: u64) -> Option<u64> {
        let q = n.wrapping_mul(self.inv);
        (q <= self.max_quotient).then_some(q)
    }
}

/// Shared immutable prime tables: the primes below 2^16, their divisibility
/// helpers and an SPF table for small arguments.
#[derive(Debug)]
pub struct BaseTables {
    pub(crate) primes: Vec<u64>,
    pub(crate) odd_divisors: Vec<OddDivisor>,
    pub(crate) spf: SpfTable,
}

/// Range of the shared SPF table.
pub const SHARED_SPF_LIMIT: u32 = 1 << 20;

impl BaseTables {
    fn build() -> Self {
        let primes = primes_up_to(BASE_PRIME_LIMIT);
        let odd_divisors = primes[1..].iter().map(|&p| OddDivisor::new(p)).collect();
        Self {
            primes,
            odd_divisors,
            spf: SpfTable::new(SHARED_SPF_LIMIT),
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn spf(&self) -> &SpfTable {
        &self.spf
    }
}

/// Lazily built process-wide tables.
pub fn base_tables() -> &'static BaseTables {
    static TABLES: OnceLock<BaseTables> = OnceLock::new();
    TABLES.get_or_init(BaseTables::build)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn small_values_match_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn named_primes() {
        assert!(!is_prime(1));
        assert!(is_prime(239));
        assert!(is_prime(2_147_483_647));
        assert!(trial_is_prime(2_147_483_647));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime(u64::MAX));
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // strong pseudoprimes to several small bases
        for n in [2047u64, 1_373_653, 3_215_031_751, 3_825_123_056_546_413_051] {
            assert_eq!(is_prime(n), trial_is_prime_big(n), "n = {n}");
        }
    }

    fn trial_is_prime_big(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        // only used for values whose smallest factor is small
        for d in 2..2_000_000u64 {
            if d * d > n {
                return true;
            }
            if n % d == 0 {
                return false;
            }
        }
        panic!("oracle out of range for {n}");
    }

    #[test]
    fn isqrt_exact_at_boundaries() {
        for n in [0u64, 1, 2, 3, 4, 15, 16, 17, u64::MAX, (1 << 32) - 1, 1 << 62] {
            let r = isqrt(n);
            assert!(r * r <= n);
            assert!((r + 1).checked_mul(r + 1).map_or(true, |s| s > n));
        }
    }

    #[test]
    fn spf_table_matches_trial_division() {
        let t = SpfTable::new(10_000);
        assert_eq!(t.spf(0), None);
        assert_eq!(t.spf(1), None);
        for n in 2..=10_000u64 {
            let expected = (2..=n).find(|d| n % d == 0).unwrap();
            assert_eq!(t.spf(n), Some(expected));
        }
    }

    #[test]
    fn odd_divisor_agrees_with_modulo() {
        for p in [3u64, 5, 7, 13, 65521] {
            let d = OddDivisor::new(p);
            for n in (0..5000u64).chain([u64::MAX, u64::MAX - 1, 1 << 40]) {
                assert_eq!(d.exact_div(n), (n % p == 0).then(|| n / p), "{n} / {p}");
            }
        }
    }
}
