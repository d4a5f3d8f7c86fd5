use std::fmt;

use serde::{Deserialize, Serialize};

use super::primes::{base_tables, is_prime, mul_mod, BASE_PRIME_LIMIT};
use super::ArithError;

/// Canonical prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
    value: u64,
}

impl Factorization {
    pub fn one() -> Self {
        Self {
            pairs: Vec::new(),
            value: 1,
        }
    }

    /// Builds a factorization from explicit pairs, checking every invariant.
    pub fn from_pairs(pairs: Vec<(u64, u32)>) -> Result<Self, ArithError> {
        let mut value = 1u64;
        let mut last = 0u64;
        for &(p, e) in &pairs {
            if p <= last {
                return Err(ArithError::InvalidFactorization(format!(
                    "primes not strictly increasing at {p}"
                )));
            }
            if e == 0 {
                return Err(ArithError::InvalidFactorization(format!("zero exponent on {p}")));
            }
            if !is_prime(p) {
                return Err(ArithError::NotPrime(p));
            }
            let pe = p.checked_pow(e).ok_or(ArithError::Overflow("factorization value"))?;
            value = value
                .checked_mul(pe)
                .ok_or(ArithError::Overflow("factorization value"))?;
            last = p;
        }
        Ok(Self { pairs, value })
    }

    /// Pairs already known to be canonical (sorted, prime, positive exponents).
    pub(crate) fn from_canonical(pairs: Vec<(u64, u32)>, value: u64) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        Self { pairs, value }
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_one(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Exponent of `p` in the factored value (0 if absent).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.pairs
            .binary_search_by_key(&p, |&(q, _)| q)
            .map_or(0, |i| self.pairs[i].1)
    }

    /// True when the value is `p^e` for a single prime.
    pub fn is_prime_power(&self) -> bool {
        self.pairs.len() == 1
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("1");
        }
        for (i, &(p, e)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Exact power of a prime dividing some integer (`base^count || n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Valuation {
    pub base: u64,
    pub count: u32,
}

pub fn valuation(n: u64, p: u64) -> Result<Valuation, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    let mut count = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        count += 1;
    }
    Ok(Valuation { base: p, count })
}

/// Canonical factorization of `n`.
///
/// Small arguments are read off the shared SPF table. Larger ones go through
/// trial division by the primes below 2^16 (dropping back to the table as soon
/// as the cofactor is small enough), then a primality test and Pollard rho on
/// whatever remains.
pub fn factorize(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let mut pairs = Vec::new();
    factor_into(n, &mut pairs)?;
    Ok(Factorization::from_canonical(pairs, n))
}

/// Appends the canonical pairs of `n` (n >= 1) to `out`.
pub(crate) fn factor_into(mut n: u64, out: &mut Vec<(u64, u32)>) -> Result<(), ArithError> {
    debug_assert!(n > 0);
    let tables = base_tables();
    let spf = &tables.spf;
    if spf.contains(n) {
        spf.factor_into(n, out);
        return Ok(());
    }
    let start = out.len();
    let twos = n.trailing_zeros();
    if twos > 0 {
        out.push((2, twos));
        n >>= twos;
    }
    for d in &tables.odd_divisors {
        if spf.contains(n) {
            spf.factor_into(n, out);
            return Ok(());
        }
        if d.p * d.p > n {
            out.push((n, 1));
            return Ok(());
        }
        if let Some(mut q) = d.exact_div(n) {
            let mut e = 1;
            while let Some(q2) = d.exact_div(q) {
                q = q2;
                e += 1;
            }
            out.push((d.p, e));
            n = q;
        }
    }
    if n == 1 {
        return Ok(());
    }
    // No prime factor below 2^16 remains.
    if n < BASE_PRIME_LIMIT * BASE_PRIME_LIMIT || is_prime(n) {
        out.push((n, 1));
        return Ok(());
    }
    let mut large = Vec::new();
    split_large(n, &mut large)?;
    large.sort_unstable();
    for p in large {
        match out[start..].last_mut() {
            Some(last) if last.0 == p => last.1 += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(())
}

/// Splits a composite with no small factors into primes (with repetition).
fn split_large(n: u64, primes: &mut Vec<u64>) -> Result<(), ArithError> {
    if is_prime(n) {
        primes.push(n);
        return Ok(());
    }
    let r = super::primes::isqrt(n);
    if r * r == n {
        split_large(r, primes)?;
        return split_large(r, primes);
    }
    let d = pollard_brent(n).ok_or(ArithError::FactorizationFailed(n))?;
    split_large(d, primes)?;
    split_large(n / d, primes)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const RHO_MAX_ITERATIONS: u64 = 1 << 22;
const RHO_ATTEMPTS: u64 = 32;

/// Brent's variant of Pollard rho. Returns a nontrivial divisor of odd composite `n`.
fn pollard_brent(n: u64) -> Option<u64> {
    for c in 1..=RHO_ATTEMPTS {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 && r <= RHO_MAX_ITERATIONS {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g > 1 && g < n {
            return Some(g);
        }
    }
    None
}
