//! Segmented factor sieve.
//!
//! Every `n` in a segment is split into prime powers `p^e` with `p <= sqrt(hi)`
//! plus at most one leftover prime above that bound. σ** of each small prime
//! power, together with its own factorization, is computed once per run and
//! shared by all segments.

use std::sync::Arc;

use crate::arith::{factor_into, isqrt, primes_up_to, sbu_prime_power, ArithError, Factorization};

use super::SearchError;

/// Largest `hi` accepted by the sieve.
pub const MAX_BOUND: u64 = 1 << 40;

const EXP_BITS: u32 = 6;
const EXP_MASK: u32 = (1 << EXP_BITS) - 1;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Component {
    pub prime_power: u64,
    pub sigma: u64,
    factors_start: u32,
    factors_len: u32,
}

/// Per-run tables: sieving primes up to sqrt(hi) and, for each `p^e <= hi`,
/// the value σ**(p^e) with its factorization.
#[derive(Debug)]
pub struct SieveContext {
    hi: u64,
    primes: Vec<u64>,
    /// `components[component_start[i] + e - 1]` describes `primes[i]^e`.
    component_start: Vec<u32>,
    components: Vec<Component>,
    component_factors: Vec<(u64, u32)>,
}

impl SieveContext {
    pub fn new(hi: u64) -> Result<Self, SearchError> {
        if hi > MAX_BOUND {
            return Err(SearchError::BoundTooLarge(hi));
        }
        let primes = primes_up_to(isqrt(hi));
        let mut component_start = Vec::with_capacity(primes.len() + 1);
        let mut components = Vec::new();
        let mut component_factors = Vec::new();
        for &p in &primes {
            component_start.push(components.len() as u32);
            let mut pe = p;
            let mut e = 1u32;
            loop {
                let sigma = sbu_prime_power(p, e).ok_or(ArithError::Overflow("sieve component"))?;
                let factors_start = component_factors.len() as u32;
                factor_into(sigma, &mut component_factors)?;
                components.push(Component {
                    prime_power: pe,
                    sigma,
                    factors_start,
                    factors_len: component_factors.len() as u32 - factors_start,
                });
                match pe.checked_mul(p) {
                    Some(next) if next <= hi => {
                        pe = next;
                        e += 1;
                    }
                    _ => break,
                }
            }
        }
        component_start.push(components.len() as u32);
        Ok(Self {
            hi,
            primes,
            component_start,
            components,
            component_factors,
        })
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    #[inline]
    pub(crate) fn component(&self, prime_index: u32, e: u32) -> &Component {
        &self.components[(self.component_start[prime_index as usize] + e - 1) as usize]
    }

    #[inline]
    pub(crate) fn component_factors(&self, c: &Component) -> &[(u64, u32)] {
        let start = c.factors_start as usize;
        &self.component_factors[start..start + c.factors_len as usize]
    }
}

/// A contiguous block `[lo, hi]` together with the factorization of every
/// member, stored as a compact smallest-prime-first table.
#[derive(Debug)]
pub struct Segment {
    ctx: Arc<SieveContext>,
    lo: u64,
    hi: u64,
    offsets: Vec<u32>,
    /// packed `(prime_index << EXP_BITS) | exponent`, ascending by prime per n
    entries: Vec<u32>,
}

impl Segment {
    pub fn new(ctx: Arc<SieveContext>, lo: u64, hi: u64) -> Result<Self, SearchError> {
        let mut seg = Self {
            ctx,
            lo: 0,
            hi: 0,
            offsets: Vec::new(),
            entries: Vec::new(),
        };
        seg.refill(lo, hi)?;
        Ok(seg)
    }

    /// Convenience constructor with its own context sized for `hi`.
    pub fn standalone(lo: u64, hi: u64) -> Result<Self, SearchError> {
        Self::new(Arc::new(SieveContext::new(hi)?), lo, hi)
    }

    /// Re-sieves this buffer for a new interval, reusing its allocations.
    pub fn refill(&mut self, lo: u64, hi: u64) -> Result<(), SearchError> {
        if lo == 0 || lo > hi {
            return Err(SearchError::InvalidInterval { lo, hi });
        }
        if hi > self.ctx.hi {
            return Err(SearchError::BoundTooLarge(hi));
        }
        let len = usize::try_from(hi - lo + 1)
            .ok()
            .filter(|&l| l < u32::MAX as usize / 16)
            .ok_or(SearchError::SegmentTooLarge(hi - lo + 1))?;
        self.lo = lo;
        self.hi = hi;

        let root = isqrt(hi);
        let primes = &self.ctx.primes[..self.ctx.primes.partition_point(|&p| p <= root)];

        // pass 1: count sieving primes per n
        self.offsets.clear();
        self.offsets.resize(len + 1, 0);
        for &p in primes {
            let mut j = first_multiple_index(lo, p);
            while j < len {
                self.offsets[j + 1] += 1;
                j += p as usize;
            }
        }
        for j in 0..len {
            self.offsets[j + 1] += self.offsets[j];
        }

        // pass 2: place entries, then bump exponents for higher powers
        self.entries.clear();
        self.entries.resize(self.offsets[len] as usize, 0);
        let mut cursor: Vec<u32> = self.offsets[..len].to_vec();
        for (i, &p) in primes.iter().enumerate() {
            let tag = (i as u32) << EXP_BITS;
            let mut j = first_multiple_index(lo, p);
            while j < len {
                self.entries[cursor[j] as usize] = tag | 1;
                cursor[j] += 1;
                j += p as usize;
            }
            let mut pk = p;
            while let Some(next) = pk.checked_mul(p).filter(|&v| v <= hi) {
                pk = next;
                let mut j = first_multiple_index(lo, pk);
                while j < len {
                    self.entries[cursor[j] as usize - 1] += 1;
                    j += pk as usize;
                }
            }
        }
        Ok(())
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.lo..=self.hi).contains(&n)
    }

    pub(crate) fn context(&self) -> &SieveContext {
        &self.ctx
    }

    /// Packed small-prime entries of `n` (must be in the segment).
    #[inline]
    pub(crate) fn raw_entries(&self, n: u64) -> impl Iterator<Item = (u32, u32)> + '_ {
        let j = (n - self.lo) as usize;
        self.entries[self.offsets[j] as usize..self.offsets[j + 1] as usize]
            .iter()
            .map(|&packed| (packed >> EXP_BITS, packed & EXP_MASK))
    }

    /// Smallest prime factor of `n`, `None` for `n = 1` or outside the segment.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if !self.contains(n) || n == 1 {
            return None;
        }
        Some(
            self.raw_entries(n)
                .next()
                .map_or(n, |(i, _)| self.ctx.primes[i as usize]),
        )
    }

    /// Complete factorization of `n` read from the table.
    pub fn factorization(&self, n: u64) -> Option<Factorization> {
        if !self.contains(n) {
            return None;
        }
        let mut pairs = Vec::new();
        let mut rest = n;
        for (i, e) in self.raw_entries(n) {
            let c = self.ctx.component(i, e);
            pairs.push((self.ctx.primes[i as usize], e));
            rest /= c.prime_power;
        }
        if rest > 1 {
            pairs.push((rest, 1));
        }
        Some(Factorization::from_canonical(pairs, n))
    }
}

fn first_multiple_index(lo: u64, p: u64) -> usize {
    (lo.div_ceil(p) * p - lo) as usize
}
