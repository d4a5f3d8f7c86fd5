use serde::{Deserialize, Serialize};

use crate::arith::{factor_into, sbu_prime_power, ArithError};

use super::segment::Segment;
use super::SearchError;

/// One `n` with `n | σ**(σ**(n))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SearchRecord {
    pub n: u64,
    /// σ**(n)
    pub s1: u64,
    /// σ**(σ**(n))
    pub s2: u64,
    /// s2 / n
    pub k: u32,
}

/// Working buffer reused across numbers.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    factors: Vec<(u64, u32)>,
}

/// σ**(n) and σ**(σ**(n)) for one member of the segment.
#[inline]
pub(crate) fn iterate_sigma(seg: &Segment, n: u64, scratch: &mut Scratch) -> Result<(u64, u64), ArithError> {
    let ctx = seg.context();
    let buf = &mut scratch.factors;
    buf.clear();
    let overflow = || ArithError::Overflow("sigma_bu chain");

    let mut s1 = 1u64;
    let mut rest = n;
    for (i, e) in seg.raw_entries(n) {
        let c = ctx.component(i, e);
        rest /= c.prime_power;
        s1 = s1.checked_mul(c.sigma).ok_or_else(overflow)?;
        buf.extend_from_slice(ctx.component_factors(c));
    }
    if rest > 1 {
        // leftover prime above sqrt(hi): σ**(rest) = rest + 1
        s1 = s1.checked_mul(rest + 1).ok_or_else(overflow)?;
        factor_into(rest + 1, buf)?;
    }

    buf.sort_unstable_by_key(|&(q, _)| q);
    let mut s2 = 1u64;
    let mut idx = 0;
    while idx < buf.len() {
        let (q, mut f) = buf[idx];
        idx += 1;
        while idx < buf.len() && buf[idx].0 == q {
            f += buf[idx].1;
            idx += 1;
        }
        let term = sbu_prime_power(q, f).ok_or_else(overflow)?;
        s2 = s2.checked_mul(term).ok_or_else(overflow)?;
    }
    Ok((s1, s2))
}

/// Every `n` in the segment with `n | σ**(σ**(n))`, ascending.
pub fn scan_segment(seg: &Segment) -> Result<Vec<SearchRecord>, SearchError> {
    let mut scratch = Scratch::default();
    let mut out = Vec::new();
    for n in seg.lo()..=seg.hi() {
        let (s1, s2) = iterate_sigma(seg, n, &mut scratch).map_err(|source| SearchError::Arith { n, source })?;
        if s2 % n == 0 {
            let k = u32::try_from(s2 / n).map_err(|_| SearchError::Arith {
                n,
                source: ArithError::Overflow("multiplier"),
            })?;
            out.push(SearchRecord { n, s1, s2, k });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{sigma_bu_oracle, sigma_bu_oracle_bounded};

    fn rec(n: u64, s1: u64, s2: u64, k: u32) -> SearchRecord {
        SearchRecord { n, s1, s2, k }
    }

    #[test]
    fn small_segments() {
        assert_eq!(
            scan_segment(&Segment::standalone(2, 10).unwrap()).unwrap(),
            vec![rec(2, 3, 4, 2), rec(8, 15, 24, 3), rec(9, 10, 18, 2), rec(10, 18, 30, 3)]
        );
        assert_eq!(scan_segment(&Segment::standalone(1, 1).unwrap()).unwrap(), vec![rec(1, 1, 1, 1)]);
        assert!(scan_segment(&Segment::standalone(11, 14).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn chain_matches_oracle() {
        let seg = Segment::standalone(1, 30_000).unwrap();
        let mut scratch = Scratch::default();
        for n in 1..=30_000 {
            let (s1, s2) = iterate_sigma(&seg, n, &mut scratch).unwrap();
            assert_eq!(s1, sigma_bu_oracle(n).unwrap(), "n={n}");
            assert_eq!(s2, sigma_bu_oracle_bounded(s1, u64::MAX).unwrap(), "n={n}");
        }
    }

    #[test]
    fn eleven_to_fourteen_by_oracle() {
        for n in 11..=14u64 {
            let s2 = sigma_bu_oracle(sigma_bu_oracle(n).unwrap()).unwrap();
            assert_ne!(s2 % n, 0);
        }
    }

    #[test]
    fn sixteen_is_not_a_hit() {
        let s1 = sigma_bu_oracle(16).unwrap();
        let s2 = sigma_bu_oracle(s1).unwrap();
        assert_eq!((s1, s2), (27, 40));
        assert_eq!(s2 % 16, 8);
    }
}
