use super::factor::{factorize, Factorization};
use super::primes::is_prime;
use super::ArithError;

/// Default upper bound accepted by [`sigma_bu_oracle`].
pub const ORACLE_BOUND: u64 = 1_000_000;

fn pow128(p: u64, e: u32) -> Option<u128> {
    (p as u128).checked_pow(e)
}

/// σ**(p^e) without validating that `p` is prime. `None` on overflow or e = 0.
#[inline]
pub(crate) fn sbu_prime_power(p: u64, e: u32) -> Option<u64> {
    if e == 0 {
        return None;
    }
    if e == 1 {
        return p.checked_add(1);
    }
    let p128 = p as u128;
    let geometric = (pow128(p, e + 1)? - 1) / (p128 - 1);
    let value = if e % 2 == 0 {
        geometric - pow128(p, e / 2)?
    } else {
        geometric
    };
    u64::try_from(value).ok()
}

fn check_prime_power_args(p: u64, e: u32) -> Result<(), ArithError> {
    if e == 0 {
        return Err(ArithError::ZeroExponent);
    }
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    Ok(())
}

/// Sum of the biunitary divisors of `p^e`.
///
/// For odd `e` every divisor of `p^e` is biunitary, giving the full geometric
/// sum. For even `e` the single divisor `p^(e/2)` is excluded.
pub fn sigma_bu_prime_power(p: u64, e: u32) -> Result<u64, ArithError> {
    check_prime_power_args(p, e)?;
    sbu_prime_power(p, e).ok_or(ArithError::Overflow("sigma_bu_prime_power"))
}

/// Same value as [`sigma_bu_prime_power`], through the factored form
/// `(p^⌊(e+2)/2⌋ + 1)(p^⌊(e+1)/2⌋ − 1) / (p − 1)`.
pub fn sigma_bu_prime_power_floor(p: u64, e: u32) -> Result<u64, ArithError> {
    check_prime_power_args(p, e)?;
    let overflow = ArithError::Overflow("sigma_bu_prime_power_floor");
    let upper = pow128(p, (e + 2) / 2).ok_or(overflow.clone())? + 1;
    let lower = pow128(p, (e + 1) / 2).ok_or(overflow.clone())? - 1;
    let value = upper.checked_mul(lower).ok_or(overflow.clone())? / (p as u128 - 1);
    u64::try_from(value).map_err(|_| overflow)
}

/// σ**(n) from the factorization of n. σ**(1) = 1.
pub fn sigma_bu(f: &Factorization) -> Result<u64, ArithError> {
    f.pairs().iter().try_fold(1u64, |acc, &(p, e)| {
        sbu_prime_power(p, e)
            .and_then(|s| acc.checked_mul(s))
            .ok_or(ArithError::Overflow("sigma_bu"))
    })
}

/// Unitary divisor sum σ*(n) = Π (p^e + 1).
pub fn sigma_unitary(f: &Factorization) -> Result<u64, ArithError> {
    f.pairs().iter().try_fold(1u64, |acc, &(p, e)| {
        p.checked_pow(e)
            .and_then(|pe| pe.checked_add(1))
            .and_then(|s| acc.checked_mul(s))
            .ok_or(ArithError::Overflow("sigma_unitary"))
    })
}

/// Classical divisor sum σ(n) = Π (p^(e+1) − 1)/(p − 1).
pub fn sigma_classic(f: &Factorization) -> Result<u64, ArithError> {
    f.pairs().iter().try_fold(1u64, |acc, &(p, e)| {
        pow128(p, e + 1)
            .map(|pe1| (pe1 - 1) / (p as u128 - 1))
            .and_then(|s| u64::try_from(s).ok())
            .and_then(|s| acc.checked_mul(s))
            .ok_or(ArithError::Overflow("sigma_classic"))
    })
}

/// Number of distinct prime factors.
pub fn omega(f: &Factorization) -> usize {
    f.pairs().len()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn exact_power(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// `d | n` is biunitary when no prime occurs in `d` and `n/d` with the same
/// nonzero exponent, i.e. their greatest common unitary divisor is 1.
fn is_biunitary_divisor(d: u64, n: u64) -> bool {
    let co = n / d;
    let mut g = gcd(d, co);
    let mut p = 2;
    while p * p <= g {
        if g % p == 0 {
            if exact_power(d, p) == exact_power(co, p) {
                return false;
            }
            while g % p == 0 {
                g /= p;
            }
        }
        p += 1;
    }
    g == 1 || exact_power(d, g) != exact_power(co, g)
}

/// σ**(n) by enumerating every divisor of `n` and testing it directly
/// against the biunitary criterion. Independent of the prime-power formula.
pub fn sigma_bu_oracle(n: u64) -> Result<u64, ArithError> {
    sigma_bu_oracle_bounded(n, ORACLE_BOUND)
}

pub fn sigma_bu_oracle_bounded(n: u64, bound: u64) -> Result<u64, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    if n > bound {
        return Err(ArithError::AboveOracleBound { n, bound });
    }
    let mut sum = 0u64;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            let other = n / d;
            if is_biunitary_divisor(d, n) {
                sum += d;
            }
            if other != d && is_biunitary_divisor(other, n) {
                sum += other;
            }
        }
        d += 1;
    }
    Ok(sum)
}

/// σ**(n) for an unfactored argument.
pub(crate) fn sigma_bu_of(n: u64) -> Result<u64, ArithError> {
    sigma_bu(&factorize(n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;
    use proptest::prelude::*;

    fn f(n: u64) -> Factorization {
        factorize(n).unwrap()
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(sigma_bu_prime_power(3, 2), Ok(10));
        assert_eq!(sigma_bu_prime_power(2, 4), Ok(27));
        assert_eq!(sigma_bu_prime_power(5, 2), Ok(26));
        for p in [2u64, 3, 13, 239, 65537, 4_294_967_291] {
            assert_eq!(sigma_bu_prime_power(p, 1), Ok(p + 1));
        }
        assert_eq!(sigma_bu_prime_power(4, 1), Err(ArithError::NotPrime(4)));
        assert_eq!(sigma_bu_prime_power(3, 0), Err(ArithError::ZeroExponent));
    }

    #[test]
    fn overflow_is_reported_not_wrapped() {
        assert_eq!(sigma_bu_prime_power(2, 63), Ok(u64::MAX));
        assert!(matches!(sigma_bu_prime_power(2, 64), Err(ArithError::Overflow(_))));
        assert!(matches!(sigma_bu_prime_power_floor(2, 64), Err(ArithError::Overflow(_))));
        assert!(matches!(sigma_bu_prime_power(2, 1000), Err(ArithError::Overflow(_))));
        assert!(matches!(sigma_bu_prime_power(4_294_967_291, 3), Err(ArithError::Overflow(_))));
        let big = Factorization::from_pairs(vec![(2, 40), (3, 15)]).unwrap();
        assert!(matches!(sigma_bu(&big), Err(ArithError::Overflow(_))));
    }

    #[test]
    fn two_formulas_agree() {
        for p in primes_up_to(100) {
            for e in 1..=40u32 {
                let a = sigma_bu_prime_power(p, e);
                let b = sigma_bu_prime_power_floor(p, e);
                match (&a, &b) {
                    (Ok(x), Ok(y)) => assert_eq!(x, y, "p={p} e={e}"),
                    (Err(ArithError::Overflow(_)), Err(ArithError::Overflow(_))) => {}
                    _ => panic!("p={p} e={e}: {a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn sigma_bu_examples() {
        assert_eq!(sigma_bu(&f(10)), Ok(18));
        assert_eq!(sigma_bu(&f(1)), Ok(1));
        assert_eq!(sigma_bu(&f(169)), Ok(170));
        assert_eq!(sigma_bu(&f(289)), Ok(290));
        assert_eq!(sigma_bu(&f(12)), Ok(20));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(sigma_bu_oracle(9), Ok(10));
        assert_eq!(sigma_bu_oracle(12), Ok(20));
        assert_eq!(sigma_bu_oracle(16), Ok(27));
        assert_eq!(sigma_bu_oracle(10), Ok(18));
        assert_eq!(sigma_bu_oracle(1), Ok(1));
        assert_eq!(
            sigma_bu_oracle(ORACLE_BOUND + 1),
            Err(ArithError::AboveOracleBound { n: ORACLE_BOUND + 1, bound: ORACLE_BOUND })
        );
        assert_eq!(sigma_bu_oracle(0), Err(ArithError::Zero));
    }

    #[test]
    fn unitary_and_classic_examples() {
        assert_eq!(sigma_unitary(&f(2)), Ok(3));
        assert_eq!(sigma_unitary(&f(3)), Ok(4));
        assert_eq!(sigma_unitary(&f(1)), Ok(1));
        assert_eq!(sigma_unitary(&f(238)), Ok(432));
        assert_eq!(sigma_unitary(&f(432)), Ok(476));
        assert_eq!(sigma_classic(&f(6)), Ok(12));
        assert_eq!(sigma_classic(&f(16)), Ok(31));
        assert_eq!(sigma_classic(&f(9)), Ok(13));
        assert_eq!(omega(&f(1)), 0);
        assert_eq!(omega(&f(90)), 3);
        assert_eq!(omega(&f(1024)), 1);
    }

    #[test]
    fn sandwich_and_equality_conditions() {
        for n in 1..=100_000u64 {
            let fac = f(n);
            let bu = sigma_bu(&fac).unwrap();
            let un = sigma_unitary(&fac).unwrap();
            let cl = sigma_classic(&fac).unwrap();
            assert!(un <= bu && bu <= cl, "n={n}");
            let all_odd = fac.pairs().iter().all(|&(_, e)| e % 2 == 1);
            let all_small = fac.pairs().iter().all(|&(_, e)| e <= 2);
            assert_eq!(bu == cl, all_odd, "n={n}");
            assert_eq!(bu == un, all_small, "n={n}");
        }
    }

    fn gcd_u64(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd_u64(b, a % b) }
    }

    proptest! {
        #[test]
        fn multiplicative_on_coprime_pairs(m in 1u64..(1 << 20), n in 1u64..(1 << 20)) {
            prop_assume!(gcd_u64(m, n) == 1);
            let mn = m * n;
            prop_assert_eq!(
                sigma_bu_of(mn).unwrap(),
                sigma_bu_of(m).unwrap() * sigma_bu_of(n).unwrap()
            );
        }
    }
}
