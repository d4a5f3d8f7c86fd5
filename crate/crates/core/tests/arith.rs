use biunitary::arith::{factorize, is_prime, sigma_bu, sigma_bu_oracle, Factorization};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn check_round_trip(n: u64, f: &Factorization) {
    let mut product = 1u64;
    let mut last = 0;
    for &(p, e) in f.pairs() {
        assert!(p > last, "n={n}: primes not strictly ascending");
        assert!(e >= 1);
        assert!(is_prime(p), "n={n}: {p} is not prime");
        product = product.checked_mul(p.checked_pow(e).unwrap()).unwrap();
        last = p;
    }
    assert_eq!(product, n);
    assert_eq!(f.value(), n);
}

#[test]
fn factorize_million_random_words() {
    let mut rng = StdRng::seed_from_u64(0x5eed_b05b);
    for _ in 0..1_000_000 {
        let n = rng.gen_range(1..=u64::MAX);
        check_round_trip(n, &factorize(n).unwrap());
    }
}

#[test]
fn factorize_semiprimes_of_32_bit_primes() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut prime = || loop {
        let p = rng.gen_range(1u64 << 31..1u64 << 32);
        if is_prime(p) {
            return p;
        }
    };
    for _ in 0..200 {
        let (p, q) = (prime(), prime());
        let n = p * q;
        check_round_trip(n, &factorize(n).unwrap());
    }
}

#[test]
fn fast_path_matches_divisor_enumeration() {
    for n in 1..=100_000u64 {
        assert_eq!(sigma_bu(&factorize(n).unwrap()).unwrap(), sigma_bu_oracle(n).unwrap(), "n={n}");
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn multiplicative_on_coprime_pairs(m in 1u64..5000, n in 1u64..5000) {
        // strip from n every prime it shares with m
        let mut n = n;
        loop {
            let g = gcd(m, n);
            if g == 1 {
                break;
            }
            n /= g;
        }
        let s = |x: u64| sigma_bu(&factorize(x).unwrap()).unwrap();
        prop_assert_eq!(s(m * n), s(m) * s(n));
    }

    #[test]
    fn sigma_bu_bounded_by_classic_sum(n in 1u64..1_000_000) {
        let s = sigma_bu(&factorize(n).unwrap()).unwrap();
        prop_assert!(s >= n);
        prop_assert_eq!(s, sigma_bu_oracle(n).unwrap());
    }
}
