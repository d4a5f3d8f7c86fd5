//! Exact integer arithmetic behind the search: primality, factorization and
//! the divisor-sum family σ**, σ*, σ.

mod factor;
mod primes;
mod sigma;

pub use factor::{factorize, Factorization, Valuation, valuation};
pub use primes::{base_tables, is_prime, isqrt, primes_up_to, BaseTables, SpfTable, BASE_PRIME_LIMIT};
pub use sigma::{
    omega, sigma_bu, sigma_bu_oracle, sigma_bu_oracle_bounded, sigma_bu_prime_power,
    sigma_bu_prime_power_floor, sigma_classic, sigma_unitary, ORACLE_BOUND,
};

pub(crate) use factor::factor_into;
pub(crate) use primes::pow_mod;
pub(crate) use sigma::sbu_prime_power;
pub(crate) use sigma::sigma_bu_of;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("zero has no factorization")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent must be positive")]
    ZeroExponent,
    #[error("{n} exceeds the oracle bound {bound}")]
    AboveOracleBound { n: u64, bound: u64 },
    #[error("could not split composite cofactor {0}")]
    FactorizationFailed(u64),
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
}
