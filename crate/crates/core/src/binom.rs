//! Binomial coefficients with the zero-outside convention.
//!
//! `binom(p, q) = 0` whenever `q < 0`, `p < 0` or `q > p`. This makes the
//! dimension products of domains and codomains well defined even when a
//! degree drops below the number of variables.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Exact binomial coefficient as `u128`. Panics on overflow, which does not
/// occur for the argument ranges used in this crate (`p` below ~90).
pub fn binom_u128(p: i64, q: i64) -> u128 {
    if q < 0 || p < 0 || q > p {
        return 0;
    }
    let q = q.min(p - q);
    let mut acc: u128 = 1;
    for i in 0..q {
        acc = acc
            .checked_mul((p - i) as u128)
            .expect("binomial overflow");
        acc /= (i + 1) as u128;
    }
    acc
}

/// Arbitrary precision binomial coefficient, same convention.
pub fn binom_big(p: i64, q: i64) -> BigUint {
    if q < 0 || p < 0 || q > p {
        return BigUint::zero();
    }
    let q = q.min(p - q);
    let mut acc = BigUint::one();
    for i in 0..q {
        acc *= BigUint::from((p - i) as u64);
        acc /= BigUint::from((i + 1) as u64);
    }
    acc
}
