//! Cohomology calculus on products of projective spaces.
//!
//! Three layers, each checked against the next in the tests:
//!
//! * [`h_omega`], the closed four-case formula for `h^q(Omega^r_{P^n}(t))`;
//! * [`bbw_resolve`], the Bott-Borel-Weil exchange algorithm on SL weights,
//!   kept as a validation and documentation path;
//! * [`h_e`], the Künneth assembly of `h^q` for the twisted exterior powers
//!   of the dual Friedland-Ottaviani bundle, as a sum over compositions.
//!
//! Only dimensions and dominant weights are ever materialized.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::binom::binom_u128;
use crate::format::TensorFormat;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// An integer SL(m) weight, read modulo the all-ones vector.
///
/// Conventions: the line bundle `O(c)` on `P^{m-1}` carries weight
/// `c * lambda_1 = (c, 0, ..., 0)`; `Omega^r(r+1)` carries the fundamental
/// weight `lambda_{r+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    /// Weight of `Omega^r_{P^{m-1}}(twist)`, namely
    /// `(twist - r - 1) lambda_1 + lambda_{r+1}`.
    pub fn of_twisted_forms(m: usize, r: usize, twist: i64) -> Weight {
        assert!(r < m);
        let mut entries = vec![0i64; m];
        for e in entries.iter_mut().take(r + 1) {
            *e = 1;
        }
        entries[0] += twist - r as i64 - 1;
        Weight(entries)
    }
}

/// Outcome of the exchange algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CohomologyAnswer {
    /// `lambda + delta` is singular; all cohomology vanishes.
    Singular,
    /// Cohomology concentrated in one degree.
    Concentrated {
        index: usize,
        dominant: Weight,
        dim: BigUint,
    },
}

/// Dimension of the irreducible SL representation with the given
/// non-increasing highest weight, by the Weyl dimension formula
/// `prod_{i<j} (b_i - b_j + j - i) / (j - i)`, in exact arithmetic.
pub fn weyl_dim(dominant: &Weight) -> BigUint {
    let b = &dominant.0;
    let m = b.len();
    debug_assert!(b.windows(2).all(|w| w[0] >= w[1]));
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..m {
        for j in (i + 1)..m {
            let f = b[i] - b[j] + (j as i64 - i as i64);
            num *= BigUint::from(f as u64);
            den *= BigUint::from((j - i) as u64);
        }
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Bott-Borel-Weil by bubble sorting `lambda + delta` under the dotted
/// action. Returns [`CohomologyAnswer::Singular`] when `lambda + delta`
/// has a repeated entry, otherwise the exchange count, the normalized
/// dominant weight and its Weyl dimension.
pub fn bbw_resolve(lambda: &Weight) -> CohomologyAnswer {
    let m = lambda.0.len();
    assert!(m >= 2);
    let delta: Vec<i64> = (0..m).map(|i| (m - 1 - i) as i64).collect();
    let mut mu: Vec<i64> = lambda.0.iter().zip(&delta).map(|(a, d)| a + d).collect();

    // bubble sort into strictly decreasing order, counting exchanges
    let mut exchanges = 0usize;
    loop {
        let mut swapped = false;
        for i in 0..m - 1 {
            if mu[i] == mu[i + 1] {
                return CohomologyAnswer::Singular;
            }
            if mu[i] < mu[i + 1] {
                mu.swap(i, i + 1);
                exchanges += 1;
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }

    let beta: Vec<i64> = mu.iter().zip(&delta).map(|(s, d)| s - d).collect();
    let last = beta[m - 1];
    let dominant = Weight(beta.into_iter().map(|b| b - last).collect());
    let dim = weyl_dim(&dominant);
    CohomologyAnswer::Concentrated {
        index: exchanges,
        dominant,
        dim,
    }
}

/// `h^q(Omega^r_{P^n}(twist))` by Bott's closed formula. Out-of-range `r`
/// or `q` give 0.
pub fn h_omega(n: i64, r: i64, twist: i64, q: i64) -> u128 {
    if q == 0 && 0 <= r && r <= n && twist > r {
        binom_u128(twist + n - r, twist) * binom_u128(twist - 1, r)
    } else if q == r && 0 <= q && q <= n && twist == 0 {
        1
    } else if q == n && n >= r && r >= 0 && twist < r - n {
        binom_u128(-twist + r, -twist) * binom_u128(-twist - 1, n - r)
    } else {
        0
    }
}

/// The unique degree where `Omega^r_{P^n}(twist)` has cohomology, with its
/// dimension, or `None` when everything vanishes. A regrouping of
/// [`h_omega`]: for fixed `(n, r, twist)` at most one case applies.
pub fn h_omega_concentrated(n: i64, r: i64, twist: i64) -> Option<(i64, u128)> {
    if r < 0 || r > n {
        return None;
    }
    if twist > r {
        let v = binom_u128(twist + n - r, twist) * binom_u128(twist - 1, r);
        return (v != 0).then_some((0, v));
    }
    if twist == 0 {
        return Some((r, 1));
    }
    if twist < r - n {
        let v = binom_u128(-twist + r, -twist) * binom_u128(-twist - 1, n - r);
        return (v != 0).then_some((n, v));
    }
    None
}

/// `h^q` of the r-th twisted exterior power of the dual section bundle on
/// the Segre product: the Künneth sum over compositions `r_1 + ... + r_k = r`
/// of products of `h^{q_i}(Omega^{r_i}_{P^{n_i}}(2 r_i + 1 - r))`.
///
/// Since each factor is concentrated in one degree, the inner sum over
/// `q_1 + ... + q_k = q` collapses: a composition of `r` contributes iff
/// every factor is nonvanishing and the concentration degrees add to `q`.
pub fn h_e(format: &TensorFormat, r: i64, q: i64) -> u128 {
    #[cfg(feature = "parallel")]
    {
        if r < 0 || q < 0 {
            return 0;
        }
        let ns: Vec<i64> = format.dims().iter().map(|&d| d as i64 - 1).collect();
        (0..=r)
            .into_par_iter()
            .map(|r1| h_e_rec(&ns, 0, r1, r, r - r1, q))
            .sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        h_e_seq(format, r, q)
    }
}

/// Sequential evaluation of [`h_e`], identical result.
pub fn h_e_seq(format: &TensorFormat, r: i64, q: i64) -> u128 {
    if r < 0 || q < 0 {
        return 0;
    }
    let ns: Vec<i64> = format.dims().iter().map(|&d| d as i64 - 1).collect();
    (0..=r).map(|r1| h_e_rec(&ns, 0, r1, r, r - r1, q)).sum()
}

/// Contribution of all compositions that assign `ri` to factor `idx` and
/// split `rest` over the remaining factors, requiring the concentration
/// degrees of factors `idx..` to sum to `q_needed`.
fn h_e_rec(ns: &[i64], idx: usize, ri: i64, r: i64, rest: i64, q_needed: i64) -> u128 {
    let last = idx + 1 == ns.len();
    if last && rest != 0 {
        return 0;
    }
    let Some((qi, vi)) = h_omega_concentrated(ns[idx], ri, 2 * ri + 1 - r) else {
        return 0;
    };
    if qi > q_needed {
        return 0;
    }
    if last {
        return if qi == q_needed { vi } else { 0 };
    }
    let mut total = 0u128;
    for r_next in 0..=rest {
        let sub = h_e_rec(ns, idx + 1, r_next, r, rest - r_next, q_needed - qi);
        total += vi * sub;
    }
    total
}
