//! Sparse multivariate polynomials over the integers, just enough to
//! evaluate the Friedland-Ottaviani generating polynomial and read off one
//! coefficient.
//!
//! Coefficients are arbitrary precision: singular-tuple counts grow fast.
//! No division, gcd or rational functions; products are truncated per
//! variable, which keeps term counts bounded by `prod (n_i + 1)` during the
//! ED degree computation.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};

/// A polynomial stored as a map from exponent vectors to nonzero integer
/// coefficients. All exponent vectors share the same length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(nvars, &vec![0; nvars], BigInt::from(1))
    }

    /// The variable `h_i` (zero-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exp = vec![0u32; nvars];
        exp[i] = 1;
        Self::monomial(nvars, &exp, BigInt::from(1))
    }

    pub fn monomial(nvars: usize, exp: &[u32], coeff: BigInt) -> Self {
        assert_eq!(exp.len(), nvars);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp.to_vec(), coeff);
        }
        SparsePoly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_else(BigInt::zero)
    }

    fn check_arity(&self, other: &SparsePoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    /// Exact sum with zero terms pruned.
    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_arity(other)?;
        let mut terms = self.terms.clone();
        for (exp, c) in &other.terms {
            let entry = terms.entry(exp.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(exp);
            }
        }
        Ok(SparsePoly {
            nvars: self.nvars,
            terms,
        })
    }

    /// Exact product, discarding every term whose exponent exceeds `caps`
    /// in any coordinate.
    pub fn mul_truncated(&self, other: &SparsePoly, caps: &[u32]) -> Result<SparsePoly> {
        self.check_arity(other)?;
        assert_eq!(caps.len(), self.nvars);
        let mut terms: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            'b: for (eb, cb) in &other.terms {
                let mut exp = ea.clone();
                for (x, (&y, &cap)) in exp.iter_mut().zip(eb.iter().zip(caps)) {
                    *x += y;
                    if *x > cap {
                        continue 'b;
                    }
                }
                let entry = terms.entry(exp).or_insert_with(BigInt::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SparsePoly {
            nvars: self.nvars,
            terms,
        })
    }

    /// Truncates in place against `caps`.
    fn truncate(mut self, caps: &[u32]) -> SparsePoly {
        self.terms
            .retain(|exp, _| exp.iter().zip(caps).all(|(&e, &c)| e <= c));
        self
    }
}

/// The i-th factor of the Friedland-Ottaviani product: the geometric sum
/// `sum_{j=0}^{n_i} h_i^j hhat_i^{n_i - j}` with `hhat_i = sum_{j != i} h_j`,
/// expanded directly (never by polynomial division).
pub fn fo_factor(i: usize, ns: &[usize]) -> SparsePoly {
    let k = ns.len();
    assert!(i < k, "factor index out of range");
    let hhat = (0..k)
        .filter(|&j| j != i)
        .fold(SparsePoly::zero(k), |acc, j| {
            acc.add(&SparsePoly::var(k, j)).unwrap()
        });
    let no_caps = vec![u32::MAX; k];
    // powers of hhat up to n_i, then pair with powers of h_i
    let mut hhat_pows = Vec::with_capacity(ns[i] + 1);
    hhat_pows.push(SparsePoly::one(k));
    for _ in 0..ns[i] {
        let last = hhat_pows.last().unwrap();
        hhat_pows.push(last.mul_truncated(&hhat, &no_caps).unwrap());
    }
    let mut acc = SparsePoly::zero(k);
    let mut hi_pow = SparsePoly::one(k);
    for j in 0..=ns[i] {
        let term = hi_pow
            .mul_truncated(&hhat_pows[ns[i] - j], &no_caps)
            .unwrap();
        acc = acc.add(&term).unwrap();
        if j < ns[i] {
            hi_pow = hi_pow
                .mul_truncated(&SparsePoly::var(k, i), &no_caps)
                .unwrap();
        }
    }
    acc
}

/// Euclidean distance degree of the Segre variety of projective dimensions
/// `ns`: the coefficient of `prod h_j^{n_j}` in the product of all
/// Friedland-Ottaviani factors, computed left to right with per-variable
/// truncation at `ns`.
pub fn ed_degree(ns: &[usize]) -> BigUint {
    assert!(ns.len() >= 2 && ns.iter().all(|&n| n >= 1));
    let caps: Vec<u32> = ns.iter().map(|&n| n as u32).collect();
    let mut acc = SparsePoly::one(ns.len());
    for i in 0..ns.len() {
        let factor = fo_factor(i, ns).truncate(&caps);
        acc = acc.mul_truncated(&factor, &caps).unwrap();
    }
    let target: Vec<u32> = caps;
    acc.coeff(&target)
        .to_biguint()
        .expect("ED degree is positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(k: usize, i: usize) -> SparsePoly {
        SparsePoly::var(k, i)
    }

    #[test]
    fn add_examples() {
        let k = 2;
        let minus_h1 = SparsePoly::monomial(k, &[1, 0], BigInt::from(-1));
        assert!(h(k, 0).add(&minus_h1).unwrap().is_zero());

        let h1_plus_h2 = h(k, 0).add(&h(k, 1)).unwrap();
        let sum = h1_plus_h2.add(&h(k, 1)).unwrap();
        assert_eq!(sum.coeff(&[1, 0]), BigInt::from(1));
        assert_eq!(sum.coeff(&[0, 1]), BigInt::from(2));

        let p = h1_plus_h2.clone();
        assert_eq!(p.add(&SparsePoly::zero(k)).unwrap(), p);
    }

    #[test]
    fn add_arity_mismatch() {
        let err = h(2, 0).add(&h(3, 0)).unwrap_err();
        assert!(matches!(err, Error::VariableCountMismatch { .. }));
    }

    #[test]
    fn mul_truncated_examples() {
        let k = 2;
        let s = h(k, 0).add(&h(k, 1)).unwrap();
        let sq = s.mul_truncated(&s, &[1, 1]).unwrap();
        assert_eq!(sq.num_terms(), 1);
        assert_eq!(sq.coeff(&[1, 1]), BigInt::from(2));

        let p = s.clone();
        assert_eq!(p.mul_truncated(&SparsePoly::one(k), &[1, 1]).unwrap(), p);

        let k = 3;
        let s3 = h(k, 0).add(&h(k, 1)).unwrap().add(&h(k, 2)).unwrap();
        let sq3 = s3.mul_truncated(&s3, &[1, 1, 1]).unwrap();
        assert_eq!(sq3.coeff(&[1, 1, 0]), BigInt::from(2));
        assert_eq!(sq3.coeff(&[1, 0, 1]), BigInt::from(2));
        assert_eq!(sq3.coeff(&[0, 1, 1]), BigInt::from(2));
        assert_eq!(sq3.num_terms(), 3);
    }

    #[test]
    fn fo_factor_examples() {
        // k=2, n=(1,1), i=1: h1 + h2
        let f = fo_factor(0, &[1, 1]);
        assert_eq!(f, h(2, 0).add(&h(2, 1)).unwrap());
        // k=3, n=(1,1,1), i=2: h1 + h2 + h3
        let f = fo_factor(1, &[1, 1, 1]);
        let s3 = h(3, 0).add(&h(3, 1)).unwrap().add(&h(3, 2)).unwrap();
        assert_eq!(f, s3);
        // k=2, n=(2,2), i=1: h1^2 + h1 h2 + h2^2
        let f = fo_factor(0, &[2, 2]);
        assert_eq!(f.num_terms(), 3);
        assert_eq!(f.coeff(&[2, 0]), BigInt::from(1));
        assert_eq!(f.coeff(&[1, 1]), BigInt::from(1));
        assert_eq!(f.coeff(&[0, 2]), BigInt::from(1));
    }

    #[test]
    fn fo_factor_structure() {
        // every term has total degree n_i; the h_i exponent takes each of
        // the n_i + 1 values exactly once as a group
        for (i, ns) in [(0usize, vec![3usize, 2]), (1, vec![2, 3, 1]), (2, vec![1, 2, 4])] {
            let f = fo_factor(i, &ns);
            let mut seen = std::collections::BTreeSet::new();
            for (exp, _) in f.terms() {
                let total: u32 = exp.iter().sum();
                assert_eq!(total as usize, ns[i]);
                seen.insert(exp[i]);
            }
            assert_eq!(seen.len(), ns[i] + 1);
        }
    }

    /// Independent oracle: expand the full product with no truncation and
    /// read the target coefficient.
    fn ed_degree_naive(ns: &[usize]) -> BigUint {
        let k = ns.len();
        let no_caps = vec![u32::MAX; k];
        let mut acc = SparsePoly::one(k);
        for i in 0..k {
            acc = acc.mul_truncated(&fo_factor(i, ns), &no_caps).unwrap();
        }
        let target: Vec<u32> = ns.iter().map(|&n| n as u32).collect();
        acc.coeff(&target).to_biguint().unwrap()
    }

    #[test]
    fn ed_degree_frozen_values() {
        assert_eq!(ed_degree(&[1, 1]), BigUint::from(2u32));
        assert_eq!(ed_degree(&[1, 1, 1]), BigUint::from(6u32));
        assert_eq!(ed_degree(&[2, 2]), BigUint::from(3u32));
        // 2x2x4 and 2x2x2x5 solve targets
        assert_eq!(ed_degree(&[1, 1, 3]), BigUint::from(8u32));
        // known count for 3x3x3
        assert_eq!(ed_degree(&[2, 2, 2]), BigUint::from(37u32));
    }

    #[test]
    fn ed_degree_matches_untruncated_product() {
        for ns in [
            vec![1, 1],
            vec![2, 2],
            vec![3, 2],
            vec![1, 1, 1],
            vec![1, 1, 3],
            vec![2, 2, 2],
            vec![1, 1, 1, 1],
        ] {
            assert_eq!(ed_degree(&ns), ed_degree_naive(&ns), "ns={ns:?}");
        }
    }

    #[test]
    fn matrix_formats_min_plus_one() {
        for n1 in 1..=12usize {
            for n2 in n1..=12 {
                assert_eq!(
                    ed_degree(&[n1, n2]),
                    BigUint::from(n1.min(n2) as u32 + 1),
                    "({n1},{n2})"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ed_degree_permutation_invariant(ns in proptest::collection::vec(1usize..4, 2..4)) {
            let mut rev = ns.clone();
            rev.reverse();
            prop_assert_eq!(ed_degree(&ns), ed_degree(&rev));
        }
    }
}
