//! Tensor format bookkeeping: classification against the boundary,
//! dimension formulas for the critical space, and the domain/codomain
//! dimension inequality with its exhaustive exception scan.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::binom::{binom_big, binom_u128};
use crate::error::{Error, Result};

/// A tensor format `(n_1+1, ..., n_k+1)`, every entry at least 2.
///
/// Formats are stored as given but compared and reported in sorted
/// canonical form; the format of a tensor space is an unordered collection
/// of factor dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorFormat {
    dims: Vec<usize>,
}

/// Position of a format relative to the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatClass {
    SubBoundary,
    Boundary,
    BeyondBoundary,
}

impl TensorFormat {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidFormat(format!(
                "need at least 2 factors, got {}",
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidFormat(format!("factor dimension {d} < 2")));
        }
        Ok(TensorFormat { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Projective dimensions `n_i = dims[i] - 1`.
    pub fn ns(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d - 1).collect()
    }

    /// Number of tensor entries.
    pub fn volume(&self) -> usize {
        self.dims.iter().product()
    }

    /// Canonical form with dims sorted non-decreasing.
    pub fn canonical(&self) -> TensorFormat {
        let mut dims = self.dims.clone();
        dims.sort_unstable();
        TensorFormat { dims }
    }

    pub fn classify(&self) -> FormatClass {
        let ns = self.ns();
        let total: usize = ns.iter().sum();
        // n_i > sum of the others, i.e. 2 n_i > total
        if ns.iter().any(|&n| 2 * n > total) {
            FormatClass::BeyondBoundary
        } else if ns.iter().any(|&n| 2 * n == total) {
            FormatClass::Boundary
        } else {
            FormatClass::SubBoundary
        }
    }

    /// True when the last factor exceeds the boundary value by exactly one:
    /// `dims = (n_1+1, ..., n_k+1, n+2)` with `n = n_1 + ... + n_k`.
    pub fn is_beyond_by_one(&self) -> bool {
        if self.dims.len() < 3 {
            // a 2-factor format (m, m+1) is boundary, not beyond; require at
            // least two leading factors so that n >= 2 analysis applies
            return false;
        }
        let ns = self.ns();
        let (last, firsts) = ns.split_last().unwrap();
        *last == firsts.iter().sum::<usize>() + 1
    }
}

impl fmt::Display for TensorFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for TensorFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dims = s
            .split('x')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidFormat(format!("bad factor {part:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        TensorFormat::new(dims)
    }
}

/// The minimal format beyond the boundary: appends a factor of dimension
/// `n + 2` where `n` is the sum of the given projective dimensions.
pub fn beyond_by_one(first_ns: &[usize]) -> Result<TensorFormat> {
    if first_ns.len() < 2 {
        return Err(Error::InvalidFormat(
            "need at least 2 leading factors".into(),
        ));
    }
    if first_ns.contains(&0) {
        return Err(Error::InvalidFormat("each n_i must be at least 1".into()));
    }
    let n: usize = first_ns.iter().sum();
    let mut dims: Vec<usize> = first_ns.iter().map(|n| n + 1).collect();
    dims.push(n + 2);
    TensorFormat::new(dims)
}

/// Dimension of the critical space of a general tensor of this format.
///
/// With dims sorted non-decreasing and `N` the product of all but the last
/// factor, the dimension is `prod(n_i+1) - sum binom(n_i+1, 2)` when the
/// last factor is at most `N`, and `binom(N+1, 2) - sum_{i<k} binom(n_i+1, 2)`
/// when it is at least `N`. The two branches agree at equality, which is
/// asserted.
pub fn critical_dim_formula(format: &TensorFormat) -> usize {
    let canon = format.canonical();
    let dims = canon.dims();
    let k = dims.len();
    let last = dims[k - 1];
    let n_cap: usize = dims[..k - 1].iter().product();

    let first_branch = || -> i128 {
        let prod: i128 = dims.iter().map(|&d| d as i128).product();
        let sum: i128 = dims
            .iter()
            .map(|&d| binom_u128(d as i64, 2) as i128)
            .sum();
        prod - sum
    };
    let second_branch = || -> i128 {
        let head: i128 = binom_u128(n_cap as i64 + 1, 2) as i128;
        let sum: i128 = dims[..k - 1]
            .iter()
            .map(|&d| binom_u128(d as i64, 2) as i128)
            .sum();
        head - sum
    };

    let value = if last < n_cap {
        first_branch()
    } else if last > n_cap {
        second_branch()
    } else {
        let a = first_branch();
        let b = second_branch();
        assert_eq!(a, b, "formula branches disagree at the boundary for {format}");
        a
    };
    usize::try_from(value).expect("critical space dimension is nonnegative")
}

/// One row of the domain/codomain dimension comparison for a tuple of
/// leading projective dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityRecord {
    /// `prod_j binom(n-1, n_j)`, the domain dimension.
    pub lhs: BigUint,
    /// `(n+2) * prod_j binom(n-2, n_j)`, the codomain dimension.
    pub rhs: BigUint,
    pub holds: bool,
}

/// Compares `prod binom(n-1, n_j)` with `(n+2) prod binom(n-2, n_j)` where
/// `n` is the sum of the entries. `holds` means lhs <= rhs, i.e. the
/// dimension count alone does not force a kernel.
pub fn dimension_inequality(first_ns: &[usize]) -> InequalityRecord {
    let n: i64 = first_ns.iter().map(|&x| x as i64).sum();
    let lhs: BigUint = first_ns
        .iter()
        .map(|&nj| binom_big(n - 1, nj as i64))
        .product();
    let rhs: BigUint = first_ns
        .iter()
        .map(|&nj| binom_big(n - 2, nj as i64))
        .product::<BigUint>()
        * BigUint::from((n + 2) as u64);
    let holds = lhs <= rhs;
    InequalityRecord { lhs, rhs, holds }
}

/// Exhaustive scan over unordered tuples `1 <= n_1 <= ... <= n_k <= bound`,
/// returning those where the inequality fails.
pub fn exception_scan(k: usize, bound: usize) -> Vec<Vec<usize>> {
    assert!(k >= 2 && bound >= 1);
    let mut out = Vec::new();
    let mut tuple = vec![1usize; k];
    loop {
        if !dimension_inequality(&tuple).holds {
            out.push(tuple.clone());
        }
        // next non-decreasing tuple
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if tuple[i] < bound {
                tuple[i] += 1;
                let v = tuple[i];
                for t in tuple.iter_mut().skip(i + 1) {
                    *t = v;
                }
                break;
            }
        }
    }
}
