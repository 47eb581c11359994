//! Exact dense linear algebra over a prime field or the rationals.
//!
//! The prime field keeps every element below 2^31 so that products fit in
//! a `u64`; reduction is Barrett-style with a precomputed reciprocal. The
//! rational mode exists as a certification path for small formats.
//!
//! Rank over `F_p` of an integer matrix can only undercount the rational
//! rank, so generic-rank claims are only accepted when two primes and two
//! seeds agree; see [`crate::critical::generic_rank`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::format::TensorFormat;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default field modulus: the Mersenne prime 2^31 - 1.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;
/// Second modulus for cross-prime agreement, 2^31 - 19.
pub const ALT_PRIME: u64 = 2_147_483_629;

/// A field with clonable elements, passed around as a context object.
pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Embeds an integer; the receiver carries the modulus.
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, x: i64) -> Self::Elem;
}

/// `F_p` for a prime `p < 2^31`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeField {
    p: u64,
    // floor(2^64 / p), for Barrett reduction of products below 2^62
    mu: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..1 << 31).contains(&p) {
            return Err(Error::InvalidFormat(format!(
                "modulus {p} out of range (need 2 <= p < 2^31)"
            )));
        }
        if !is_prime(p) {
            return Err(Error::InvalidFormat(format!("modulus {p} is not prime")));
        }
        Ok(PrimeField {
            p,
            mu: ((1u128 << 64) / p as u128) as u64,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce(&self, x: u64) -> u64 {
        // one Barrett step leaves the remainder within a few multiples of p
        let q = ((x as u128 * self.mu as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.reduce(acc * base);
            }
            base = self.reduce(base * base);
            exp >>= 1;
        }
        acc
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.reduce(a * b)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }
    fn from_i64(&self, x: i64) -> u64 {
        let m = x.rem_euclid(self.p as i64);
        m as u64
    }
}

/// The rational numbers.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn from_i64(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }
}

/// Dense matrix over a [`Field`], row major.
#[derive(Clone, Debug)]
pub struct ExactMatrix<F: Field> {
    pub field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> ExactMatrix<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        let data = vec![field.zero(); rows * cols];
        ExactMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            let one = m.field.one();
            m.set(i, i, one);
        }
        m
    }

    pub fn from_rows(field: F, rows: Vec<Vec<F::Elem>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        ExactMatrix {
            field,
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_fn(field: F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.field.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.field.clone(), self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    acc = f.add(&acc, &f.mul(self.get(i, j), &v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let f = self.field.clone();
        let mut out = Self::zeros(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l).clone();
                if f.is_zero(&a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), &f.mul(&a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Exact rank by Gaussian elimination on a private copy.
    pub fn rank(&self) -> usize {
        #[cfg(feature = "parallel")]
        {
            self.rank_par()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.rank_seq()
        }
    }

    /// Sequential elimination.
    pub fn rank_seq(&self) -> usize {
        let mut m = self.clone();
        m.forward_eliminate(false)
    }

    /// Elimination with the row updates below the pivot done in parallel.
    /// Same pivot choices as the sequential path, so the result is
    /// identical.
    #[cfg(feature = "parallel")]
    pub fn rank_par(&self) -> usize {
        let mut m = self.clone();
        m.forward_eliminate(true)
    }

    fn forward_eliminate(&mut self, parallel: bool) -> usize {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0usize;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            // smallest-index pivot keeps the elimination deterministic
            let Some(pivot) = (rank..rows).find(|&i| !f.is_zero(self.get(i, col))) else {
                continue;
            };
            self.data.swap_chunks(rank, pivot, cols);
            let inv = f.inv(self.get(rank, col));
            for j in col..cols {
                let v = f.mul(self.get(rank, j), &inv);
                self.set(rank, j, v);
            }
            let (done, rest) = self.data.split_at_mut((rank + 1) * cols);
            let piv = &done[rank * cols..];
            let eliminate = |row: &mut [F::Elem]| {
                let factor = row[col].clone();
                if f.is_zero(&factor) {
                    return;
                }
                row[col] = f.zero();
                for j in col + 1..cols {
                    row[j] = f.sub(&row[j], &f.mul(&factor, &piv[j]));
                }
            };
            #[cfg(feature = "parallel")]
            if parallel {
                rest.par_chunks_mut(cols).for_each(eliminate);
            } else {
                rest.chunks_mut(cols).for_each(eliminate);
            }
            #[cfg(not(feature = "parallel"))]
            {
                let _ = parallel;
                rest.chunks_mut(cols).for_each(eliminate);
            }
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&i| !f.is_zero(self.get(i, col))) else {
                continue;
            };
            self.data.swap_chunks(rank, pivot, cols);
            let inv = f.inv(self.get(rank, col));
            for j in col..cols {
                let v = f.mul(self.get(rank, j), &inv);
                self.set(rank, j, v);
            }
            for i in 0..rows {
                if i == rank {
                    continue;
                }
                let factor = self.get(i, col).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for j in col..cols {
                    let v = f.sub(self.get(i, j), &f.mul(&factor, self.get(rank, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }

    /// Basis of the right kernel; `M v = 0` exactly for every returned `v`,
    /// and the basis has `cols - rank` vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = self.field.clone();
        let mut m = self.clone();
        let pivots = m.rref();
        let piv_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if piv_set.contains(&free) {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                if pc < free {
                    v[pc] = f.neg(m.get(r, free));
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Kernel dimension, `cols - rank`.
    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize);
}

impl<T> SwapChunks for Vec<T> {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.split_at_mut(hi * width);
        head[lo * width..(lo + 1) * width].swap_with_slice(&mut tail[..width]);
    }
}

/// Deterministic uniform tensor entries in `F_p`, i.i.d. given the seed.
pub fn random_mod_p(format: &TensorFormat, seed: u64, p: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..format.volume()).map(|_| rng.gen_range(0..p)).collect()
}

/// Deterministic uniform integer entries in `[-bound, bound]`.
pub fn random_int(format: &TensorFormat, seed: u64, bound: i64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..format.volume())
        .map(|_| rng.gen_range(-bound..=bound))
        .collect()
}

/// Exact rank of an integer matrix over the rationals.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let f = Rationals;
    let m = ExactMatrix::from_rows(
        f.clone(),
        rows.iter()
            .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
            .collect(),
    );
    m.rank_seq()
}

/// Exact rational from a float; every finite `f64` is a dyadic rational.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn fp() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    fn random_matrix(f: &PrimeField, rows: usize, cols: usize, seed: u64) -> ExactMatrix<PrimeField> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ExactMatrix::from_fn(f.clone(), rows, cols, |_, _| rng.gen_range(0..f.modulus()))
    }

    #[test]
    fn prime_field_construction() {
        assert!(PrimeField::new(DEFAULT_PRIME).is_ok());
        assert!(PrimeField::new(ALT_PRIME).is_ok());
        assert!(PrimeField::new(2_147_483_646).is_err());
        assert!(PrimeField::new(1 << 31).is_err());
        assert!(PrimeField::new(0).is_err());
    }

    #[test]
    fn rank_examples() {
        let f = fp();
        assert_eq!(ExactMatrix::identity(f.clone(), 5).rank(), 5);
        assert_eq!(ExactMatrix::zeros(f.clone(), 3, 7).rank(), 0);
        let m = ExactMatrix::from_rows(f.clone(), vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let f = fp();
        assert!(ExactMatrix::identity(f.clone(), 4).kernel_basis().is_empty());
        assert_eq!(ExactMatrix::zeros(f.clone(), 2, 3).kernel_basis().len(), 3);
        let m = ExactMatrix::from_rows(f.clone(), vec![vec![1, 1, 0]]);
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(m.mul_vec(v).iter().all(|x| *x == 0));
        }
    }

    #[test]
    fn rank_equals_transpose_rank_at_200() {
        let f = fp();
        // rectangular with forced rank deficiency: product of 200x60 and 60x200
        let a = random_matrix(&f, 200, 60, 7);
        let b = random_matrix(&f, 60, 200, 8);
        let m = a.matmul(&b);
        let r = m.rank();
        assert_eq!(r, 60);
        assert_eq!(m.transpose().rank(), r);
    }

    #[test]
    fn random_tensor_determinism() {
        let fmt = TensorFormat::new(vec![2, 2, 2]).unwrap();
        let a = random_mod_p(&fmt, 42, DEFAULT_PRIME);
        let b = random_mod_p(&fmt, 42, DEFAULT_PRIME);
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        let c = random_mod_p(&fmt, 43, DEFAULT_PRIME);
        assert_ne!(a, c);
        let d = random_int(&fmt, 42, 100);
        assert_eq!(d.len(), 8);
        assert_eq!(d, random_int(&fmt, 42, 100));
    }

    #[test]
    fn modular_rank_bounded_by_rational_rank() {
        for seed in 0..4u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<i64>> = (0..6)
                .map(|_| (0..5).map(|_| rng.gen_range(-30..=30)).collect())
                .collect();
            let rr = rational_rank(&rows);
            for p in [DEFAULT_PRIME, ALT_PRIME, 101] {
                let f = PrimeField::new(p).unwrap();
                let m = ExactMatrix::from_rows(
                    f.clone(),
                    rows.iter()
                        .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
                        .collect(),
                );
                assert!(m.rank() <= rr);
            }
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_rank_matches_sequential() {
        let f = fp();
        for seed in 0..3 {
            let a = random_matrix(&f, 50, 23, seed);
            let b = random_matrix(&f, 23, 41, seed + 100);
            let m = a.matmul(&b);
            assert_eq!(m.rank_seq(), m.rank_par());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn barrett_mul_matches_u128(a in 0u64..DEFAULT_PRIME, b in 0u64..DEFAULT_PRIME) {
            for p in [DEFAULT_PRIME, ALT_PRIME] {
                let f = PrimeField::new(p).unwrap();
                let (ar, br) = (a % p, b % p);
                prop_assert_eq!(f.mul(&ar, &br), ((ar as u128 * br as u128) % p as u128) as u64);
            }
        }

        #[test]
        fn inverse_is_inverse(a in 1u64..DEFAULT_PRIME) {
            let f = fp();
            prop_assert_eq!(f.mul(&a, &f.inv(&a)), 1);
        }

        #[test]
        fn kernel_vectors_annihilated(seed in 0u64..500, rows in 1usize..8, cols in 1usize..8) {
            let f = fp();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // low rank on purpose so kernels are nonempty
            let m = ExactMatrix::from_fn(f.clone(), rows, cols, |_, _| rng.gen_range(0..5));
            let basis = m.kernel_basis();
            prop_assert_eq!(basis.len(), cols - m.rank());
            for v in &basis {
                prop_assert!(m.mul_vec(v).iter().all(|x| *x == 0));
            }
        }

        #[test]
        fn rank_transpose_agreement(seed in 0u64..200) {
            let f = fp();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = rng.gen_range(1..7usize);
            let c = rng.gen_range(1..7usize);
            let m = ExactMatrix::from_fn(f.clone(), r, c, |_, _| rng.gen_range(0..4));
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
