//! The critical space of a tensor and the contraction map on polynomial
//! coefficients whose kernel gives the codimension of the span of singular
//! vector tuples inside the critical space.
//!
//! Everything here is exact linear algebra over a [`Field`]. Genericity
//! claims are made only through the two-primes, two-seeds protocol in
//! [`generic_rank`].

pub mod koszul;

use std::collections::HashMap;

use crate::binom::binom_u128;
use crate::error::{Error, Result};
use crate::exact::{random_mod_p, ExactMatrix, Field, PrimeField, ALT_PRIME, DEFAULT_PRIME};
use crate::format::TensorFormat;
use crate::tensor::{multi_indices, DenseTensor};

/// Monomials of a fixed degree in a fixed set of variables, ordered
/// lexicographically by descending exponent vector. The ordering is
/// deterministic and shared by matrix rows and columns.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    nvars: usize,
    degree: usize,
    exps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: usize) -> Self {
        assert!(nvars >= 1);
        let mut exps = Vec::new();
        let mut current = vec![0u32; nvars];
        fill(&mut exps, &mut current, 0, degree as u32);
        let index = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        MonomialBasis {
            nvars,
            degree,
            exps,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn exponents(&self, i: usize) -> &[u32] {
        &self.exps[i]
    }

    pub fn position(&self, exp: &[u32]) -> usize {
        self.index[exp]
    }
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, var: usize, remaining: u32) {
    if var + 1 == current.len() {
        current[var] = remaining;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        fill(out, current, var + 1, remaining - e);
    }
}

/// The linear system cutting out the critical space of `T`.
///
/// One row per factor `l` and coordinate pair `p < q` over all `d_l`
/// coordinates; columns are the tensor coordinates `z` in the documented
/// linearization. The row states that the contraction of `T` and `z` along
/// the other factors is symmetric in `(p, q)`. The kernel is the critical
/// space; the flattened tensor itself always lies in it.
pub fn critical_equations<F: Field>(f: &F, tensor: &DenseTensor<F::Elem>) -> ExactMatrix<F> {
    let dims = tensor.format().dims().to_vec();
    let volume = tensor.format().volume();
    let total_rows: usize = dims.iter().map(|&d| d * (d - 1) / 2).sum();
    let mut m = ExactMatrix::zeros(f.clone(), total_rows, volume);

    let strides = strides_of(&dims);
    let mut row = 0usize;
    for (l, &d) in dims.iter().enumerate() {
        let rest_dims: Vec<usize> = dims
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != l)
            .map(|(_, &x)| x)
            .collect();
        for p in 0..d {
            for q in (p + 1)..d {
                for rest in multi_indices(&rest_dims) {
                    let mut base = 0usize;
                    let mut pos = 0usize;
                    for (j, &s) in strides.iter().enumerate() {
                        if j == l {
                            continue;
                        }
                        base += rest[pos] * s;
                        pos += 1;
                    }
                    let ip = base + p * strides[l];
                    let iq = base + q * strides[l];
                    // t_{..p..} z_{..q..} - t_{..q..} z_{..p..}
                    m.set(row, iq, tensor.entries()[ip].clone());
                    m.set(row, ip, f.neg(&tensor.entries()[iq]));
                }
                row += 1;
            }
        }
    }
    m
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let k = dims.len();
    let mut strides = vec![1usize; k];
    for j in (0..k - 1).rev() {
        strides[j] = strides[j + 1] * dims[j + 1];
    }
    strides
}

/// Dimension of the critical space of `T`: columns minus the rank of the
/// equation system.
pub fn critical_dim<F: Field>(f: &F, tensor: &DenseTensor<F::Elem>) -> usize {
    critical_equations(f, tensor).kernel_dim()
}

/// Same value as [`critical_dim`], computed without materializing the full
/// equation system.
///
/// The equations of the largest factor say that the Gram pairing of the
/// matricizations of `T` and `z` along that factor is symmetric. The
/// solution set of that block alone is the preimage of the symmetric
/// square of the column space of the matricization, for which an explicit
/// sparse basis can be written down from one small elimination. The
/// remaining factors' equations are then restricted to that basis and
/// eliminated densely. No genericity is used anywhere; the unit tests
/// check agreement with the direct route.
pub fn critical_dim_structured<F: Field>(f: &F, tensor: &DenseTensor<F::Elem>) -> usize {
    let dims = tensor.format().dims().to_vec();
    let k = dims.len();
    let volume = tensor.format().volume();
    let strides = strides_of(&dims);

    let star = (0..k).max_by_key(|&l| dims[l]).unwrap();
    let d_star = dims[star];
    let rest_dims: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != star)
        .map(|(_, &x)| x)
        .collect();
    let rest_vol: usize = rest_dims.iter().product();

    // base offsets of the rest indices, so that tensor index = base + p*stride
    let rest_bases: Vec<usize> = multi_indices(&rest_dims)
        .map(|rest| {
            let mut base = 0usize;
            let mut pos = 0usize;
            for (j, &s) in strides.iter().enumerate() {
                if j != star {
                    base += rest[pos] * s;
                    pos += 1;
                }
            }
            base
        })
        .collect();

    // flattening A: d_star x rest_vol
    let a = ExactMatrix::from_fn(f.clone(), d_star, rest_vol, |p, j| {
        tensor.entries()[rest_bases[j] + p * strides[star]].clone()
    });
    let mut a_rref = a.clone();
    let pivots = a_rref.rref();
    let rho = pivots.len();
    let kernel = a.kernel_basis(); // rest_vol - rho vectors in F^{rest_vol}

    // pivot columns of A form a basis of its column space
    let u_basis: Vec<Vec<F::Elem>> = pivots
        .iter()
        .map(|&j| (0..d_star).map(|p| a.get(p, j).clone()).collect())
        .collect();

    // sparse spanning set of the solution space of the star block:
    // (a) any kernel vector of A placed in any single slice,
    // (b) lifts of the symmetric square of the column space, supported on
    //     two rest-indices.
    let mut phi: Vec<Vec<(usize, F::Elem)>> = Vec::new();
    for q in 0..d_star {
        for kv in &kernel {
            let col: Vec<(usize, F::Elem)> = kv
                .iter()
                .enumerate()
                .filter(|(_, v)| !f.is_zero(v))
                .map(|(j, v)| (rest_bases[j] + q * strides[star], v.clone()))
                .collect();
            phi.push(col);
        }
    }
    for a_idx in 0..rho {
        for b_idx in a_idx..rho {
            let mut col = Vec::new();
            if a_idx == b_idx {
                for q in 0..d_star {
                    let v = &u_basis[a_idx][q];
                    if !f.is_zero(v) {
                        col.push((rest_bases[pivots[a_idx]] + q * strides[star], v.clone()));
                    }
                }
            } else {
                for q in 0..d_star {
                    let v = &u_basis[b_idx][q];
                    if !f.is_zero(v) {
                        col.push((rest_bases[pivots[a_idx]] + q * strides[star], v.clone()));
                    }
                    let w = &u_basis[a_idx][q];
                    if !f.is_zero(w) {
                        col.push((rest_bases[pivots[b_idx]] + q * strides[star], w.clone()));
                    }
                }
            }
            phi.push(col);
        }
    }
    let m1 = phi.len();
    debug_assert_eq!(
        m1,
        d_star * (rest_vol - rho) + rho * (rho + 1) / 2
    );
    debug_assert!(m1 <= volume);

    // remaining factors' equations restricted to the phi columns
    let mut row_offset: HashMap<usize, usize> = HashMap::new();
    let mut rows_b = 0usize;
    for (l, &d) in dims.iter().enumerate() {
        if l == star {
            continue;
        }
        row_offset.insert(l, rows_b);
        rows_b += d * (d - 1) / 2;
    }
    let mut b = ExactMatrix::zeros(f.clone(), rows_b, m1);
    let mut index_buf = vec![0usize; k];
    for (c, col) in phi.iter().enumerate() {
        for (flat, val) in col {
            // decode the multi-index once per nonzero
            let mut rem = *flat;
            for (j, &s) in strides.iter().enumerate() {
                index_buf[j] = rem / s;
                rem %= s;
            }
            for (l, &d) in dims.iter().enumerate() {
                if l == star {
                    continue;
                }
                let il = index_buf[l];
                let base_row = row_offset[&l];
                for other in 0..d {
                    if other == il {
                        continue;
                    }
                    let (p, q) = (other.min(il), other.max(il));
                    let row = base_row + pair_rank(p, q, d);
                    let t_flat =
                        (*flat as i64 + (other as i64 - il as i64) * strides[l] as i64) as usize;
                    let term = f.mul(&tensor.entries()[t_flat], val);
                    let cur = b.get(row, c).clone();
                    let new = if other < il {
                        f.add(&cur, &term)
                    } else {
                        f.sub(&cur, &term)
                    };
                    b.set(row, c, new);
                }
            }
        }
    }

    m1 - b.rank()
}

/// Row index of the pair `(p, q)` with `p < q` among all pairs of `d`
/// coordinates in lexicographic order.
fn pair_rank(p: usize, q: usize, d: usize) -> usize {
    // pairs (0,1..d-1), (1,2..d-1), ...
    p * d - p * (p + 1) / 2 + (q - p - 1)
}

/// Domain and codomain dimensions of the contraction map for a
/// beyond-by-one format: `prod_j binom(n-1, n_j)` and
/// `(n+2) prod_j binom(n-2, n_j)`.
pub fn alpha_dims(format: &TensorFormat) -> Result<(u128, u128)> {
    if !format.is_beyond_by_one() {
        return Err(Error::NotBeyondByOne(format.to_string()));
    }
    let ns = format.ns();
    let (_, firsts) = ns.split_last().unwrap();
    let n: i64 = firsts.iter().map(|&x| x as i64).sum();
    let domain: u128 = firsts
        .iter()
        .map(|&nj| binom_u128(n - 1, nj as i64))
        .product();
    let codomain: u128 = firsts
        .iter()
        .map(|&nj| binom_u128(n - 2, nj as i64))
        .product::<u128>()
        * (n + 2) as u128;
    Ok((domain, codomain))
}

/// The contraction map on coefficient spaces for a tensor of beyond-by-one
/// format `(n_1+1, ..., n_k+1, n+2)`.
///
/// Columns are indexed by tuples of degree `n - n_j - 1` monomials, one per
/// leading factor; rows by tuples of degree `n - n_j - 2` monomials times a
/// basis vector of the last factor. The column for `(m_1, ..., m_k)` has,
/// for every multi-index `(i_1, ..., i_k)` and last-factor coordinate `c`,
/// the entry `prod_j exp(x_{i_j} in m_j) * T[i_1, ..., i_k, c]` in the row
/// `(m_1/x_{i_1}, ..., m_k/x_{i_k}, c)`.
///
/// When some degree `n - n_j - 2` is negative the codomain is the zero
/// space and the matrix has no rows, so the kernel is the whole domain.
pub fn alpha_matrix<F: Field>(f: &F, tensor: &DenseTensor<F::Elem>) -> Result<ExactMatrix<F>> {
    let format = tensor.format();
    if !format.is_beyond_by_one() {
        return Err(Error::NotBeyondByOne(format.to_string()));
    }
    let dims = format.dims();
    let k = dims.len() - 1;
    let ns: Vec<usize> = dims[..k].iter().map(|&d| d - 1).collect();
    let n: usize = ns.iter().sum();
    let last = dims[k];
    debug_assert_eq!(last, n + 2);

    let dom: Vec<MonomialBasis> = (0..k)
        .map(|j| MonomialBasis::new(ns[j] + 1, n - ns[j] - 1))
        .collect();
    let cols: usize = dom.iter().map(|b| b.len()).product();

    if ns.iter().any(|&nj| (n as i64) - (nj as i64) - 2 < 0) {
        return Ok(ExactMatrix::zeros(f.clone(), 0, cols));
    }

    let cod: Vec<MonomialBasis> = (0..k)
        .map(|j| MonomialBasis::new(ns[j] + 1, n - ns[j] - 2))
        .collect();
    let cod_sizes: Vec<usize> = cod.iter().map(|b| b.len()).collect();
    let rows: usize = cod_sizes.iter().product::<usize>() * last;

    let mut m = ExactMatrix::zeros(f.clone(), rows, cols);
    let dom_sizes: Vec<usize> = dom.iter().map(|b| b.len()).collect();

    // iterate columns as tuples of monomial indices
    for col_tuple in multi_indices(&dom_sizes) {
        let col = linearize(&col_tuple, &dom_sizes);
        let exps: Vec<&[u32]> = (0..k).map(|j| dom[j].exponents(col_tuple[j])).collect();

        // all differentiable multi-indices: coordinates with positive exponent
        let supports: Vec<Vec<usize>> = exps
            .iter()
            .map(|e| {
                e.iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let support_sizes: Vec<usize> = supports.iter().map(|s| s.len()).collect();
        if support_sizes.contains(&0) {
            continue;
        }
        for choice in multi_indices(&support_sizes) {
            let idx: Vec<usize> = (0..k).map(|j| supports[j][choice[j]]).collect();
            // derivative coefficient: product of the old exponents
            let mut coeff = f.one();
            for j in 0..k {
                coeff = f.mul(&coeff, &f.from_i64(exps[j][idx[j]] as i64));
            }
            // reduced monomial tuple indexes the row block
            let mut row_block = 0usize;
            for j in 0..k {
                let mut reduced = exps[j].to_vec();
                reduced[idx[j]] -= 1;
                row_block = row_block * cod_sizes[j] + cod[j].position(&reduced);
            }
            for c in 0..last {
                let mut t_index = idx.clone();
                t_index.push(c);
                let entry = tensor.get(&t_index);
                let row = row_block * last + c;
                let add = f.mul(&coeff, entry);
                let new = f.add(m.get(row, col), &add);
                m.set(row, col, new);
            }
        }
    }
    Ok(m)
}

fn linearize(tuple: &[usize], sizes: &[usize]) -> usize {
    tuple
        .iter()
        .zip(sizes)
        .fold(0usize, |acc, (&t, &s)| acc * s + t)
}

/// Kernel dimension of the contraction map, reported as the codimension of
/// the span of singular vector tuples inside the projectivized critical
/// space of a generic tensor. For three factors with a 2 in the first slot
/// the map is identically zero and the identification of the kernel with
/// the codimension comes from a separate argument, not from this
/// construction.
pub fn span_codim_via_alpha<F: Field>(f: &F, tensor: &DenseTensor<F::Elem>) -> Result<usize> {
    Ok(alpha_matrix(f, tensor)?.kernel_dim())
}

/// Parameters of the generic-rank protocol: a claimed generic value is
/// accepted only when two primes and two seeds agree.
#[derive(Clone, Copy, Debug)]
pub struct Protocol {
    pub primes: [u64; 2],
    pub seeds: [u64; 2],
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            primes: [DEFAULT_PRIME, ALT_PRIME],
            seeds: [1, 2],
        }
    }
}

impl Protocol {
    pub fn with_seed(seed: u64) -> Self {
        Protocol {
            primes: [DEFAULT_PRIME, ALT_PRIME],
            seeds: [seed, seed.wrapping_add(1)],
        }
    }
}

/// Runs `compute` on a random tensor for every (prime, seed) pair and
/// returns the common value, or an error listing the disagreeing values.
/// Rank over a prime field can only undercount the characteristic-zero
/// rank, so agreement across primes and seeds is the acceptance bar.
pub fn generic_rank<G>(format: &TensorFormat, protocol: &Protocol, compute: G) -> Result<usize>
where
    G: Fn(&PrimeField, &DenseTensor<u64>) -> Result<usize>,
{
    let mut values = Vec::with_capacity(4);
    for &p in &protocol.primes {
        let field = PrimeField::new(p)?;
        for &seed in &protocol.seeds {
            let entries = random_mod_p(format, seed, p);
            let tensor = DenseTensor::new(format.clone(), entries)?;
            values.push(compute(&field, &tensor)?);
        }
    }
    if values.windows(2).all(|w| w[0] == w[1]) {
        Ok(values[0])
    } else {
        Err(Error::RankDisagreement(values))
    }
}

/// Critical space dimension of a random tensor under the protocol.
pub fn generic_critical_dim(format: &TensorFormat, protocol: &Protocol) -> Result<usize> {
    generic_rank(format, protocol, |f, t| Ok(critical_dim_structured(f, t)))
}

/// Kernel dimension of the contraction map of a random tensor under the
/// protocol.
pub fn generic_alpha_kernel(format: &TensorFormat, protocol: &Protocol) -> Result<usize> {
    generic_rank(format, protocol, span_codim_via_alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rationals;
    use crate::format::{beyond_by_one, critical_dim_formula};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    fn random_tensor(fmt: &TensorFormat, seed: u64) -> DenseTensor<u64> {
        let entries = random_mod_p(fmt, seed, DEFAULT_PRIME);
        DenseTensor::new(fmt.clone(), entries).unwrap()
    }

    #[test]
    fn monomial_basis_sizes_and_order() {
        let b = MonomialBasis::new(3, 2);
        assert_eq!(b.len(), 6);
        assert_eq!(b.exponents(0), &[2, 0, 0]);
        assert_eq!(b.exponents(1), &[1, 1, 0]);
        assert_eq!(b.exponents(5), &[0, 0, 2]);
        for i in 0..b.len() {
            assert_eq!(b.position(b.exponents(i)), i);
        }
        assert_eq!(MonomialBasis::new(4, 0).len(), 1);
    }

    #[test]
    fn flattened_tensor_lies_in_kernel() {
        for (fmt, seed) in [
            (TensorFormat::new(vec![2, 2, 2]).unwrap(), 5),
            (TensorFormat::new(vec![3, 4]).unwrap(), 6),
            (TensorFormat::new(vec![2, 3, 2, 2]).unwrap(), 7),
        ] {
            let f = fp();
            let t = random_tensor(&fmt, seed);
            let m = critical_equations(&f, &t);
            let image = m.mul_vec(t.entries());
            assert!(image.iter().all(|x| *x == 0), "{fmt}");
        }
    }

    #[test]
    fn diagonal_matrix_kernel_is_diagonal() {
        let f = fp();
        let fmt = TensorFormat::new(vec![3, 3]).unwrap();
        let entries: Vec<u64> = vec![1, 0, 0, 0, 2, 0, 0, 0, 3];
        let t = DenseTensor::new(fmt, entries).unwrap();
        let m = critical_equations(&f, &t);
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 3);
        // every kernel vector is supported on the diagonal positions 0, 4, 8
        for v in &basis {
            for (i, x) in v.iter().enumerate() {
                if i % 4 != 0 {
                    assert_eq!(*x, 0);
                }
            }
        }
    }

    #[test]
    fn critical_dim_matches_formula_small() {
        for (dims, expected) in [
            (vec![2usize, 2, 2], 5usize),
            (vec![2, 2, 4], 8),
            (vec![3, 3], 3),
            (vec![5, 5], 5),
            (vec![3, 3, 6], 33),
        ] {
            let fmt = TensorFormat::new(dims).unwrap();
            assert_eq!(critical_dim_formula(&fmt), expected);
            let got = generic_critical_dim(&fmt, &Protocol::default()).unwrap();
            assert_eq!(got, expected, "{fmt}");
        }
    }

    #[test]
    fn structured_dim_agrees_with_direct_elimination() {
        let f = fp();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut formats: Vec<Vec<usize>> = vec![
            vec![3, 3],
            vec![2, 5],
            vec![7, 2],
            vec![2, 2, 2],
            vec![2, 3, 4],
            vec![4, 3, 2],
            vec![2, 2, 2, 3],
            vec![2, 2, 9],
        ];
        for _ in 0..6 {
            let k = rng.gen_range(2..=4usize);
            formats.push((0..k).map(|_| rng.gen_range(2..=5usize)).collect());
        }
        for dims in formats {
            let fmt = TensorFormat::new(dims).unwrap();
            let t = random_tensor(&fmt, rng.gen());
            assert_eq!(
                critical_dim_structured(&f, &t),
                critical_dim(&f, &t),
                "{fmt}"
            );
        }
        // also on degenerate tensors, where no genericity holds
        let fmt = TensorFormat::new(vec![3, 3]).unwrap();
        let t = DenseTensor::new(fmt, vec![1u64, 0, 0, 0, 2, 0, 0, 0, 3]).unwrap();
        assert_eq!(critical_dim_structured(&f, &t), critical_dim(&f, &t));
        let fmt = TensorFormat::new(vec![2, 2, 2]).unwrap();
        let t = DenseTensor::new(fmt, vec![0u64; 8]).unwrap();
        assert_eq!(critical_dim_structured(&f, &t), 8);
    }

    #[test]
    fn alpha_shapes_and_defective_family() {
        let f = fp();
        for n in 2..=8usize {
            let fmt = TensorFormat::new(vec![2, n, n + 2]).unwrap();
            let t = random_tensor(&fmt, 11);
            let m = alpha_matrix(&f, &t).unwrap();
            assert_eq!(m.nrows(), 0);
            assert_eq!(m.ncols(), n - 1);
            assert_eq!(span_codim_via_alpha(&f, &t).unwrap(), n - 1);
        }
    }

    #[test]
    fn alpha_dims_match_matrix() {
        let f = fp();
        for firsts in [vec![2usize, 2], vec![2, 3], vec![1, 1, 1], vec![1, 2, 2]] {
            let fmt = beyond_by_one(&firsts).unwrap();
            let t = random_tensor(&fmt, 3);
            let m = alpha_matrix(&f, &t).unwrap();
            let (dom, cod) = alpha_dims(&fmt).unwrap();
            assert_eq!(m.ncols() as u128, dom, "{fmt}");
            assert_eq!(m.nrows() as u128, cod, "{fmt}");
        }
    }

    #[test]
    fn alpha_rejects_other_formats() {
        let f = fp();
        for dims in [vec![2usize, 2, 3], vec![2, 2, 5], vec![3, 3]] {
            let fmt = TensorFormat::new(dims).unwrap();
            let t = random_tensor(&fmt, 1);
            assert!(matches!(
                alpha_matrix(&f, &t),
                Err(Error::NotBeyondByOne(_))
            ));
        }
    }

    #[test]
    fn alpha_kernels_for_named_formats() {
        // (3,3,6): 6x9 of rank 6; (2,2,2,5): 5x8 of rank 5
        let fmt = beyond_by_one(&[2, 2]).unwrap();
        let f = fp();
        let t = random_tensor(&fmt, 21);
        let m = alpha_matrix(&f, &t).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (6, 9));
        assert_eq!(m.rank(), 6);
        assert_eq!(
            generic_alpha_kernel(&fmt, &Protocol::default()).unwrap(),
            3
        );

        let fmt = beyond_by_one(&[1, 1, 1]).unwrap();
        let t = random_tensor(&fmt, 22);
        let m = alpha_matrix(&f, &t).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (5, 8));
        assert_eq!(
            generic_alpha_kernel(&fmt, &Protocol::default()).unwrap(),
            3
        );
    }

    #[test]
    fn span_codim_examples() {
        let p = Protocol::default();
        // defective family member with n = 6
        let fmt = TensorFormat::new(vec![2, 6, 8]).unwrap();
        assert_eq!(generic_alpha_kernel(&fmt, &p).unwrap(), 5);
        // (3,4,7): domain 24, codomain 21, full rank
        let fmt = beyond_by_one(&[2, 3]).unwrap();
        assert_eq!(generic_alpha_kernel(&fmt, &p).unwrap(), 3);
        // (4,4,8): injective
        let fmt = beyond_by_one(&[3, 3]).unwrap();
        assert_eq!(generic_alpha_kernel(&fmt, &p).unwrap(), 0);
    }

    #[test]
    fn alpha_dims_match_cohomology() {
        use crate::bbw::h_e;
        for firsts in [vec![2usize, 2], vec![2, 3], vec![1, 1, 1], vec![1, 1, 2], vec![1, 1, 1, 1]] {
            let fmt = beyond_by_one(&firsts).unwrap();
            let n: usize = firsts.iter().sum();
            let (dom, cod) = alpha_dims(&fmt).unwrap();
            assert_eq!(h_e(&fmt, n as i64 + 1, n as i64), dom, "{fmt} domain");
            assert_eq!(h_e(&fmt, n as i64, n as i64), cod, "{fmt} codomain");
        }
    }

    #[test]
    fn rational_route_agrees_on_tiny_format() {
        // certification path: exact rationals on integer entries
        let fmt = beyond_by_one(&[2, 2]).unwrap();
        let ints = crate::exact::random_int(&fmt, 14, 50);
        let q = Rationals;
        let tq = DenseTensor::new(
            fmt.clone(),
            ints.iter().map(|&x| q.from_i64(x)).collect(),
        )
        .unwrap();
        let mq = alpha_matrix(&q, &tq).unwrap();
        let f = fp();
        let tp = DenseTensor::new(
            fmt.clone(),
            ints.iter().map(|&x| f.from_i64(x)).collect(),
        )
        .unwrap();
        let mp = alpha_matrix(&f, &tp).unwrap();
        assert_eq!(mq.rank(), mp.rank());
        assert_eq!(critical_dim(&q, &tq), critical_dim(&f, &tp));
    }

    #[test]
    fn protocol_reports_disagreement() {
        // a contrived compute function that depends on the seed
        let fmt = TensorFormat::new(vec![2, 2]).unwrap();
        let err = generic_rank(&fmt, &Protocol::default(), |_, t| {
            Ok(t.entries()[0] as usize % 7)
        })
        .unwrap_err();
        assert!(matches!(err, Error::RankDisagreement(_)));
    }
}
