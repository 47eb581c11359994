//! Two independent routes to the same syzygy dimension for three-factor
//! tensors of format `(a+1, b+1, a+b+2)` with `a, b >= 2`.
//!
//! A tensor of that format is a linear map from `W = F^{a+b+2}` to the
//! degree-one part of the Segre coordinate ring `R` of `P^a x P^b`. The
//! first route computes the middle homology of
//!
//! ```text
//!   Lambda^2 W  ->  W (x) R_1  ->  R_2
//! ```
//!
//! with the Koszul differentials. The second quotients by a maximal
//! regular sequence of generic linear forms and measures the kernel of
//! multiplication by the remaining variable from degree 1 to degree 2.
//! Both equal the kernel dimension of the contraction map, which the
//! tests check against [`super::span_codim_via_alpha`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, Field};
use crate::tensor::DenseTensor;

/// Outcome of both oracle modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KoszulReport {
    /// Middle homology of the three-term complex.
    pub complex_mode: usize,
    /// Kernel of multiplication in the Artinian reduction.
    pub artinian_mode: usize,
}

impl KoszulReport {
    /// The common value, or an internal-inconsistency error.
    pub fn agreed(&self) -> Result<usize> {
        if self.complex_mode == self.artinian_mode {
            Ok(self.complex_mode)
        } else {
            Err(Error::OracleDisagreement {
                complex_mode: self.complex_mode,
                artinian_mode: self.artinian_mode,
            })
        }
    }
}

struct Setup<'a, F: Field> {
    f: &'a F,
    tensor: &'a DenseTensor<F::Elem>,
    adim: usize,
    bdim: usize,
    m: usize,
    /// basis of `R_1 = A (x) B`, pairs `(r, s)` in row-major order
    r1: usize,
    sym_a: Vec<(usize, usize)>,
    sym_b: Vec<(usize, usize)>,
}

impl<'a, F: Field> Setup<'a, F> {
    fn new(f: &'a F, tensor: &'a DenseTensor<F::Elem>) -> Result<Self> {
        let dims = tensor.format().dims();
        if dims.len() != 3 {
            return Err(Error::InvalidFormat(format!(
                "koszul oracle needs a 3-factor tensor, got {}",
                tensor.format()
            )));
        }
        let (adim, bdim, m) = (dims[0], dims[1], dims[2]);
        let (a, b) = (adim - 1, bdim - 1);
        if a < 2 || b < 2 || m != a + b + 2 {
            return Err(Error::InvalidFormat(format!(
                "koszul oracle needs format (a+1, b+1, a+b+2) with a, b >= 2, got {}",
                tensor.format()
            )));
        }
        let sym_pairs = |d: usize| -> Vec<(usize, usize)> {
            let mut v = Vec::with_capacity(d * (d + 1) / 2);
            for i in 0..d {
                for j in i..d {
                    v.push((i, j));
                }
            }
            v
        };
        let setup = Setup {
            f,
            tensor,
            adim,
            bdim,
            m,
            r1: adim * bdim,
            sym_a: sym_pairs(adim),
            sym_b: sym_pairs(bdim),
        };
        // genericity precondition: W -> A (x) B must be injective
        let wmap = ExactMatrix::from_fn(f.clone(), setup.r1, m, |rs, c| {
            let (r, s) = (rs / bdim, rs % bdim);
            tensor.get(&[r, s, c]).clone()
        });
        if wmap.rank() != m {
            return Err(Error::DegenerateTensor);
        }
        Ok(setup)
    }

    fn t_entry(&self, r: usize, s: usize, c: usize) -> &F::Elem {
        self.tensor.get(&[r, s, c])
    }

    /// Image of `w` in `R_1`, as a vector over the `(r, s)` basis.
    fn t_of(&self, w: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.f;
        let mut out = vec![f.zero(); self.r1];
        for r in 0..self.adim {
            for s in 0..self.bdim {
                let mut acc = f.zero();
                for c in 0..self.m {
                    acc = f.add(&acc, &f.mul(self.t_entry(r, s, c), &w[c]));
                }
                out[r * self.bdim + s] = acc;
            }
        }
        out
    }

    fn sym_index_a(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        i * self.adim - i * (i + 1) / 2 + j
    }

    fn sym_index_b(&self, i: usize, j: usize) -> usize {
        let (i, j) = (i.min(j), i.max(j));
        i * self.bdim - i * (i + 1) / 2 + j
    }

    /// Row index of the monomial `x_r x_u (x) y_s y_v` in `R_2`.
    fn r2_index(&self, r: usize, u: usize, s: usize, v: usize) -> usize {
        self.sym_index_a(r, u) * self.sym_b.len() + self.sym_index_b(s, v)
    }

    fn r2_dim(&self) -> usize {
        self.sym_a.len() * self.sym_b.len()
    }

    /// Matrix of multiplication by `t` (a vector of `R_1`) from `R_1` to
    /// `R_2`.
    fn mult_by(&self, t: &[F::Elem]) -> ExactMatrix<F> {
        let f = self.f;
        let mut m = ExactMatrix::zeros(f.clone(), self.r2_dim(), self.r1);
        for u in 0..self.adim {
            for v in 0..self.bdim {
                let col = u * self.bdim + v;
                for r in 0..self.adim {
                    for s in 0..self.bdim {
                        let coeff = &t[r * self.bdim + s];
                        if f.is_zero(coeff) {
                            continue;
                        }
                        let row = self.r2_index(r, u, s, v);
                        let val = f.add(m.get(row, col), coeff);
                        m.set(row, col, val);
                    }
                }
            }
        }
        m
    }
}

/// Middle homology dimension of the Koszul three-term complex.
fn complex_mode<F: Field>(s: &Setup<F>) -> usize {
    let f = s.f;
    let (m, r1) = (s.m, s.r1);

    // left map: e_c ^ e_c' -> e_c (x) T(e_c') - e_c' (x) T(e_c)
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|c| ((c + 1)..m).map(move |c2| (c, c2)))
        .collect();
    let left = ExactMatrix::from_fn(f.clone(), m * r1, pairs.len(), |row, col| {
        let (c, c2) = pairs[col];
        let (w, rs) = (row / r1, row % r1);
        let (r, sidx) = (rs / s.bdim, rs % s.bdim);
        if w == c {
            s.t_entry(r, sidx, c2).clone()
        } else if w == c2 {
            f.neg(s.t_entry(r, sidx, c))
        } else {
            f.zero()
        }
    });

    // right map: e_c (x) (u, v) -> T(e_c) * (x_u (x) y_v)
    let mut right = ExactMatrix::zeros(f.clone(), s.r2_dim(), m * r1);
    for c in 0..m {
        for u in 0..s.adim {
            for v in 0..s.bdim {
                let col = c * r1 + u * s.bdim + v;
                for r in 0..s.adim {
                    for si in 0..s.bdim {
                        let coeff = s.t_entry(r, si, c);
                        if f.is_zero(coeff) {
                            continue;
                        }
                        let row = s.r2_index(r, u, si, v);
                        let val = f.add(right.get(row, col), coeff);
                        right.set(row, col, val);
                    }
                }
            }
        }
    }

    let ker_right = m * r1 - right.rank();
    let im_left = left.rank();
    ker_right - im_left
}

/// Kernel of multiplication by the leftover variable after quotienting by
/// `m - 1` generic linear forms.
fn artinian_mode<F: Field>(s: &Setup<F>, seed: u64) -> usize {
    let f = s.f;
    let m = s.m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // draw a basis (h_1, ..., h_{m-1}, z) of W
    let (hs, z) = loop {
        let vecs: Vec<Vec<F::Elem>> = (0..m)
            .map(|_| {
                (0..m)
                    .map(|_| f.from_i64(rng.gen_range(-1000..=1000)))
                    .collect()
            })
            .collect();
        let mat = ExactMatrix::from_rows(f.clone(), vecs.clone());
        if mat.rank() == m {
            let mut vecs = vecs;
            let z = vecs.pop().unwrap();
            break (vecs, z);
        }
    };

    // span of T(H) * R_1 inside R_2, as columns
    let th: Vec<Vec<F::Elem>> = hs.iter().map(|h| s.t_of(h)).collect();
    let mut v_cols: Vec<ExactMatrix<F>> = Vec::with_capacity(th.len());
    for t in &th {
        v_cols.push(s.mult_by(t));
    }
    let bv = v_cols
        .iter()
        .skip(1)
        .fold(v_cols[0].clone(), |acc, m| acc.hconcat(m));

    let mult_z = s.mult_by(&s.t_of(&z));
    let stacked = mult_z.hconcat(&bv);

    // dim { u in R_1 : z*u lies in T(H)*R_1 } minus dim T(H)
    let preimage = s.r1 + bv.rank() - stacked.rank();
    preimage - (m - 1)
}

/// Runs both oracle modes on a tensor of format `(a+1, b+1, a+b+2)`.
pub fn koszul_oracle<F: Field>(
    f: &F,
    tensor: &DenseTensor<F::Elem>,
    seed: u64,
) -> Result<KoszulReport> {
    let setup = Setup::new(f, tensor)?;
    Ok(KoszulReport {
        complex_mode: complex_mode(&setup),
        artinian_mode: artinian_mode(&setup, seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{generic_alpha_kernel, Protocol};
    use crate::exact::{random_mod_p, PrimeField, DEFAULT_PRIME};
    use crate::format::beyond_by_one;

    fn fp() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    fn random_tensor(a: usize, b: usize, seed: u64) -> DenseTensor<u64> {
        let fmt = beyond_by_one(&[a, b]).unwrap();
        let entries = random_mod_p(&fmt, seed, DEFAULT_PRIME);
        DenseTensor::new(fmt, entries).unwrap()
    }

    #[test]
    fn right_after_left_vanishes() {
        let f = fp();
        let t = random_tensor(2, 2, 9);
        let s = Setup::new(&f, &t).unwrap();
        // build both maps and multiply
        let pairs: Vec<(usize, usize)> = (0..s.m)
            .flat_map(|c| ((c + 1)..s.m).map(move |c2| (c, c2)))
            .collect();
        for (pi, &(c, c2)) in pairs.iter().enumerate() {
            let _ = pi;
            // image of e_c ^ e_c2 under the left map
            let mut mid = vec![f.zero(); s.m * s.r1];
            let tc2 = s.t_of(&unit(&f, s.m, c2));
            let tc = s.t_of(&unit(&f, s.m, c));
            for rs in 0..s.r1 {
                mid[c * s.r1 + rs] = tc2[rs];
                mid[c2 * s.r1 + rs] = f.neg(&tc[rs]);
            }
            // push through the right map
            let mut out = vec![f.zero(); s.r2_dim()];
            for w in 0..s.m {
                let tw = s.t_of(&unit(&f, s.m, w));
                for u in 0..s.adim {
                    for v in 0..s.bdim {
                        let x = &mid[w * s.r1 + u * s.bdim + v];
                        if f.is_zero(x) {
                            continue;
                        }
                        for r in 0..s.adim {
                            for si in 0..s.bdim {
                                let row = s.r2_index(r, u, si, v);
                                let add = f.mul(&tw[r * s.bdim + si], x);
                                out[row] = f.add(&out[row], &add);
                            }
                        }
                    }
                }
            }
            assert!(out.iter().all(|x| f.is_zero(x)), "pair ({c},{c2})");
        }
    }

    fn unit<F: Field>(f: &F, len: usize, i: usize) -> Vec<F::Elem> {
        let mut v = vec![f.zero(); len];
        v[i] = f.one();
        v
    }

    #[test]
    fn frozen_values_and_mode_agreement() {
        let f = fp();
        for (a, b, expected) in [(2usize, 2usize, 3usize), (2, 3, 3), (3, 3, 0)] {
            for seed in [5u64, 6] {
                let t = random_tensor(a, b, seed);
                let report = koszul_oracle(&f, &t, 1234 + seed).unwrap();
                assert_eq!(report.agreed().unwrap(), expected, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn agrees_with_alpha_kernel() {
        // the full grid 2 <= a <= b <= 4: two independent computations of
        // the same number
        let f = fp();
        for (a, b) in [(2usize, 2usize), (2, 3), (2, 4), (3, 3), (3, 4), (4, 4)] {
            let t = random_tensor(a, b, 31);
            let got = koszul_oracle(&f, &t, 77).unwrap().agreed().unwrap();
            let fmt = beyond_by_one(&[a, b]).unwrap();
            let alpha = generic_alpha_kernel(&fmt, &Protocol::default()).unwrap();
            assert_eq!(got, alpha, "a={a} b={b}");
        }
    }

    #[test]
    fn degenerate_tensor_rejected() {
        let f = fp();
        let fmt = beyond_by_one(&[2, 2]).unwrap();
        // zero out the last-factor slice c = 0: the map W -> A (x) B kills e_0
        let mut entries = random_mod_p(&fmt, 4, DEFAULT_PRIME);
        let t0 = DenseTensor::new(fmt.clone(), entries.clone()).unwrap();
        for r in 0..3 {
            for s in 0..3 {
                let idx = t0.linear_index(&[r, s, 0]);
                entries[idx] = 0;
            }
        }
        let t = DenseTensor::new(fmt, entries).unwrap();
        assert!(matches!(
            koszul_oracle(&f, &t, 1),
            Err(Error::DegenerateTensor)
        ));
    }

    #[test]
    fn wrong_format_rejected() {
        let f = fp();
        let fmt = beyond_by_one(&[1, 2]).unwrap(); // a = 1 too small
        let entries = random_mod_p(&fmt, 4, DEFAULT_PRIME);
        let t = DenseTensor::new(fmt, entries).unwrap();
        assert!(matches!(
            koszul_oracle(&f, &t, 1),
            Err(Error::InvalidFormat(_))
        ));
    }
}
