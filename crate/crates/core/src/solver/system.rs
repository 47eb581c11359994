//! The polynomial system whose solutions are singular vector tuples.
//!
//! For each factor the rank-one condition on the 2 x d_i matrix stacking
//! the contraction vector over x_i is expressed through its 2 x 2 minors.
//! The tracked square system takes, per factor, n_i random complex linear
//! combinations of all minors plus one random affine chart. Random
//! combinations rather than a fixed pivot column keep the excess solution
//! set zero dimensional, so paths end at isolated points and the full
//! minor residual filters the spurious ones.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::{multi_indices, DenseTensor};

pub type C64 = Complex<f64>;

pub struct MinorSystem {
    /// complex copy of the tensor entries, in linear order
    entries: Vec<C64>,
    pub dims: Vec<usize>,
    /// start of each factor's variable block
    pub offsets: Vec<usize>,
    /// total variable count, sum of dims
    pub nvars: usize,
    /// one affine chart covector per factor
    pub charts: Vec<Vec<C64>>,
    /// combos[i][e][pair] with pair running over the 2x2 minors of factor i
    combos: Vec<Vec<Vec<C64>>>,
    /// decoded multi-index per flat entry
    index_table: Vec<Vec<usize>>,
}

fn random_unit(rng: &mut ChaCha8Rng) -> C64 {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::new(theta.cos(), theta.sin())
}

impl MinorSystem {
    /// Builds the dehomogenized square system with fresh random charts and
    /// minor combinations drawn from `rng`.
    pub fn build(tensor: &DenseTensor<f64>, rng: &mut ChaCha8Rng) -> Self {
        let dims = tensor.format().dims().to_vec();
        let entries: Vec<C64> = tensor
            .entries()
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect();
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0usize;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        let charts: Vec<Vec<C64>> = dims
            .iter()
            .map(|&d| (0..d).map(|_| random_unit(rng)).collect())
            .collect();
        let combos: Vec<Vec<Vec<C64>>> = dims
            .iter()
            .map(|&d| {
                let pairs = d * (d - 1) / 2;
                (0..d - 1)
                    .map(|_| (0..pairs).map(|_| random_unit(rng)).collect())
                    .collect()
            })
            .collect();
        let index_table = multi_indices(&dims).collect();
        MinorSystem {
            entries,
            dims,
            offsets,
            nvars: acc,
            charts,
            combos,
            index_table,
        }
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    /// Count of minor equations, which equals the count of effective
    /// unknowns once each factor is restricted to its chart.
    pub fn num_minor_equations(&self) -> usize {
        self.dims.iter().map(|d| d - 1).sum()
    }

    /// Total degree of every minor equation.
    pub fn equation_degree(&self) -> usize {
        self.dims.len()
    }

    /// Number of homotopy paths of the total-degree start system.
    pub fn path_count(&self) -> u128 {
        let k = self.dims.len() as u128;
        let mut total = 1u128;
        for _ in 0..self.num_minor_equations() {
            total = total.saturating_mul(k);
        }
        total
    }

    #[inline]
    pub fn factor_slice<'a>(&self, x: &'a [C64], i: usize) -> &'a [C64] {
        &x[self.offsets[i]..self.offsets[i] + self.dims[i]]
    }

    /// Contractions of the tensor against all factors but one, for every
    /// factor at once.
    pub fn contractions(&self, x: &[C64]) -> Vec<Vec<C64>> {
        let k = self.dims.len();
        let mut out: Vec<Vec<C64>> = self.dims.iter().map(|&d| vec![C64::ZERO; d]).collect();
        let mut coords = vec![C64::ZERO; k];
        for (flat, idx) in self.index_table.iter().enumerate() {
            let t = self.entries[flat];
            if t == C64::ZERO {
                continue;
            }
            for j in 0..k {
                coords[j] = x[self.offsets[j] + idx[j]];
            }
            for i in 0..k {
                let mut prod = t;
                for (j, &c) in coords.iter().enumerate() {
                    if j != i {
                        prod *= c;
                    }
                }
                out[i][idx[i]] += prod;
            }
        }
        out
    }

    /// Contractions leaving out two factors: `pair[(i, j)][p][s]` is the
    /// coefficient of slot `p` in factor `i` and slot `s` in factor `j`.
    fn double_contractions(&self, x: &[C64]) -> Vec<Vec<DMatrix<C64>>> {
        let k = self.dims.len();
        let mut out: Vec<Vec<DMatrix<C64>>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| DMatrix::zeros(self.dims[i], self.dims[j]))
                    .collect()
            })
            .collect();
        let mut coords = vec![C64::ZERO; k];
        for (flat, idx) in self.index_table.iter().enumerate() {
            let t = self.entries[flat];
            if t == C64::ZERO {
                continue;
            }
            for j in 0..k {
                coords[j] = x[self.offsets[j] + idx[j]];
            }
            for i in 0..k {
                for j in (i + 1)..k {
                    let mut prod = t;
                    for (l, &c) in coords.iter().enumerate() {
                        if l != i && l != j {
                            prod *= c;
                        }
                    }
                    out[i][j][(idx[i], idx[j])] += prod;
                }
            }
        }
        out
    }

    /// All 2x2 minors of factor `i` at `x`, in pair order `(p, q)`, `p < q`.
    pub fn minors_of_factor(&self, x: &[C64], contraction: &[C64], i: usize) -> Vec<C64> {
        let xi = self.factor_slice(x, i);
        let d = self.dims[i];
        let mut out = Vec::with_capacity(d * (d - 1) / 2);
        for p in 0..d {
            for q in (p + 1)..d {
                out.push(contraction[p] * xi[q] - contraction[q] * xi[p]);
            }
        }
        out
    }

    /// The tracked equations: per factor one chart then its minor combos,
    /// in variable order.
    pub fn eval(&self, x: &[C64]) -> DVector<C64> {
        let k = self.dims.len();
        let contractions = self.contractions(x);
        let mut out = DVector::zeros(self.nvars);
        for i in 0..k {
            let base = self.offsets[i];
            let xi = self.factor_slice(x, i);
            let chart: C64 = self.charts[i]
                .iter()
                .zip(xi)
                .map(|(l, v)| l * v)
                .sum::<C64>()
                - C64::ONE;
            out[base] = chart;
            let minors = self.minors_of_factor(x, &contractions[i], i);
            for (e, combo) in self.combos[i].iter().enumerate() {
                out[base + 1 + e] = combo
                    .iter()
                    .zip(&minors)
                    .map(|(c, m)| c * m)
                    .sum();
            }
        }
        out
    }

    /// Jacobian of [`Self::eval`] at `x`.
    pub fn jacobian(&self, x: &[C64]) -> DMatrix<C64> {
        let k = self.dims.len();
        let contractions = self.contractions(x);
        let doubles = self.double_contractions(x);
        let mut jac = DMatrix::zeros(self.nvars, self.nvars);
        for i in 0..k {
            let base = self.offsets[i];
            let xi = self.factor_slice(x, i);
            let d = self.dims[i];
            // chart row
            for s in 0..d {
                jac[(base, self.offsets[i] + s)] = self.charts[i][s];
            }
            // derivative of each minor with respect to each variable
            for (e, combo) in self.combos[i].iter().enumerate() {
                let row = base + 1 + e;
                let mut pair = 0usize;
                for p in 0..d {
                    for q in (p + 1)..d {
                        let w = combo[pair];
                        pair += 1;
                        // own factor: A[p] d x[q] - A[q] d x[p]
                        jac[(row, self.offsets[i] + q)] += w * contractions[i][p];
                        jac[(row, self.offsets[i] + p)] -= w * contractions[i][q];
                        // other factors enter through the contraction
                        for j in 0..k {
                            if j == i {
                                continue;
                            }
                            let block = if i < j { &doubles[i][j] } else { &doubles[j][i] };
                            for s in 0..self.dims[j] {
                                let dp = if i < j { block[(p, s)] } else { block[(s, p)] };
                                let dq = if i < j { block[(q, s)] } else { block[(s, q)] };
                                jac[(row, self.offsets[j] + s)] += w * (dp * xi[q] - dq * xi[p]);
                            }
                        }
                    }
                }
            }
        }
        jac
    }

    /// Largest minor modulus over all factors, evaluated on the raw
    /// (non-normalized) coordinates.
    pub fn full_residual(&self, x: &[C64]) -> f64 {
        let contractions = self.contractions(x);
        let mut worst = 0f64;
        for i in 0..self.dims.len() {
            for m in self.minors_of_factor(x, &contractions[i], i) {
                worst = worst.max(m.norm());
            }
        }
        worst
    }

    /// Stacked residual vector of every minor plus the charts, and its
    /// Jacobian; used by the overdetermined refinement.
    pub fn full_system(&self, x: &[C64]) -> (DVector<C64>, DMatrix<C64>) {
        let k = self.dims.len();
        let contractions = self.contractions(x);
        let doubles = self.double_contractions(x);
        let rows: usize = self
            .dims
            .iter()
            .map(|&d| d * (d - 1) / 2)
            .sum::<usize>()
            + k;
        let mut f = DVector::zeros(rows);
        let mut jac = DMatrix::zeros(rows, self.nvars);
        let mut row = 0usize;
        for i in 0..k {
            let xi = self.factor_slice(x, i);
            let d = self.dims[i];
            for p in 0..d {
                for q in (p + 1)..d {
                    f[row] = contractions[i][p] * xi[q] - contractions[i][q] * xi[p];
                    jac[(row, self.offsets[i] + q)] += contractions[i][p];
                    jac[(row, self.offsets[i] + p)] -= contractions[i][q];
                    for j in 0..k {
                        if j == i {
                            continue;
                        }
                        let block = if i < j { &doubles[i][j] } else { &doubles[j][i] };
                        for s in 0..self.dims[j] {
                            let dp = if i < j { block[(p, s)] } else { block[(s, p)] };
                            let dq = if i < j { block[(q, s)] } else { block[(s, q)] };
                            jac[(row, self.offsets[j] + s)] += dp * xi[q] - dq * xi[p];
                        }
                    }
                    row += 1;
                }
            }
        }
        for i in 0..k {
            let chart: C64 = self.charts[i]
                .iter()
                .zip(self.factor_slice(x, i))
                .map(|(l, v)| l * v)
                .sum::<C64>()
                - C64::ONE;
            f[row] = chart;
            for s in 0..self.dims[i] {
                jac[(row, self.offsets[i] + s)] = self.charts[i][s];
            }
            row += 1;
        }
        (f, jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::TensorFormat;
    use rand::SeedableRng;

    fn system(dims: &[usize], seed: u64) -> MinorSystem {
        let fmt = TensorFormat::new(dims.to_vec()).unwrap();
        let entries = crate::exact::random_int(&fmt, seed, 50)
            .into_iter()
            .map(|x| x as f64 / 50.0)
            .collect();
        let tensor = DenseTensor::new(fmt, entries).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        MinorSystem::build(&tensor, &mut rng)
    }

    #[test]
    fn counts_match_the_format() {
        let s = system(&[2, 2, 2], 1);
        assert_eq!(s.num_minor_equations(), 3);
        assert_eq!(s.equation_degree(), 3);
        assert_eq!(s.path_count(), 27);

        let s = system(&[3, 3], 2);
        assert_eq!(s.num_minor_equations(), 4);
        assert_eq!(s.equation_degree(), 2);
        assert_eq!(s.path_count(), 16);

        let s = system(&[2, 2, 4], 3);
        assert_eq!(s.num_minor_equations(), 5);
        assert_eq!(s.equation_degree(), 3);
        assert_eq!(s.path_count(), 243);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let s = system(&[2, 3, 2], 5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<C64> = (0..s.nvars)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let jac = s.jacobian(&x);
        let f0 = s.eval(&x);
        let h = 1e-7;
        for v in 0..s.nvars {
            let mut xp = x.clone();
            xp[v] += C64::new(h, 0.0);
            let fp = s.eval(&xp);
            for r in 0..s.nvars {
                let fd = (fp[r] - f0[r]) / h;
                let an = jac[(r, v)];
                assert!(
                    (fd - an).norm() < 1e-4 * (1.0 + an.norm()),
                    "row {r} var {v}: {fd} vs {an}"
                );
            }
        }
    }

    #[test]
    fn full_system_jacobian_matches_finite_differences() {
        let s = system(&[2, 2, 2], 6);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x: Vec<C64> = (0..s.nvars)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (f0, jac) = s.full_system(&x);
        let h = 1e-7;
        for v in 0..s.nvars {
            let mut xp = x.clone();
            xp[v] += C64::new(h, 0.0);
            let (fp, _) = s.full_system(&xp);
            for r in 0..f0.len() {
                let fd = (fp[r] - f0[r]) / h;
                let an = jac[(r, v)];
                assert!(
                    (fd - an).norm() < 1e-4 * (1.0 + an.norm()),
                    "row {r} var {v}"
                );
            }
        }
    }
}
