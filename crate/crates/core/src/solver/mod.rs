//! Numerical computation of all singular vector tuples of a small tensor
//! by total-degree homotopy continuation, plus span analysis of the found
//! rank-one tensors inside the critical space.
//!
//! Paths are independent and tracked in parallel under the `parallel`
//! feature; the outcome is deterministic given the seed either way.

mod system;
mod track;

pub use system::{C64, MinorSystem};
pub use track::{track_path, PathOutcome, StartSystem, TrackSettings};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::critical::critical_dim_structured;
use crate::error::{Error, Result};
use crate::exact::{rational_from_f64, Rationals};
use crate::poly::ed_degree;
use crate::tensor::{multi_indices, DenseTensor};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Certification threshold on the largest minor after refinement.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Two normalized tuples closer than this are the same solution.
pub const DEDUP_TOL: f64 = 1e-6;
/// Default cap on the number of tracked paths.
pub const DEFAULT_MAX_PATHS: u128 = 100_000;
/// Required ratio at the numerical rank boundary of the span matrix.
pub const SPAN_GAP: f64 = 1e3;

/// A certified singular vector tuple: one unit vector per factor, the
/// first sufficiently large coordinate of each made real positive so that
/// deduplication is well defined.
#[derive(Clone, Debug, Serialize)]
pub struct SingularTuple {
    pub vectors: Vec<Vec<C64>>,
    /// largest minor modulus over all factors at the normalized vectors
    pub residual: f64,
    /// number of homotopy paths that converged to this tuple
    pub multiplicity: usize,
}

/// Everything a solve produces.
#[derive(Clone, Debug, Serialize)]
pub struct TupleSolveReport {
    pub format: String,
    pub seed: u64,
    pub tuples: Vec<SingularTuple>,
    /// count predicted by the generating-polynomial coefficient
    pub expected_count: u64,
    pub paths_tracked: usize,
    pub paths_failed: usize,
    /// numerical rank of the span of the rank-one tensors
    pub span_rank: usize,
    /// exact dimension of the critical space of this tensor
    pub critical_dim: usize,
}

impl TupleSolveReport {
    pub fn complete(&self) -> bool {
        self.tuples.len() as u64 == self.expected_count
    }

    pub fn span_codim(&self) -> usize {
        self.critical_dim - self.span_rank
    }
}

/// Normalizes each vector to unit norm and rotates its phase so the first
/// coordinate of modulus above `1e-6` is real positive. Applying it twice
/// is the identity.
pub fn normalize_tuple(vectors: &mut [Vec<C64>]) {
    for v in vectors.iter_mut() {
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 && (norm - 1.0).abs() > 1e-15 {
            for c in v.iter_mut() {
                *c /= norm;
            }
        }
        if let Some(first) = v.iter().find(|c| c.norm() > 1e-6) {
            let arg = first.arg();
            if arg.abs() > 1e-15 {
                let rot = C64::new(arg.cos(), -arg.sin());
                for c in v.iter_mut() {
                    *c *= rot;
                }
            }
        }
    }
}

fn tuple_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(va, vb)| {
            va.iter()
                .zip(vb)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Splits the flat variable vector into per-factor vectors.
fn split_vectors(sys: &MinorSystem, x: &[C64]) -> Vec<Vec<C64>> {
    (0..sys.num_factors())
        .map(|i| sys.factor_slice(x, i).to_vec())
        .collect()
}

/// Solves for all singular vector tuples of a real tensor.
///
/// The tensor is rescaled to unit largest entry before tracking (singular
/// vector tuples are invariant under scaling), so the certification
/// threshold is meaningful regardless of the input magnitude. Fails with
/// [`Error::ResourceGuard`] when the path count exceeds `max_paths` and
/// with [`Error::TrackingUnstable`] when more than a fifth of the paths
/// break down.
pub fn solve_singular_tuples(
    tensor: &DenseTensor<f64>,
    seed: u64,
    max_paths: u128,
) -> Result<TupleSolveReport> {
    solve_singular_tuples_with_tol(tensor, seed, max_paths, RESIDUAL_TOL)
}

/// [`solve_singular_tuples`] with an explicit certification tolerance.
pub fn solve_singular_tuples_with_tol(
    tensor: &DenseTensor<f64>,
    seed: u64,
    max_paths: u128,
    residual_tol: f64,
) -> Result<TupleSolveReport> {
    let ns: Vec<usize> = tensor.format().dims().iter().map(|&d| d - 1).collect();
    let expected_big = ed_degree(&ns);
    let scale = tensor
        .entries()
        .iter()
        .fold(0.0f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::InvalidFormat("zero tensor".into()));
    }
    let scaled = tensor.map(|&x| x / scale);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = MinorSystem::build(&scaled, &mut rng);
    let start = StartSystem::build(&sys, &mut rng);
    let paths = start.path_count();
    if paths > max_paths {
        return Err(Error::ResourceGuard(format!(
            "{paths} paths exceed the cap of {max_paths}"
        )));
    }
    let paths = paths as usize;
    let expected_count = u64::try_from(&expected_big).expect("count fits under the path guard");

    let settings = TrackSettings::default();
    let outcomes: Vec<PathOutcome> = {
        #[cfg(feature = "parallel")]
        {
            (0..paths)
                .into_par_iter()
                .map(|i| track::track_path(&sys, &start, start.start_point(i as u128), &settings))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..paths)
                .map(|i| track::track_path(&sys, &start, start.start_point(i as u128), &settings))
                .collect()
        }
    };

    let paths_failed = outcomes
        .iter()
        .filter(|o| matches!(o, PathOutcome::Failed))
        .count();
    if paths_failed * 5 > paths {
        return Err(Error::TrackingUnstable {
            failed: paths_failed,
            tracked: paths,
        });
    }

    // refine, certify against all minors, deduplicate
    let mut tuples: Vec<SingularTuple> = Vec::new();
    for outcome in outcomes {
        let PathOutcome::Finite(mut x) = outcome else {
            continue;
        };
        track::refine_full(&sys, &mut x);
        let mut vectors = split_vectors(&sys, &x);
        normalize_tuple(&mut vectors);
        let flat: Vec<C64> = vectors.iter().flatten().copied().collect();
        let residual = sys.full_residual(&flat);
        if residual > residual_tol {
            continue;
        }
        match tuples
            .iter_mut()
            .find(|t| tuple_distance(&t.vectors, &vectors) < DEDUP_TOL)
        {
            Some(existing) => {
                existing.multiplicity += 1;
                if residual < existing.residual {
                    existing.vectors = vectors;
                    existing.residual = residual;
                }
            }
            None => tuples.push(SingularTuple {
                vectors,
                residual,
                multiplicity: 1,
            }),
        }
    }

    let span_rank = if tuples.is_empty() {
        0
    } else {
        span_rank(tensor.format().dims(), &tuples)?
    };
    let critical_dim = critical_dim_of_floats(tensor);

    Ok(TupleSolveReport {
        format: tensor.format().to_string(),
        seed,
        tuples,
        expected_count,
        paths_tracked: paths,
        paths_failed,
        span_rank,
        critical_dim,
    })
}

/// Reruns the solve with consecutive seeds until the tuple count matches
/// the predicted count, up to `attempts` tries. An incomplete final report
/// is returned as-is; missing tuples are flagged by the caller, not fatal.
pub fn solve_with_retries(
    tensor: &DenseTensor<f64>,
    seed: u64,
    attempts: u32,
    max_paths: u128,
    residual_tol: f64,
) -> Result<TupleSolveReport> {
    let mut last: Option<TupleSolveReport> = None;
    for a in 0..attempts.max(1) as u64 {
        match solve_singular_tuples_with_tol(tensor, seed.wrapping_add(a), max_paths, residual_tol)
        {
            Ok(report) => {
                if report.complete() {
                    return Ok(report);
                }
                last = Some(report);
            }
            Err(Error::TrackingUnstable { .. }) if a + 1 < attempts as u64 => continue,
            Err(e) => return Err(e),
        }
    }
    last.ok_or(Error::TrackingUnstable {
        failed: 0,
        tracked: 0,
    })
}

/// Evaluates every critical-space equation on the rank-one tensor built
/// from the tuple and returns the largest modulus. Certifies numerically
/// that the tuple's rank-one tensor lies in the critical space when the
/// result is below the caller's tolerance.
pub fn verify_in_critical(tensor: &DenseTensor<f64>, tuple: &SingularTuple) -> f64 {
    let dims = tensor.format().dims();
    let z = rank_one_flat(dims, &tuple.vectors);
    let mut worst = 0.0f64;
    let k = dims.len();
    let strides = {
        let mut s = vec![1usize; k];
        for j in (0..k - 1).rev() {
            s[j] = s[j + 1] * dims[j + 1];
        }
        s
    };
    for (l, &d) in dims.iter().enumerate() {
        let rest_dims: Vec<usize> = dims
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != l)
            .map(|(_, &x)| x)
            .collect();
        for p in 0..d {
            for q in (p + 1)..d {
                let mut acc = C64::ZERO;
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
                    acc += tensor.entries()[ip] * z[iq] - tensor.entries()[iq] * z[ip];
                }
                worst = worst.max(acc.norm());
            }
        }
    }
    worst
}

fn rank_one_flat(dims: &[usize], vectors: &[Vec<C64>]) -> Vec<C64> {
    multi_indices(dims)
        .map(|idx| {
            idx.iter()
                .enumerate()
                .map(|(j, &i)| vectors[j][i])
                .product()
        })
        .collect()
}

/// Numerical rank of the span of the tuples' rank-one tensors, by the gap
/// rule: singular values below `1e-8` of the largest are zero, and the
/// ratio across the boundary must be at least [`SPAN_GAP`].
fn span_rank(dims: &[usize], tuples: &[SingularTuple]) -> Result<usize> {
    let volume: usize = dims.iter().product();
    let rows: Vec<Vec<C64>> = tuples
        .iter()
        .map(|t| rank_one_flat(dims, &t.vectors))
        .collect();
    let m = DMatrix::from_fn(rows.len(), volume, |i, j| rows[i][j]);
    let svd = m.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    numeric_rank_by_gap(&sv)
}

/// Shared gap rule on a descending list of singular values.
pub fn numeric_rank_by_gap(sv: &[f64]) -> Result<usize> {
    let Some(&top) = sv.first() else {
        return Ok(0);
    };
    if top == 0.0 {
        return Ok(0);
    }
    let cutoff = 1e-8 * top;
    let rank = sv.iter().take_while(|&&s| s > cutoff).count();
    if rank < sv.len() {
        let gap = sv[rank - 1] / sv[rank].max(f64::MIN_POSITIVE);
        if gap < SPAN_GAP {
            return Err(Error::IllConditionedSpan {
                gap,
                threshold: SPAN_GAP,
            });
        }
    }
    Ok(rank)
}

/// Codimension of the span of certified tuples inside the projectivized
/// critical space: the exact critical space dimension of the tensor minus
/// the numerical span rank.
pub fn span_codim_in_h(tensor: &DenseTensor<f64>, tuples: &[SingularTuple]) -> Result<usize> {
    let r = if tuples.is_empty() {
        0
    } else {
        span_rank(tensor.format().dims(), tuples)?
    };
    let dim = critical_dim_of_floats(tensor);
    dim.checked_sub(r).ok_or(Error::IllConditionedSpan {
        gap: 0.0,
        threshold: SPAN_GAP,
    })
}

/// Exact critical space dimension of a float tensor: every finite float
/// is a rational, so the rank computation is exact.
pub fn critical_dim_of_floats(tensor: &DenseTensor<f64>) -> usize {
    let q = Rationals;
    let rationalized = tensor.map(|&x| rational_from_f64(x));
    critical_dim_structured(&q, &rationalized)
}

/// Deterministic real tensor with entries uniform in `[-1, 1]`.
pub fn random_real_tensor(format: &crate::format::TensorFormat, seed: u64) -> DenseTensor<f64> {
    use rand::Rng;
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1));
    let entries = (0..format.volume())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    DenseTensor::new(format.clone(), entries).unwrap()
}
