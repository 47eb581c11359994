//! Predictor-corrector tracking for the total-degree homotopy.
//!
//! The start system is diagonal, `x_e^{d_e} - c_e` in the variable paired
//! with each equation, with the gamma trick connecting it to the target
//! system. Paths that leave every bounded region are classified as
//! infinite; that is the expected fate of the excess of the Bezout count
//! over the actual root count.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::system::{C64, MinorSystem};

#[derive(Clone, Copy, Debug)]
pub struct TrackSettings {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub max_steps: usize,
    pub norm_cutoff: f64,
    pub end_tol: f64,
}

impl Default for TrackSettings {
    fn default() -> Self {
        TrackSettings {
            dt_init: 0.03,
            dt_min: 1e-9,
            dt_max: 0.1,
            newton_tol: 3e-8,
            max_newton: 4,
            max_steps: 2_500,
            norm_cutoff: 1e4,
            end_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub enum PathOutcome {
    /// Converged endpoint of the square system at t = 1.
    Finite(Vec<C64>),
    /// Escaped to infinity; not a solution.
    Infinite,
    /// Tracking broke down.
    Failed,
}

/// The diagonal start system and its per-equation data.
pub struct StartSystem {
    /// degree of each equation (1 for charts, k for minor combos)
    degrees: Vec<u32>,
    constants: Vec<C64>,
    pub gamma: C64,
}

impl StartSystem {
    pub fn build(sys: &MinorSystem, rng: &mut ChaCha8Rng) -> Self {
        let k = sys.num_factors() as u32;
        let mut degrees = vec![1u32; sys.nvars];
        for i in 0..sys.num_factors() {
            for e in 0..sys.dims[i] - 1 {
                degrees[sys.offsets[i] + 1 + e] = k;
            }
        }
        let constants = (0..sys.nvars)
            .map(|_| {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let r: f64 = rng.gen_range(0.6..1.4);
                C64::new(r * theta.cos(), r * theta.sin())
            })
            .collect();
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let gamma = C64::new(theta.cos(), theta.sin());
        StartSystem {
            degrees,
            constants,
            gamma,
        }
    }

    pub fn path_count(&self) -> u128 {
        self.degrees.iter().map(|&d| d as u128).product()
    }

    /// The `index`-th start solution in mixed-radix order over the root
    /// choices of each equation.
    pub fn start_point(&self, mut index: u128) -> Vec<C64> {
        self.degrees
            .iter()
            .zip(&self.constants)
            .map(|(&d, c)| {
                let choice = (index % d as u128) as u32;
                index /= d as u128;
                let r = c.norm().powf(1.0 / d as f64);
                let theta = (c.arg() + std::f64::consts::TAU * choice as f64) / d as f64;
                C64::new(r * theta.cos(), r * theta.sin())
            })
            .collect()
    }

    fn eval(&self, x: &[C64]) -> DVector<C64> {
        DVector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.degrees.iter().zip(&self.constants))
                .map(|(&xv, (&d, &c))| xv.powu(d) - c),
        )
    }

    /// Diagonal of the start Jacobian.
    fn diag(&self, x: &[C64]) -> Vec<C64> {
        x.iter()
            .zip(&self.degrees)
            .map(|(&xv, &d)| C64::new(d as f64, 0.0) * xv.powu(d - 1))
            .collect()
    }
}

fn inf_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn homotopy_residual(sys: &MinorSystem, start: &StartSystem, x: &[C64], t: f64) -> DVector<C64> {
    let f = sys.eval(x);
    let g = start.eval(x);
    let gs = start.gamma * C64::new(1.0 - t, 0.0);
    f * C64::new(t, 0.0) + g * gs
}

fn homotopy_jacobian(sys: &MinorSystem, start: &StartSystem, x: &[C64], t: f64) -> DMatrix<C64> {
    let gs = start.gamma * C64::new(1.0 - t, 0.0);
    let mut jac = sys.jacobian(x) * C64::new(t, 0.0);
    for (v, d) in start.diag(x).into_iter().enumerate() {
        jac[(v, v)] += gs * d;
    }
    jac
}

/// Tracks one path from its start point at t = 0 to t = 1.
pub fn track_path(
    sys: &MinorSystem,
    start: &StartSystem,
    x0: Vec<C64>,
    settings: &TrackSettings,
) -> PathOutcome {
    let mut x = x0;
    let mut t = 0.0f64;
    let mut dt = settings.dt_init;
    let mut streak = 0usize;
    let mut steps = 0usize;
    // divergence signature: corrector failures close to t = 1 whose norm
    // keeps growing between events. A path homing in on a regular finite
    // solution has a stabilizing norm, so it never accumulates these.
    let mut growth_cycles = 0usize;
    let mut last_fail_norm = f64::INFINITY;
    // factorization of the homotopy Jacobian near (x, t), reused by the
    // predictor and across corrector iterations (chord Newton); the step
    // acceptance test still decides on the true residual
    let mut lu_here = homotopy_jacobian(sys, start, &x, t).lu();

    while t < 1.0 {
        steps += 1;
        if steps > settings.max_steps {
            return stalled(&x, t);
        }
        let step = dt.min(1.0 - t);
        // Euler predictor along dx/dt = -J^{-1} (F - gamma G)
        let ht = sys.eval(&x) - start.eval(&x) * start.gamma;
        let Some(v) = lu_here.solve(&(-ht)) else {
            return stalled(&x, t);
        };
        let mut xp: Vec<C64> = x
            .iter()
            .zip(v.iter())
            .map(|(&xv, &d)| xv + d * C64::new(step, 0.0))
            .collect();

        // chord Newton corrector at t + step: one factorization, then
        // cheap triangular solves with fresh residuals
        let t_new = t + step;
        let mut converged = false;
        let mut last_norm = f64::INFINITY;
        let lu_ahead = homotopy_jacobian(sys, start, &xp, t_new).lu();
        for _ in 0..settings.max_newton {
            let h = homotopy_residual(sys, start, &xp, t_new);
            let Some(dx) = lu_ahead.solve(&(-h)) else {
                break;
            };
            let dn = dx.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (xv, d) in xp.iter_mut().zip(dx.iter()) {
                *xv += d;
            }
            if dn < settings.newton_tol * (1.0 + inf_norm(&xp)) {
                converged = true;
                break;
            }
            if dn > 0.5 * last_norm && dn > 1e-4 {
                break; // not contracting
            }
            last_norm = dn;
        }

        if converged {
            x = xp;
            t = t_new;
            lu_here = lu_ahead;
            streak += 1;
            if streak >= 3 {
                dt = (dt * 2.0).min(settings.dt_max);
                streak = 0;
            }
            if inf_norm(&x) > settings.norm_cutoff {
                return PathOutcome::Infinite;
            }
        } else {
            dt /= 3.0;
            streak = 0;
            let norm = inf_norm(&x);
            if t > 0.99 && norm > 30.0 {
                if norm > 1.02 * last_fail_norm {
                    growth_cycles += 1;
                } else if norm < last_fail_norm {
                    growth_cycles = 0;
                }
                last_fail_norm = norm;
                if growth_cycles >= 10 {
                    return PathOutcome::Infinite;
                }
            }
            // a corrector failure against t = 1 with large coordinates is
            // already decisive, no need to grind the step down
            if dt < settings.dt_min || (t > 1.0 - 1e-6 && norm > 50.0) {
                return stalled(&x, t);
            }
        }
    }

    // polish on the target system itself
    polish_square(sys, x, settings)
}

/// Classifies a breakdown. Paths that stall against t = 1 with growing
/// coordinates are the Bezout excess heading to infinity: a regular finite
/// solution would let the corrector converge. Mid-path breakdowns stay
/// failures and count against the instability guard.
fn stalled(x: &[C64], t: f64) -> PathOutcome {
    let norm = inf_norm(x);
    if norm > 1e3 || (t > 1.0 - 1e-6 && norm > 50.0) {
        PathOutcome::Infinite
    } else {
        PathOutcome::Failed
    }
}

/// Newton on the square target system to full precision.
fn polish_square(sys: &MinorSystem, mut x: Vec<C64>, settings: &TrackSettings) -> PathOutcome {
    for _ in 0..30 {
        let f = sys.eval(&x);
        let jac = sys.jacobian(&x);
        let Some(dx) = jac.lu().solve(&(-f)) else {
            return stalled(&x, 1.0);
        };
        let dn = dx.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (xv, d) in x.iter_mut().zip(dx.iter()) {
            *xv += d;
        }
        if inf_norm(&x) > settings.norm_cutoff {
            return PathOutcome::Infinite;
        }
        if dn < settings.end_tol * (1.0 + inf_norm(&x)) {
            return PathOutcome::Finite(x);
        }
    }
    stalled(&x, 1.0)
}

/// A couple of Gauss-Newton steps on the full overdetermined minor system
/// plus charts, sharpening an endpoint against every minor at once.
pub fn refine_full(sys: &MinorSystem, x: &mut [C64]) {
    for _ in 0..3 {
        let (f, jac) = sys.full_system(x);
        let svd = jac.svd(true, true);
        let Ok(dx) = svd.solve(&(-f), 1e-14) else {
            return;
        };
        let dn: f64 = dx.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (xv, d) in x.iter_mut().zip(dx.iter()) {
            *xv += d;
        }
        if dn < 1e-14 * (1.0 + inf_norm(x)) {
            return;
        }
    }
}
