use std::f64::consts::{FRAC_PI_2, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{is_phase, wrap_phase, ParamVector};
use crate::error::{Error, Result};
use crate::sampler;

/// Golden-section stops once the bracket is narrower than this.
const GOLDEN_XTOL: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Grid resolution per coordinate for qubit searches; also sets the
    /// bracket half-width of every golden-section line search.
    pub grid_points_per_angle: usize,
    /// Maximum number of refinement starts.
    pub restarts: usize,
    /// A start has converged once a full sweep improves it by less than this.
    pub abs_tol: f64,
    /// Maximum number of sweeps per start.
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_points_per_angle: 24,
            restarts: 16,
            abs_tol: 1e-9,
            max_iters: 2000,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_angle < 2 {
            return Err(Error::BadConfig(
                "grid_points_per_angle must be at least 2".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::BadConfig("restarts must be positive".into()));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
        if !(self.abs_tol > 0.0) {
            return Err(Error::BadConfig("abs_tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::BadConfig("max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerMeta {
    /// Objective evaluations across the grid and all starts.
    pub evaluations: usize,
    pub starts: usize,
    /// Index of the start that produced the result.
    pub best_start: usize,
    /// Smallest objective value among the grid points and start points.
    pub initial_best: f64,
    /// Sweeps run by the winning start.
    pub sweeps: usize,
    /// Improvement achieved by the winning start's last sweep.
    pub final_improvement: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub value: f64,
    pub argmin: ParamVector,
    pub meta: OptimizerMeta,
}

struct Refined {
    value: f64,
    params: Vec<f64>,
    evaluations: usize,
    sweeps: usize,
    final_improvement: f64,
    converged: bool,
}

/// Minimizes `objective` over the parameter box of `d`-dimensional bases.
///
/// Qubits (`d = 2`) are scanned on a `grid x grid` lattice over
/// `θ ∈ [0, π/2]` (endpoints included) and `φ ∈ [0, 2π)`. The best grid point
/// and the next-best discrete local minima of the lattice (up to
/// `cfg.restarts` starts in total) are refined. For `d > 2` the starts are the
/// computational basis followed by `cfg.restarts` uniform random points drawn
/// from `cfg.seed`.
///
/// Refinement is repeated coordinate-wise golden-section sweeps; each line
/// search covers one grid step either side of the incumbent and a move is
/// accepted only when it lowers the value. The result is the least value over
/// all starts, with values within `abs_tol` of the least broken towards the
/// lowest start index.
pub fn minimize<F>(objective: F, d: usize, cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: Fn(&ParamVector) -> f64 + Sync,
{
    cfg.validate()?;
    let eval = |x: &[f64]| {
        let p = ParamVector::new(d, x.to_vec()).expect("length fixed by construction");
        objective(&p)
    };

    if d < 2 {
        let value = eval(&[]);
        return Ok(Minimum {
            value,
            argmin: ParamVector::zeros(d),
            meta: OptimizerMeta {
                evaluations: 1,
                starts: 1,
                best_start: 0,
                initial_best: value,
                sweeps: 0,
                final_improvement: 0.0,
                converged: true,
            },
        });
    }

    let n = cfg.grid_points_per_angle;
    let (starts, mut evaluations) = if d == 2 {
        grid_starts(&eval, cfg)
    } else {
        random_starts(&eval, d, cfg)
    };
    let initial_best = starts.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);

    let angle_step = FRAC_PI_2 / (n - 1) as f64;
    let phase_step = TAU / n as f64;
    let refined: Vec<Refined> = starts
        .par_iter()
        .map(|(x, fx)| refine(&eval, x.clone(), *fx, angle_step, phase_step, cfg))
        .collect();
    evaluations += refined.iter().map(|r| r.evaluations).sum::<usize>();

    let least = refined
        .iter()
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min);
    let best_start = refined
        .iter()
        .position(|r| r.value <= least + cfg.abs_tol)
        .unwrap_or(0);
    let winner = &refined[best_start];
    let minimum = Minimum {
        value: winner.value,
        argmin: ParamVector::new(d, winner.params.clone())?,
        meta: OptimizerMeta {
            evaluations,
            starts: refined.len(),
            best_start,
            initial_best,
            sweeps: winner.sweeps,
            final_improvement: winner.final_improvement,
            converged: winner.converged,
        },
    };
    if minimum.meta.converged {
        Ok(minimum)
    } else {
        Err(Error::OptimizerConvergence(Box::new(minimum)))
    }
}

/// The qubit lattice: returns refinement starts (best first) and the number
/// of evaluations spent.
fn grid_starts<E>(eval: &E, cfg: &OptimizerConfig) -> (Vec<(Vec<f64>, f64)>, usize)
where
    E: Fn(&[f64]) -> f64 + Sync,
{
    let n = cfg.grid_points_per_angle;
    let theta = |a: usize| a as f64 * FRAC_PI_2 / (n - 1) as f64;
    let phi = |b: usize| b as f64 * TAU / n as f64;
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| eval(&[theta(k / n), phi(k % n)]))
        .collect();

    let at = |a: usize, b: usize| values[a * n + b];
    let mut minima: Vec<usize> = (0..n * n)
        .filter(|&k| {
            let (a, b) = (k / n, k % n);
            let v = values[k];
            let mut neighbours = vec![at(a, (b + 1) % n), at(a, (b + n - 1) % n)];
            if a > 0 {
                neighbours.push(at(a - 1, b));
            }
            if a + 1 < n {
                neighbours.push(at(a + 1, b));
            }
            neighbours.iter().all(|&w| v <= w)
        })
        .collect();
    // stable sort keeps lattice order among equal values
    minima.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

    let best = (0..n * n).fold(0, |best, k| if values[k] < values[best] { k } else { best });
    let mut order = vec![best];
    order.extend(minima.into_iter().filter(|&k| k != best));
    order.truncate(cfg.restarts);
    let starts = order
        .into_iter()
        .map(|k| (vec![theta(k / n), phi(k % n)], values[k]))
        .collect();
    (starts, n * n)
}

fn random_starts<E>(eval: &E, d: usize, cfg: &OptimizerConfig) -> (Vec<(Vec<f64>, f64)>, usize)
where
    E: Fn(&[f64]) -> f64 + Sync,
{
    let len = ParamVector::len_for(d);
    let mut rng = sampler::rng(cfg.seed);
    let mut points = vec![vec![0.0; len]];
    for _ in 0..cfg.restarts {
        points.push(
            (0..len)
                .map(|k| {
                    if is_phase(k) {
                        rng.random_range(0.0..TAU)
                    } else {
                        rng.random_range(0.0..=FRAC_PI_2)
                    }
                })
                .collect(),
        );
    }
    let starts: Vec<(Vec<f64>, f64)> = points
        .into_par_iter()
        .map(|x| {
            let fx = eval(&x);
            (x, fx)
        })
        .collect();
    let count = starts.len();
    (starts, count)
}

fn refine<E>(
    eval: &E,
    mut x: Vec<f64>,
    mut fx: f64,
    angle_step: f64,
    phase_step: f64,
    cfg: &OptimizerConfig,
) -> Refined
where
    E: Fn(&[f64]) -> f64,
{
    let mut evaluations = 0;
    let mut final_improvement = f64::INFINITY;
    let mut sweeps = 0;
    let mut converged = false;
    let mut trial = x.clone();

    while sweeps < cfg.max_iters {
        sweeps += 1;
        let before = fx;
        for k in 0..x.len() {
            let (lo, hi) = if is_phase(k) {
                (x[k] - phase_step, x[k] + phase_step)
            } else {
                (
                    (x[k] - angle_step).max(0.0),
                    (x[k] + angle_step).min(FRAC_PI_2),
                )
            };
            let mut line = |t: f64| {
                evaluations += 1;
                trial.copy_from_slice(&x);
                trial[k] = if is_phase(k) { wrap_phase(t) } else { t };
                eval(&trial)
            };
            let (t, ft) = golden_section(&mut line, lo, hi);
            if ft < fx {
                x[k] = if is_phase(k) { wrap_phase(t) } else { t };
                fx = ft;
            }
        }
        final_improvement = before - fx;
        if final_improvement < cfg.abs_tol {
            converged = true;
            break;
        }
    }

    Refined {
        value: fx,
        params: x,
        evaluations,
        sweeps,
        final_improvement,
        converged,
    }
}

/// Golden-section search on `[lo, hi]`; returns the best point it evaluated.
pub fn golden_section<F: FnMut(f64) -> f64>(f: &mut F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best, mut fbest) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    while hi - lo > GOLDEN_XTOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 < fbest {
                best = x1;
                fbest = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 < fbest {
                best = x2;
                fbest = f2;
            }
        }
    }
    (best, fbest)
}
