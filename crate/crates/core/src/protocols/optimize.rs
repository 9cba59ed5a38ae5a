use std::collections::VecDeque;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use super::entangled::{
    entropy_of_samples, fourier_bound_ceiling, posterior_entropy, EntangledState,
};
use crate::bounds::posterior_grid_size;
use crate::{Error, Result};

/// Settings for the posterior-entropy minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once an iteration lowers the entropy by less than this (bits).
    pub tolerance: f64,
    /// Number of curvature pairs kept by the quasi-Newton update.
    pub memory: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            max_iterations: 5000,
            tolerance: 1e-10,
            memory: 10,
        }
    }
}

/// Best state found over all restarts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizedState {
    pub state: EntangledState,
    pub entropy_bits: f64,
    /// `-entropy_bits`, the information under a uniform prior.
    pub mi_bits: f64,
    pub ceiling_bits: f64,
    /// Entropy after every iteration of the winning restart.
    pub trace: Vec<f64>,
    /// Final entropy of each restart, in restart order.
    pub restart_entropies: Vec<f64>,
    /// Whether the winning restart met the tolerance before the iteration cap.
    pub converged: bool,
}

/// Posterior entropy of `x / |x|` and its gradient with respect to `x`.
struct Objective {
    grid: usize,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    ifft: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl Objective {
    fn new(n: usize) -> Self {
        let grid = posterior_grid_size(n);
        let mut planner = FftPlanner::new();
        Self {
            grid,
            fft: planner.plan_fft_forward(grid),
            ifft: planner.plan_fft_inverse(grid),
        }
    }

    fn amplitudes(&self, c: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.grid];
        for (b, &v) in buf.iter_mut().zip(c) {
            *b = Complex64::new(v, 0.0);
        }
        self.ifft.process(&mut buf);
        buf
    }

    fn value(&self, x: &[f64]) -> f64 {
        let c = unit(x);
        let a = self.amplitudes(&c);
        let p: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
        entropy_of_samples(&p)
    }

    /// `dH/dc_k = -(2 / (G ln 2)) Re sum_j (ln p_j + 1) conj(A_j) e^{i 2 pi k j / G}`,
    /// projected onto the tangent space of the sphere and scaled by `1/|x|`.
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let c: Vec<f64> = x.iter().map(|v| v / norm).collect();
        let mut a = self.amplitudes(&c);
        let p: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
        let value = entropy_of_samples(&p);
        for (z, &pj) in a.iter_mut().zip(&p) {
            let w = if pj > 1e-300 { pj.ln() + 1.0 } else { 0.0 };
            *z *= w;
        }
        self.fft.process(&mut a);
        let scale = -2.0 / (self.grid as f64 * LN_2);
        let g: Vec<f64> = (0..c.len()).map(|k| scale * a[k].re).collect();
        let radial: f64 = g.iter().zip(&c).map(|(gi, ci)| gi * ci).sum();
        let grad = g
            .iter()
            .zip(&c)
            .map(|(gi, ci)| (gi - radial * ci) / norm)
            .collect();
        (value, grad)
    }

    /// Central finite differences, used when the analytic gradient is not finite.
    fn numeric_gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|k| {
                let h = 1e-6 * x[k].abs().max(1e-3);
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                (self.value(&xp) - self.value(&xm)) / (2.0 * h)
            })
            .collect()
    }

    fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let (v, g) = self.value_and_gradient(x);
        if g.iter().all(|v| v.is_finite()) {
            (v, g)
        } else {
            (v, self.numeric_gradient(x))
        }
    }
}

fn unit(x: &[f64]) -> Vec<f64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / norm).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct RunResult {
    x: Vec<f64>,
    value: f64,
    trace: Vec<f64>,
    converged: bool,
}

/// Limited-memory BFGS with Armijo backtracking.
fn lbfgs(obj: &Objective, start: Vec<f64>, options: &OptimizeOptions) -> RunResult {
    let mut x = unit(&start);
    let (mut f, mut g) = obj.evaluate(&x);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut trace = vec![f];
    let mut quiet = 0;

    for _ in 0..options.max_iterations {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm < 1e-14 {
            return RunResult {
                x,
                value: f,
                trace,
                converged: true,
            };
        }
        // Two-loop recursion.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|qi| *qi *= gamma);
        } else {
            q.iter_mut().for_each(|qi| *qi /= gnorm);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            history.clear();
            d = g.iter().map(|v| -v / gnorm).collect();
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = obj.evaluate(&trial);
            if ft.is_finite() && ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, ft, gt)) = accepted else {
            // No descent possible along the current model; restart it once.
            if history.is_empty() {
                return RunResult {
                    x,
                    value: f,
                    trace,
                    converged: true,
                };
            }
            history.clear();
            continue;
        };

        // Keep iterates on the sphere so curvature pairs stay comparable.
        let x_new = unit(&trial);
        let (f_new, g_new) = if (dot(&trial, &trial) - 1.0).abs() > 1e-12 {
            obj.evaluate(&x_new)
        } else {
            (ft, gt)
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 {
            history.push_back((s, y, 1.0 / sy));
            if history.len() > options.memory {
                history.pop_front();
            }
        }
        let decrease = f - f_new;
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(f);
        if decrease.abs() < options.tolerance {
            quiet += 1;
            if quiet >= 3 {
                return RunResult {
                    x,
                    value: f,
                    trace,
                    converged: true,
                };
            }
        } else {
            quiet = 0;
        }
    }
    RunResult {
        x,
        value: f,
        trace,
        converged: false,
    }
}

/// Canonical representative under the entropy-preserving symmetries
/// `c -> -c` and `c_k -> (-1)^k c_k`: the one with the largest coefficient sum.
fn fix_sign(c: &[f64]) -> Vec<f64> {
    let alt: Vec<f64> = c
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { *v } else { -v })
        .collect();
    let candidates = [
        c.to_vec(),
        c.iter().map(|v| -v).collect(),
        alt.clone(),
        alt.iter().map(|v| -v).collect(),
    ];
    candidates
        .into_iter()
        .max_by(|a, b| a.iter().sum::<f64>().total_cmp(&b.iter().sum::<f64>()))
        .expect("four candidates")
}

/// Starting point of restart `r`: a half-sine profile for `r = 0`, otherwise
/// absolute Gaussian noise from an independent stream. Nonnegative starts stay
/// clear of the sign-pattern local minima.
fn start_point(n: usize, seed: u64, r: usize) -> Vec<f64> {
    if r == 0 {
        return (0..=n)
            .map(|k| (PI * (k + 1) as f64 / (n + 2) as f64).sin())
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    (0..=n)
        .map(|_| StandardNormal.sample(&mut rng))
        .map(|v: f64| v.abs())
        .collect()
}

/// Minimizes the posterior entropy over real unit vectors `c_0..c_N`.
pub fn optimize_en_state(n: usize, options: &OptimizeOptions) -> Result<OptimizedState> {
    if n == 0 {
        return Err(Error::Domain("need N >= 1".into()));
    }
    if options.restarts == 0 {
        return Err(Error::Domain("need at least one restart".into()));
    }
    let runs: Vec<RunResult> = (0..options.restarts)
        .into_par_iter()
        .map(|r| {
            let obj = Objective::new(n);
            lbfgs(&obj, start_point(n, options.seed, r), options)
        })
        .collect();
    let restart_entropies: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one restart");
    let state = EntangledState::normalized(&fix_sign(&best.x))?;
    let entropy_bits = posterior_entropy(&state);
    Ok(OptimizedState {
        ceiling_bits: fourier_bound_ceiling(&state),
        mi_bits: -entropy_bits,
        entropy_bits,
        state,
        trace: best.trace,
        restart_entropies,
        converged: best.converged,
    })
}
