//! Covariant measurements built from two seeds `|chi_1> = sum a_n |n>` and
//! `|chi_2> = sum b_n |n>` with `|a_n|^2 + |b_n|^2 = 1`, compared with the
//! single seed `sum_n |n>`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{optimize_en_state, EntangledState, OptimizeOptions};
use crate::numerics::{power_density, BITS_PER_NAT};
use crate::{Error, Result};

/// Slack allowed in the inequalities checked by the experiment.
const SLACK: f64 = 1e-9;

/// Two seeds and the input state they measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedPair {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    base: Vec<Complex64>,
}

impl SeedPair {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>, base: Vec<Complex64>) -> Result<Self> {
        if a.len() != b.len() || a.len() != base.len() || a.is_empty() {
            return Err(Error::Domain(format!(
                "seed lengths {} and {} must match the base state length {}",
                a.len(),
                b.len(),
                base.len()
            )));
        }
        for (index, (x, y)) in a.iter().zip(&b).enumerate() {
            let total = x.norm_sqr() + y.norm_sqr();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidSeedPair { index, total });
            }
        }
        let norm: f64 = base.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized {
                what: "base state",
                total: norm,
            });
        }
        Ok(Self { a, b, base })
    }

    /// `a = 1, b = 0`: the single seed written as a degenerate pair.
    pub fn single(base: Vec<Complex64>) -> Result<Self> {
        let n = base.len();
        Self::new(
            vec![Complex64::new(1.0, 0.0); n],
            vec![Complex64::new(0.0, 0.0); n],
            base,
        )
    }

    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn base(&self) -> &[Complex64] {
        &self.base
    }
}

/// Outcome of one two-seed comparison. Informations are in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSeedReport {
    pub n: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Largest deviation of `lambda_i(phi)` from its mean over the grid.
    pub lambda_spread: f64,
    /// Single seed `sum_n |n>`.
    pub i_single: f64,
    /// Both seeds with the label `i` discarded.
    pub i_merged: f64,
    pub i_seed1: f64,
    pub i_seed2: f64,
    /// `lambda1 I_1 + lambda2 I_2`, the label `i` kept.
    pub i_split: f64,
    /// `I_merged <= I_single`.
    pub always_ok: bool,
    /// `I_single < I_split`: the pair beats the single seed.
    pub wonder_violated: bool,
    /// `I_merged <= I_split`.
    pub convex_ok: bool,
}

/// `I = h^2 sum_ij J log2(J / (J_x J_y))` for a joint density `J` sampled on a
/// `grid x grid` torus (row-major, first index `phi`), normalized to unit mass.
pub fn joint_mutual_information(joint: &[f64], grid: usize) -> Result<f64> {
    if joint.len() != grid * grid || grid == 0 {
        return Err(Error::InvalidGrid(format!(
            "{} samples for a {grid} x {grid} grid",
            joint.len()
        )));
    }
    let h = 1.0 / grid as f64;
    let mass: f64 = joint.iter().sum::<f64>() * h * h;
    if (mass - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized {
            what: "joint density",
            total: mass,
        });
    }
    let mut row = vec![0.0; grid];
    let mut col = vec![0.0; grid];
    for i in 0..grid {
        for j in 0..grid {
            let v = joint[i * grid + j];
            row[i] += v * h;
            col[j] += v * h;
        }
    }
    let mut nats = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let v = joint[i * grid + j];
            if v > 0.0 {
                nats += v * (v / (row[i] * col[j])).ln();
            }
        }
    }
    Ok(nats * h * h * BITS_PER_NAT)
}

/// `q(phi_est | phi) = |sum_n conj(s_n) c_n e^{i 2 pi n (phi - phi_est)}|^2` on
/// the torus, together with the spread of its row integrals.
fn seed_joint(seed: &[Complex64], base: &[Complex64], grid: usize) -> Result<(Vec<f64>, f64, f64)> {
    let d: Vec<Complex64> = seed.iter().zip(base).map(|(s, c)| s.conj() * c).collect();
    let g = power_density(&d, grid)?;
    let mut joint = vec![0.0; grid * grid];
    for i in 0..grid {
        for j in 0..grid {
            joint[i * grid + j] = g[(i + grid - j) % grid];
        }
    }
    let h = 1.0 / grid as f64;
    let rows: Vec<f64> = joint
        .chunks(grid)
        .map(|r| r.iter().sum::<f64>() * h)
        .collect();
    let mean = rows.iter().sum::<f64>() / grid as f64;
    let spread = rows.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
    Ok((joint, mean, spread))
}

fn normalized_mi(joint: &[f64], lambda: f64, grid: usize) -> Result<f64> {
    if lambda < 1e-15 {
        return Ok(0.0);
    }
    let scaled: Vec<f64> = joint.iter().map(|v| v / lambda).collect();
    joint_mutual_information(&scaled, grid)
}

/// Evaluates all informations of the two-seed comparison under a uniform prior
/// by quadrature on a `grid x grid` torus; `grid >= 8 (N + 1)`.
pub fn two_seed_experiment(pair: &SeedPair, grid: usize) -> Result<TwoSeedReport> {
    let required = 8 * (pair.n() + 1);
    if grid < required {
        return Err(Error::GridTooCoarse {
            required,
            actual: grid,
        });
    }
    let ones = vec![Complex64::new(1.0, 0.0); pair.n() + 1];
    let (single, _, _) = seed_joint(&ones, &pair.base, grid)?;
    let (j1, lambda1, spread1) = seed_joint(&pair.a, &pair.base, grid)?;
    let (j2, lambda2, spread2) = seed_joint(&pair.b, &pair.base, grid)?;
    let merged: Vec<f64> = j1.iter().zip(&j2).map(|(x, y)| x + y).collect();

    let i_single = joint_mutual_information(&single, grid)?;
    let i_merged = joint_mutual_information(&merged, grid)?;
    let i_seed1 = normalized_mi(&j1, lambda1, grid)?;
    let i_seed2 = normalized_mi(&j2, lambda2, grid)?;
    let term = |lambda: f64, i: f64| if lambda < 1e-15 { 0.0 } else { lambda * i };
    let i_split = term(lambda1, i_seed1) + term(lambda2, i_seed2);
    Ok(TwoSeedReport {
        n: pair.n(),
        lambda1,
        lambda2,
        lambda_spread: spread1.max(spread2),
        i_single,
        i_merged,
        i_seed1,
        i_seed2,
        i_split,
        always_ok: i_merged <= i_single + SLACK,
        wonder_violated: i_single < i_split - SLACK,
        convex_ok: i_merged <= i_split + SLACK,
    })
}

/// How the random seed `a` is drawn; `b_n = sqrt(1 - |a_n|^2)` times a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStyle {
    /// `a_n` uniform in `[0, 1]`, `b_n >= 0`.
    Real,
    /// Random signs on both `a_n` and `b_n`.
    Signed,
    /// Uniform random phases on both seeds.
    Complex,
}

/// Input state measured by the seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseState {
    Uniform,
    /// The minimum-entropy state for this `N`.
    Optimized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOptions {
    pub trials: usize,
    pub seed: u64,
    pub grid: usize,
    pub n_values: Vec<usize>,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            trials: 120,
            seed: 0,
            grid: 256,
            n_values: vec![2, 3, 4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSeedTrial {
    pub index: usize,
    pub style: PairStyle,
    pub base: BaseState,
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    pub report: TwoSeedReport,
}

fn random_pair(
    n: usize,
    style: PairStyle,
    base: &[Complex64],
    rng: &mut ChaCha8Rng,
) -> Result<SeedPair> {
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let u: f64 = rng.random_range(0.0..=1.0);
        let v = (1.0 - u * u).max(0.0).sqrt();
        let (pa, pb) = match style {
            PairStyle::Real => (0.0, 0.0),
            PairStyle::Signed => (
                if rng.random_bool(0.5) {
                    std::f64::consts::PI
                } else {
                    0.0
                },
                if rng.random_bool(0.5) {
                    std::f64::consts::PI
                } else {
                    0.0
                },
            ),
            PairStyle::Complex => (
                rng.random_range(0.0..std::f64::consts::TAU),
                rng.random_range(0.0..std::f64::consts::TAU),
            ),
        };
        a.push(Complex64::from_polar(u, pa));
        b.push(Complex64::from_polar(v, pb));
    }
    SeedPair::new(a, b, base.to_vec())
}

/// Random seed pairs cycling through `n_values`, pair styles and base states.
/// Trial `t` draws from its own RNG stream, so results do not depend on
/// thread scheduling.
pub fn run_two_seed_trials(options: &TrialOptions) -> Result<Vec<TwoSeedTrial>> {
    if options.n_values.is_empty() {
        return Err(Error::Domain("no N values given".into()));
    }
    let styles = [PairStyle::Real, PairStyle::Signed, PairStyle::Complex];
    let bases = [BaseState::Uniform, BaseState::Optimized];
    let optimized: Vec<(usize, Vec<Complex64>)> = options
        .n_values
        .iter()
        .map(|&n| {
            let opt = optimize_en_state(
                n,
                &OptimizeOptions {
                    seed: options.seed,
                    ..Default::default()
                },
            )?;
            Ok((n, opt.state.amplitudes()))
        })
        .collect::<Result<_>>()?;

    (0..options.trials)
        .into_par_iter()
        .map(|t| {
            let n = options.n_values[t % options.n_values.len()];
            let style = styles[(t / options.n_values.len()) % styles.len()];
            let base = bases[(t / (options.n_values.len() * styles.len())) % bases.len()];
            let base_amps = match base {
                BaseState::Uniform => EntangledState::uniform(n).amplitudes(),
                BaseState::Optimized => optimized
                    .iter()
                    .find(|(m, _)| *m == n)
                    .expect("optimized for every N")
                    .1
                    .clone(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(t as u64);
            let pair = random_pair(n, style, &base_amps, &mut rng)?;
            let report = two_seed_experiment(&pair, options.grid)?;
            let flat = |v: &[Complex64]| v.iter().map(|z| [z.re, z.im]).collect();
            Ok(TwoSeedTrial {
                index: t,
                style,
                base,
                a: flat(pair.a()),
                b: flat(pair.b()),
                report,
            })
        })
        .collect()
}
