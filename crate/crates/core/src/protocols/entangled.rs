use num_complex::Complex64;
use serde::Serialize;

use crate::bounds::posterior_grid_size;
use crate::numerics::{entropy_bits_of, power_density, PeriodicGridFunction, BITS_PER_NAT};
use crate::{Error, Result};

/// Real amplitudes `c_0..c_N` of an `N`-call entangled input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntangledState {
    c: Vec<f64>,
}

impl EntangledState {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Domain("state needs at least one amplitude".into()));
        }
        if let Some(index) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let total: f64 = c.iter().map(|v| v * v).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized {
                what: "entangled state",
                total,
            });
        }
        Ok(Self { c })
    }

    /// Rescales `x` to unit norm.
    pub fn normalized(x: &[f64]) -> Result<Self> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Self::new(x.iter().map(|v| v / norm).collect())
    }

    /// Equal weights `1 / sqrt(N + 1)`.
    pub fn uniform(n: usize) -> Self {
        Self {
            c: vec![1.0 / ((n + 1) as f64).sqrt(); n + 1],
        }
    }

    /// All weight on `|k>`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Domain(format!("basis index {k} exceeds N = {n}")));
        }
        let mut c = vec![0.0; n + 1];
        c[k] = 1.0;
        Ok(Self { c })
    }

    /// Number of phase-gate calls, `N`.
    pub fn n(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// `|c_k|^2`.
    pub fn weights(&self) -> Vec<f64> {
        self.c.iter().map(|v| v * v).collect()
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.c.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }
}

/// Density of the estimation error `theta` on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantPosterior {
    pub density: PeriodicGridFunction,
    pub entropy_bits: f64,
}

pub(crate) fn entropy_of_samples(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
        / p.len() as f64
        * BITS_PER_NAT
}

/// `p(theta) = |sum_k c_k e^{i 2 pi k theta}|^2` on `grid` points, which must be at least `8 (N + 1)`.
pub fn covariant_posterior(state: &EntangledState, grid: usize) -> Result<CovariantPosterior> {
    let required = 8 * (state.n() + 1);
    if grid < required || !grid.is_multiple_of(2) {
        return Err(Error::GridTooCoarse {
            required,
            actual: grid,
        });
    }
    let p = power_density(&state.amplitudes(), grid)?;
    let entropy_bits = entropy_of_samples(&p);
    Ok(CovariantPosterior {
        density: PeriodicGridFunction::from_real(1.0, p)?,
        entropy_bits,
    })
}

/// `H(theta)` in bits on the default posterior grid.
pub fn posterior_entropy(state: &EntangledState) -> f64 {
    let g = posterior_grid_size(state.n());
    let p = power_density(&state.amplitudes(), g).expect("grid exceeds the mode count");
    entropy_of_samples(&p)
}

/// `-sum_k c_k^2 log2 c_k^2`, the Fourier bound for this input.
pub fn fourier_bound_ceiling(state: &EntangledState) -> f64 {
    entropy_bits_of(&state.weights())
}
