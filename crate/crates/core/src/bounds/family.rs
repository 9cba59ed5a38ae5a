use num_complex::Complex64;

use crate::numerics::PeriodicGridFunction;
use crate::{Error, Result};

/// A pure-state family `phi -> |psi_phi>` sampled at `phi_j = j L / G`.
///
/// States are stored row-major: `states[j * dim + d]` is component `d` at
/// grid point `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFamily {
    period: f64,
    dim: usize,
    states: Vec<Complex64>,
}

const NORM_TOL: f64 = 1e-8;

impl StateFamily {
    pub fn new(period: f64, dim: usize, states: Vec<Complex64>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive, got {period}"
            )));
        }
        if dim == 0 || !states.len().is_multiple_of(dim) {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes do not split into dimension {dim}",
                states.len()
            )));
        }
        let grid = states.len() / dim;
        if grid < 2 || !grid.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "grid size must be even and at least 2, got {grid}"
            )));
        }
        if let Some(index) = states
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        for row in states.chunks(dim) {
            let total: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            if (total - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized {
                    what: "state",
                    total,
                });
            }
        }
        Ok(Self {
            period,
            dim,
            states,
        })
    }

    /// Samples `f(phi)` at every grid point; each call must return `dim` amplitudes.
    pub fn sample(
        period: f64,
        grid: usize,
        dim: usize,
        f: impl Fn(f64) -> Vec<Complex64>,
    ) -> Result<Self> {
        let h = period / grid as f64;
        let mut states = Vec::with_capacity(grid * dim);
        for j in 0..grid {
            let row = f(j as f64 * h);
            if row.len() != dim {
                return Err(Error::InvalidGrid(format!(
                    "state at grid point {j} has {} components, expected {dim}",
                    row.len()
                )));
            }
            states.extend(row);
        }
        Self::new(period, dim, states)
    }

    /// Unitary encoding `sum_n c_n exp(i 2 pi n phi / L) |n>` for `n = 0..c.len()`.
    pub fn phase_encoded(period: f64, grid: usize, c: &[Complex64]) -> Result<Self> {
        Self::sample(period, grid, c.len(), |phi| {
            c.iter()
                .enumerate()
                .map(|(n, &cn)| {
                    cn * Complex64::from_polar(1.0, std::f64::consts::TAU * n as f64 * phi / period)
                })
                .collect()
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid_len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.grid_len() as f64
    }

    pub fn state(&self, j: usize) -> &[Complex64] {
        &self.states[j * self.dim..(j + 1) * self.dim]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.states
    }

    /// `f(phi) = <psi_0|psi_phi>`.
    pub fn overlap(&self) -> PeriodicGridFunction {
        let psi0 = self.state(0);
        let samples = (0..self.grid_len())
            .map(|j| {
                psi0.iter()
                    .zip(self.state(j))
                    .map(|(a, b)| a.conj() * b)
                    .sum()
            })
            .collect();
        PeriodicGridFunction::new(self.period, samples).expect("grid already validated")
    }

    /// Pure-state quantum Fisher information `4 (<psi'|psi'> - |<psi|psi'>|^2)`
    /// with `psi'` from periodic central differences.
    pub fn quantum_fisher_profile(&self) -> Vec<f64> {
        let g = self.grid_len();
        let h2 = 2.0 * self.spacing();
        (0..g)
            .map(|j| {
                let next = self.state((j + 1) % g);
                let prev = self.state((j + g - 1) % g);
                let psi = self.state(j);
                let mut norm = 0.0;
                let mut inner = Complex64::new(0.0, 0.0);
                for d in 0..self.dim {
                    let dpsi = (next[d] - prev[d]) / h2;
                    norm += dpsi.norm_sqr();
                    inner += psi[d].conj() * dpsi;
                }
                (4.0 * (norm - inner.norm_sqr())).max(0.0)
            })
            .collect()
    }
}
