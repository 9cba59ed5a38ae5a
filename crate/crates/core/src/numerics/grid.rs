use num_complex::Complex64;

use crate::{Error, Result};

/// Complex samples of a function on the uniform periodic grid
/// `phi_j = j * period / G`, `j = 0..G`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGridFunction {
    period: f64,
    samples: Vec<Complex64>,
}

impl PeriodicGridFunction {
    pub fn new(period: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive, got {period}"
            )));
        }
        let g = samples.len();
        if g < 2 || !g.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "grid size must be even and >= 2, got {g}"
            )));
        }
        if let Some(index) = samples
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { period, samples })
    }

    pub fn from_real(period: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(
            period,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Samples `f` at the grid points.
    pub fn sample(period: f64, grid: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = period / grid as f64;
        Self::new(period, (0..grid).map(|j| f(j as f64 * h)).collect())
    }

    pub fn sample_real(period: f64, grid: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::sample(period, grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.samples.len() as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    /// Largest absolute imaginary part over the grid.
    pub fn max_imag(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Rectangle-rule integral over one period.
    pub fn integral(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * self.spacing()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len() && (self.period - other.period).abs() <= 1e-12 * self.period
    }
}

/// Second-order central difference of periodic samples with spacing `h`.
pub fn central_difference(values: &[f64], h: f64) -> Vec<f64> {
    let g = values.len();
    (0..g)
        .map(|i| (values[(i + 1) % g] - values[(i + g - 1) % g]) / (2.0 * h))
        .collect()
}

/// Second-order central second difference of periodic samples with spacing `h`.
pub fn second_difference(values: &[f64], h: f64) -> Vec<f64> {
    let g = values.len();
    (0..g)
        .map(|i| (values[(i + 1) % g] - 2.0 * values[i] + values[(i + g - 1) % g]) / (h * h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_tiny_grids() {
        assert!(PeriodicGridFunction::from_real(1.0, vec![1.0; 3]).is_err());
        assert!(PeriodicGridFunction::from_real(1.0, vec![1.0]).is_err());
        assert!(PeriodicGridFunction::from_real(0.0, vec![1.0; 4]).is_err());
        assert!(PeriodicGridFunction::from_real(1.0, vec![1.0; 4]).is_ok());
    }

    #[test]
    fn rejects_non_finite_samples() {
        let err = PeriodicGridFunction::from_real(1.0, vec![1.0, f64::NAN, 0.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::NonFinite { index: 1 });
    }

    #[test]
    fn rectangle_rule_is_exact_on_trig_polynomials() {
        let f = PeriodicGridFunction::sample_real(2.0, 16, |x| {
            1.0 + (std::f64::consts::PI * x).cos() + 0.3 * (3.0 * std::f64::consts::PI * x).sin()
        })
        .unwrap();
        assert!((f.integral().re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn central_difference_of_sine() {
        let g = 1024;
        let h = 1.0 / g as f64;
        let tau = std::f64::consts::TAU;
        let v: Vec<f64> = (0..g).map(|j| (tau * j as f64 * h).sin()).collect();
        let d = central_difference(&v, h);
        for (j, dj) in d.iter().enumerate() {
            let exact = tau * (tau * j as f64 * h).cos();
            assert!((dj - exact).abs() < 1e-3 * tau);
        }
    }
}
