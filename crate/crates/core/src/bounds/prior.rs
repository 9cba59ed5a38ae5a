use num_complex::Complex64;

use crate::numerics::{differential_entropy, PeriodicGridFunction, BITS_PER_NAT};
use crate::{Error, Result};

/// Prior density `p(phi)` on one period together with an amplitude `q(phi)`
/// satisfying `|q|^2 = p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorDensity {
    density: PeriodicGridFunction,
    amplitude: PeriodicGridFunction,
    entropy_bits: f64,
}

impl PriorDensity {
    /// `p = 1/L` with `q = 1/sqrt(L)`.
    pub fn uniform(period: f64, grid: usize) -> Result<Self> {
        let density = PeriodicGridFunction::from_real(period, vec![1.0 / period; grid])?;
        Self::from_density(density)
    }

    /// A real nonnegative density, with the default amplitude `q = sqrt(p)`.
    pub fn from_density(density: PeriodicGridFunction) -> Result<Self> {
        if density.max_imag() > 1e-12 {
            return Err(Error::Domain("prior density must be real".into()));
        }
        let amplitude = PeriodicGridFunction::new(
            density.period(),
            density
                .samples()
                .iter()
                .map(|z| Complex64::new(z.re.max(0.0).sqrt(), 0.0))
                .collect(),
        )?;
        let entropy_bits = differential_entropy(&density)?;
        Ok(Self {
            density,
            amplitude,
            entropy_bits,
        })
    }

    /// Any complex amplitude; the density is `|q|^2`.
    pub fn from_amplitude(amplitude: PeriodicGridFunction) -> Result<Self> {
        let density = PeriodicGridFunction::from_real(
            amplitude.period(),
            amplitude.samples().iter().map(|z| z.norm_sqr()).collect(),
        )?;
        let entropy_bits = differential_entropy(&density)?;
        Ok(Self {
            density,
            amplitude,
            entropy_bits,
        })
    }

    pub fn sample(period: f64, grid: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_density(PeriodicGridFunction::sample_real(period, grid, f)?)
    }

    pub fn period(&self) -> f64 {
        self.density.period()
    }

    pub fn grid_len(&self) -> usize {
        self.density.len()
    }

    pub fn density(&self) -> &PeriodicGridFunction {
        &self.density
    }

    pub fn density_values(&self) -> Vec<f64> {
        self.density.real_parts()
    }

    pub fn amplitude(&self) -> &PeriodicGridFunction {
        &self.amplitude
    }

    /// `H(phi) = -integral p log2 p`.
    pub fn entropy_bits(&self) -> f64 {
        self.entropy_bits
    }

    pub fn is_uniform(&self) -> bool {
        let target = 1.0 / self.period();
        self.density
            .samples()
            .iter()
            .all(|z| (z.re - target).abs() <= 1e-9 * target)
    }
}

/// A prior with finite support `[lower, upper)`, sampled at the midpoints
/// `lower + (j + 1/2) h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactPrior {
    lower: f64,
    spacing: f64,
    density: Vec<f64>,
    entropy_bits: f64,
}

impl CompactPrior {
    pub fn sample(lower: f64, upper: f64, points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && upper > lower) || points < 2 {
            return Err(Error::Domain(format!(
                "bad support [{lower}, {upper}) with {points} points"
            )));
        }
        let spacing = (upper - lower) / points as f64;
        let density: Vec<f64> = (0..points)
            .map(|j| f(lower + (j as f64 + 0.5) * spacing))
            .collect();
        if let Some(index) = density.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(&v) = density.iter().find(|&&v| v < 0.0) {
            return Err(Error::Domain(format!("negative density value {v}")));
        }
        let total: f64 = density.iter().sum::<f64>() * spacing;
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized {
                what: "prior density",
                total,
            });
        }
        let entropy_bits = density
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| -v * v.ln())
            .sum::<f64>()
            * spacing
            * BITS_PER_NAT;
        Ok(Self {
            lower,
            spacing,
            density,
            entropy_bits,
        })
    }

    /// Normal density with standard deviation `std`, truncated to
    /// `mean ± cutoff * std` and renormalized.
    pub fn truncated_gaussian(mean: f64, std: f64, cutoff: f64, points: usize) -> Result<Self> {
        let (lower, upper) = (mean - cutoff * std, mean + cutoff * std);
        let h = (upper - lower) / points as f64;
        let raw = |x: f64| (-(x - mean).powi(2) / (2.0 * std * std)).exp();
        let z: f64 = (0..points)
            .map(|j| raw(lower + (j as f64 + 0.5) * h))
            .sum::<f64>()
            * h;
        Self::sample(lower, upper, points, |x| raw(x) / z)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.lower + self.spacing * self.density.len() as f64
    }

    pub fn support_length(&self) -> f64 {
        self.upper() - self.lower
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.density.len()).map(move |j| self.lower + (j as f64 + 0.5) * self.spacing)
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn entropy_bits(&self) -> f64 {
        self.entropy_bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn uniform_prior_entropy_is_log_period() {
        let p = PriorDensity::uniform(4.0, 64).unwrap();
        assert!((p.entropy_bits() - 2.0).abs() < 1e-14);
        assert!(p.is_uniform());
    }

    #[test]
    fn default_amplitude_squares_to_density() {
        let p = PriorDensity::sample(1.0, 128, |x| 1.0 + 0.5 * (TAU * x).cos()).unwrap();
        for (q, d) in p.amplitude().samples().iter().zip(p.density().samples()) {
            assert!((q.norm_sqr() - d.re).abs() < 1e-10);
        }
        assert!(!p.is_uniform());
    }

    #[test]
    fn complex_amplitude_is_accepted() {
        let q =
            PeriodicGridFunction::sample(1.0, 64, |x| Complex64::from_polar(1.0, TAU * 3.0 * x))
                .unwrap();
        let p = PriorDensity::from_amplitude(q).unwrap();
        assert!(p.is_uniform());
    }

    #[test]
    fn unnormalized_prior_is_rejected() {
        assert!(PriorDensity::sample(1.0, 64, |_| 2.0).is_err());
        assert!(CompactPrior::sample(0.0, 1.0, 64, |_| 2.0).is_err());
    }

    #[test]
    fn truncated_gaussian_entropy_matches_closed_form() {
        let s = 0.1;
        let p = CompactPrior::truncated_gaussian(0.0, s, 8.0, 800).unwrap();
        let exact = 0.5 * (TAU * std::f64::consts::E * s * s).log2();
        assert!((p.entropy_bits() - exact).abs() < 1e-9);
        assert!((p.support_length() - 1.6).abs() < 1e-12);
    }
}
