use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::{entropy_bits_of, PeriodicGridFunction, HERMITIAN_TOL};
use crate::{Error, Result};

/// Which Fourier modes to extract from a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRange {
    /// Modes `min..=max`. The grid must satisfy `G >= 2 (|min| + |max|) + 2`.
    Explicit { min: i64, max: i64 },
    /// Every DFT bin, labelled `-G/2..G/2`.
    Full,
}

impl KRange {
    pub fn new(min: i64, max: i64) -> Self {
        KRange::Explicit { min, max }
    }
}

/// Nonnegative spectral weights on a contiguous block of integer modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSpectrum {
    k_min: i64,
    weights: Vec<f64>,
    /// `1 - sum(weights)` for a normalized source; `None` when the source
    /// carries no normalization to compare against.
    tail_mass_bound: Option<f64>,
}

impl FourierSpectrum {
    /// Builds a spectrum from raw weights, clipping roundoff negatives above
    /// `-HERMITIAN_TOL` and rejecting anything more negative.
    pub fn from_weights(
        k_min: i64,
        weights: Vec<f64>,
        tail_mass_bound: Option<f64>,
    ) -> Result<Self> {
        let weights = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| clip_weight(k_min + i as i64, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k_min,
            weights,
            tail_mass_bound,
        })
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.weights.len() as i64 - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, k: i64) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        self.weights
            .get((k - self.k_min) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.k_min + i as i64, w))
    }

    pub fn tail_mass_bound(&self) -> Option<f64> {
        self.tail_mass_bound
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `-sum f_k log2 f_k`.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits_of(&self.weights)
    }

    /// `sum k^2 f_k`.
    pub fn second_moment(&self) -> f64 {
        self.iter().map(|(k, w)| (k * k) as f64 * w).sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, w)| k as f64 * w).sum::<f64>() / self.total()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.iter()
            .map(|(k, w)| (k as f64 - mu).powi(2) * w)
            .sum::<f64>()
            / self.total()
    }

    /// Drops modes from both ends while the discarded mass stays below
    /// `threshold`, adding what was dropped to the tail bound.
    pub fn trimmed(&self, threshold: f64) -> Self {
        let mut lo = 0;
        let mut hi = self.weights.len();
        let mut dropped = 0.0;
        while hi - lo > 1 {
            let (left, right) = (self.weights[lo], self.weights[hi - 1]);
            if left <= right && dropped + left < threshold {
                dropped += left;
                lo += 1;
            } else if dropped + right < threshold {
                dropped += right;
                hi -= 1;
            } else if dropped + left < threshold {
                dropped += left;
                lo += 1;
            } else {
                break;
            }
        }
        Self {
            k_min: self.k_min + lo as i64,
            weights: self.weights[lo..hi].to_vec(),
            tail_mass_bound: self.tail_mass_bound.map(|t| t + dropped),
        }
    }
}

fn clip_weight(k: i64, w: f64) -> Result<f64> {
    if !w.is_finite() {
        return Err(Error::NonFinite {
            index: k.unsigned_abs() as usize,
        });
    }
    if w < -HERMITIAN_TOL {
        return Err(Error::NegativeWeight { k, value: w });
    }
    Ok(w.max(0.0))
}

pub(crate) fn forward_dft(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

/// `|sum_k a_k exp(i 2 pi k theta_j)|^2` at `theta_j = j / grid`, by zero-padded
/// inverse DFT. Exact for `grid >= amplitudes.len()`.
pub fn power_density(amplitudes: &[Complex64], grid: usize) -> Result<Vec<f64>> {
    if grid < amplitudes.len() || grid == 0 {
        return Err(Error::GridTooCoarse {
            required: amplitudes.len().max(1),
            actual: grid,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    buf[..amplitudes.len()].copy_from_slice(amplitudes);
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    Ok(buf.iter().map(|z| z.norm_sqr()).collect())
}

fn bin(k: i64, g: usize) -> usize {
    k.rem_euclid(g as i64) as usize
}

/// Complex Fourier coefficients `(1/L) * integral f(phi) exp(-i 2 pi k phi / L)`
/// for `k in k_min..=k_max`, by the rectangle rule.
pub fn fourier_series(f: &PeriodicGridFunction, k_min: i64, k_max: i64) -> Result<Vec<Complex64>> {
    check_aliasing(f.len(), k_min, k_max)?;
    let g = f.len();
    let dft = forward_dft(f.samples());
    Ok((k_min..=k_max).map(|k| dft[bin(k, g)] / g as f64).collect())
}

pub(crate) fn check_aliasing(g: usize, k_min: i64, k_max: i64) -> Result<()> {
    if k_min > k_max {
        return Err(Error::Domain(format!("empty k range {k_min}..={k_max}")));
    }
    let required = 2 * (k_min.unsigned_abs() + k_max.unsigned_abs()) as usize + 2;
    if g < required {
        return Err(Error::GridTooCoarse {
            required,
            actual: g,
        });
    }
    Ok(())
}

/// Spectral weights of an overlap-type function `f(phi) = sum_k f_k e^{i 2 pi k phi / L}`.
///
/// The coefficients of a positive-definite overlap are real and nonnegative;
/// an imaginary part above `1e-8` is rejected. When `f(0) = 1` the spectrum
/// records `1 - sum f_k` over the requested range as its tail bound.
pub fn fourier_coefficients(f: &PeriodicGridFunction, range: KRange) -> Result<FourierSpectrum> {
    let g = f.len();
    let (k_min, k_max) = match range {
        KRange::Explicit { min, max } => {
            check_aliasing(g, min, max)?;
            (min, max)
        }
        KRange::Full => (-(g as i64) / 2, g as i64 / 2 - 1),
    };
    let dft = forward_dft(f.samples());
    let mut weights = Vec::with_capacity((k_max - k_min + 1) as usize);
    for k in k_min..=k_max {
        let c = dft[bin(k, g)] / g as f64;
        if c.im.abs() > 1e-8 * c.re.abs().max(1.0) {
            return Err(Error::ComplexCoefficient { k, imag: c.im });
        }
        weights.push(c.re);
    }
    let origin = f.samples()[0];
    let normalized = (origin.re - 1.0).abs() <= 1e-8 && origin.im.abs() <= 1e-8;
    let mut spectrum = FourierSpectrum::from_weights(k_min, weights, None)?;
    if normalized {
        spectrum.tail_mass_bound = Some((1.0 - spectrum.total()).max(0.0));
    }
    Ok(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn mode(k: f64) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::from_polar(1.0, TAU * k * x)
    }

    #[test]
    fn constant_has_single_mode() {
        let f = PeriodicGridFunction::sample(1.0, 64, |_| Complex64::new(1.0, 0.0)).unwrap();
        let s = fourier_coefficients(&f, KRange::new(-5, 5)).unwrap();
        assert_eq!(s.weight(0), 1.0);
        for k in -5..=5 {
            if k != 0 {
                assert!(s.weight(k).abs() < 1e-15);
            }
        }
        assert!(s.tail_mass_bound().unwrap() < 1e-15);
    }

    #[test]
    fn one_qubit_overlap_splits_evenly() {
        let m1 = mode(1.0);
        let f = PeriodicGridFunction::sample(1.0, 64, |x| 0.5 + 0.5 * m1(x)).unwrap();
        let s = fourier_coefficients(&f, KRange::new(-3, 3)).unwrap();
        assert!((s.weight(0) - 0.5).abs() < 1e-15);
        assert!((s.weight(1) - 0.5).abs() < 1e-15);
        assert!((s.entropy_bits() - 1.0).abs() < 1e-14);
    }

    // Coefficients of prod_j (1 - w_j + w_j z^{2^j}) by explicit polynomial
    // multiplication.
    fn expand_product(ws: &[f64]) -> Vec<f64> {
        let mut poly = vec![1.0];
        for (j, &w) in ws.iter().enumerate() {
            let shift = 1usize << j;
            let mut next = vec![0.0; poly.len() + shift];
            for (i, &c) in poly.iter().enumerate() {
                next[i] += c * (1.0 - w);
                next[i + shift] += c * w;
            }
            poly = next;
        }
        poly
    }

    #[test]
    fn dephasing_overlap_matches_polynomial_expansion() {
        let eta: f64 = 0.9;
        let ws: Vec<f64> = (0..3).map(|j| eta.powi(1 << (j + 1)) / 2.0).collect();
        let oracle = expand_product(&ws);
        assert_eq!(oracle.len(), 8);
        let f = PeriodicGridFunction::sample(1.0, 64, |x| {
            ws.iter()
                .enumerate()
                .map(|(j, &w)| Complex64::new(1.0 - w, 0.0) + w * mode((1 << j) as f64)(x))
                .product()
        })
        .unwrap();
        let s = fourier_coefficients(&f, KRange::new(0, 7)).unwrap();
        for (k, &c) in oracle.iter().enumerate() {
            assert!((s.weight(k as i64) - c).abs() < 1e-14, "k={k}");
        }
        assert!(s.tail_mass_bound().unwrap() < 1e-13);
    }

    #[test]
    fn aliasing_precondition_is_enforced() {
        let f = PeriodicGridFunction::sample(1.0, 16, |_| Complex64::new(1.0, 0.0)).unwrap();
        let err = fourier_coefficients(&f, KRange::new(0, 8)).unwrap_err();
        assert_eq!(
            err,
            Error::GridTooCoarse {
                required: 18,
                actual: 16
            }
        );
        assert!(fourier_coefficients(&f, KRange::new(0, 7)).is_ok());
    }

    #[test]
    fn exact_on_trig_polynomials_below_nyquist() {
        let g = 32;
        let coeffs = [(0i64, 0.2), (3, 0.1), (-4, 0.3), (14, 0.15), (-14, 0.25)];
        let f = PeriodicGridFunction::sample(1.0, g, |x| {
            coeffs.iter().map(|&(k, c)| c * mode(k as f64)(x)).sum()
        })
        .unwrap();
        let s = fourier_coefficients(&f, KRange::Full).unwrap();
        for &(k, c) in &coeffs {
            assert!((s.weight(k) - c).abs() < 1e-12);
        }
        assert!((s.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_spectra() {
        let f = PeriodicGridFunction::sample(1.0, 16, |x| Complex64::new(0.0, 1.0) * mode(1.0)(x))
            .unwrap();
        assert!(matches!(
            fourier_coefficients(&f, KRange::new(0, 3)),
            Err(Error::ComplexCoefficient { k: 1, .. })
        ));
        let f = PeriodicGridFunction::sample(1.0, 16, |x| 1.2 - 0.2 * mode(1.0)(x)).unwrap();
        assert!(matches!(
            fourier_coefficients(&f, KRange::new(0, 3)),
            Err(Error::NegativeWeight { k: 1, .. })
        ));
    }

    #[test]
    fn unnormalized_source_has_no_tail_bound() {
        let f = PeriodicGridFunction::sample(1.0, 16, |_| Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(
            fourier_coefficients(&f, KRange::new(0, 1))
                .unwrap()
                .tail_mass_bound(),
            None
        );
    }

    #[test]
    fn trimming_drops_only_negligible_mass() {
        let s =
            FourierSpectrum::from_weights(-2, vec![1e-14, 0.5, 0.5 - 2e-14, 1e-14, 0.0], Some(0.0))
                .unwrap();
        let t = s.trimmed(1e-12);
        assert_eq!(t.k_min(), -1);
        assert_eq!(t.k_max(), 0);
        assert!((t.tail_mass_bound().unwrap() - 2e-14).abs() < 1e-20);
    }

    #[test]
    fn power_density_is_fejer_kernel_for_flat_amplitudes() {
        let n = 4;
        let a = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
        let g = 64;
        let p = power_density(&a, g).unwrap();
        for (j, pj) in p.iter().enumerate().skip(1) {
            let t = std::f64::consts::PI * j as f64 / g as f64;
            let fejer = ((n as f64 * t).sin() / t.sin()).powi(2) / n as f64;
            assert!((pj - fejer).abs() < 1e-12);
        }
        assert!((p[0] - n as f64).abs() < 1e-12);
        assert!(power_density(&a, 3).is_err());
    }

    #[test]
    fn series_returns_complex_coefficients() {
        let f = PeriodicGridFunction::sample(1.0, 16, |x| Complex64::new(0.0, 2.0) * mode(-2.0)(x))
            .unwrap();
        let c = fourier_series(&f, -2, 2).unwrap();
        assert!((c[0] - Complex64::new(0.0, 2.0)).norm() < 1e-14);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-14));
    }
}
