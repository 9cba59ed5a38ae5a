//! Maximum-entropy spectra under a second-moment constraint.
//!
//! Among weights on the integers with `sum f_k = 1` and `sum k^2 f_k = sigma^2`,
//! the entropy is maximised by the sampled Gaussian
//! `f_k = exp(-k^2 / 2b^2) / (sqrt(2 pi) c)`. Its entropy is compared against
//! the continuous ceiling `1/2 log2(1 + 2 pi e sigma^2)` used by the Fisher
//! bound.

use rayon::prelude::*;
use serde::Serialize;

use super::FourierSpectrum;
use crate::{Error, Result};

/// A discrete Gaussian fitted to a prescribed second moment.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGaussian {
    pub b: f64,
    pub c: f64,
    pub spectrum: FourierSpectrum,
}

impl DiscreteGaussian {
    pub fn entropy_bits(&self) -> f64 {
        self.spectrum.entropy_bits()
    }
}

// Terms beyond |k| = CUTOFF_SIGMAS * b are below 1e-18.
const CUTOFF_SIGMAS: f64 = 9.1;

fn half_width(b: f64) -> i64 {
    (CUTOFF_SIGMAS * b).ceil() as i64 + 1
}

/// Partition sum and unnormalized second moment at width `b`.
fn moments(b: f64) -> (f64, f64) {
    let inv = 1.0 / (2.0 * b * b);
    let mut z = 1.0;
    let mut s = 0.0;
    for k in 1..=half_width(b) {
        let k2 = (k * k) as f64;
        let w = (-k2 * inv).exp();
        if w == 0.0 {
            break;
        }
        z += 2.0 * w;
        s += 2.0 * k2 * w;
    }
    (z, s)
}

fn second_moment(b: f64) -> f64 {
    let (z, s) = moments(b);
    s / z
}

/// Fits the width `b` so that the sampled Gaussian has second moment `sigma2`,
/// by bisection on the increasing map `b -> sum k^2 f_k(b)`.
pub fn discrete_gaussian_fit(sigma2: f64) -> Result<DiscreteGaussian> {
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Domain(format!(
            "sigma^2 must be positive, got {sigma2}"
        )));
    }
    let sigma = sigma2.sqrt();
    let mut lo = (sigma / 10.0).max(1e-6);
    let mut hi = 10.0 * sigma + 10.0;
    if !(second_moment(lo) <= sigma2 && second_moment(hi) >= sigma2) {
        return Err(Error::BracketFailure { sigma2 });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if second_moment(mid) < sigma2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = if (second_moment(lo) - sigma2).abs() <= (second_moment(hi) - sigma2).abs() {
        lo
    } else {
        hi
    };

    let (z, _) = moments(b);
    let kmax = half_width(b);
    let inv = 1.0 / (2.0 * b * b);
    let weights: Vec<f64> = (-kmax..=kmax)
        .map(|k| (-((k * k) as f64) * inv).exp() / z)
        .collect();
    let spectrum = FourierSpectrum::from_weights(-kmax, weights, Some(0.0))?;
    Ok(DiscreteGaussian {
        b,
        c: z / (2.0 * std::f64::consts::PI).sqrt(),
        spectrum,
    })
}

/// `1/2 log2(1 + 2 pi e sigma^2)`.
pub fn gaussian_entropy_bound(sigma2: f64) -> f64 {
    0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * sigma2).ln_1p() * super::BITS_PER_NAT
}

/// One row of the entropy-versus-ceiling scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaRow {
    pub sigma: f64,
    pub entropy_bits: f64,
    pub bound_bits: f64,
    pub margin_bits: f64,
}

/// Entropy of the maximum-entropy spectrum against its continuous ceiling for
/// each `sigma` (not `sigma^2`). Rows keep the input order.
pub fn gaussian_entropy_vs_bound(sigmas: &[f64]) -> Result<Vec<SigmaRow>> {
    sigmas
        .par_iter()
        .map(|&sigma| {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::Domain(format!(
                    "sigma must be positive, got {sigma}"
                )));
            }
            let fit = discrete_gaussian_fit(sigma * sigma)?;
            let entropy_bits = fit.entropy_bits();
            let bound_bits = gaussian_entropy_bound(sigma * sigma);
            Ok(SigmaRow {
                sigma,
                entropy_bits,
                bound_bits,
                margin_bits: bound_bits - entropy_bits,
            })
        })
        .collect()
}

/// `n` points spaced evenly in log between `start` and `stop` inclusive.
pub fn logspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => {
            let (a, b) = (start.log10(), stop.log10());
            (0..n)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
                .collect()
        }
    }
}
