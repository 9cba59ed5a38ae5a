use super::{PeriodicGridFunction, BITS_PER_NAT};
use crate::{Error, Result};

/// A discrete probability distribution, optionally labelled by integers.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    weights: Vec<f64>,
    labels: Option<Vec<i64>>,
}

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(&w) = weights.iter().find(|&&w| w < 0.0) {
            return Err(Error::Domain(format!("negative probability {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized {
                what: "probability vector",
                total,
            });
        }
        Ok(Self {
            weights,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.weights.len() {
            return Err(Error::Domain(format!(
                "{} labels for {} weights",
                labels.len(),
                self.weights.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// `|c_k|^2` of a normalized amplitude vector.
    pub fn from_amplitudes<'a>(
        amplitudes: impl IntoIterator<Item = &'a num_complex::Complex64>,
    ) -> Result<Self> {
        Self::new(amplitudes.into_iter().map(|c| c.norm_sqr()).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }
}

/// `-sum w log2 w` with `0 log 0 = 0`, without a normalization check.
pub fn entropy_bits_of(weights: &[f64]) -> f64 {
    let nats: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.ln())
        .sum();
    // `+ 0.0` turns the -0.0 of a point mass into 0.0.
    nats * BITS_PER_NAT + 0.0
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    entropy_bits_of(&p.weights).max(0.0)
}

/// `H_bin(x) = -x log2 x - (1 - x) log2 (1 - x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "binary entropy argument {x} outside [0, 1]"
        )));
    }
    Ok(entropy_bits_of(&[x, 1.0 - x]))
}

/// Differential entropy `-integral p log2 p` of a density sampled on one
/// period, by the rectangle rule.
pub fn differential_entropy(density: &PeriodicGridFunction) -> Result<f64> {
    if density.max_imag() > 1e-12 {
        return Err(Error::Domain("density has an imaginary part".into()));
    }
    let values = density.real_parts();
    if let Some(&v) = values.iter().find(|&&v| v < 0.0) {
        return Err(Error::Domain(format!("negative density value {v}")));
    }
    let h = density.spacing();
    let total: f64 = values.iter().sum::<f64>() * h;
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized {
            what: "density",
            total,
        });
    }
    let nats: f64 = values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .sum::<f64>()
        * h;
    Ok(nats * BITS_PER_NAT + 0.0)
}
