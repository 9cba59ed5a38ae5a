pub mod bound;
pub mod check;
pub mod figure;
pub mod optimize;
pub mod two_seed;

use anyhow::{bail, Result};

pub(crate) fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        bail!("--{name} must be a positive number, got {v}");
    }
    Ok(v)
}

pub(crate) fn unit_interval(name: &str, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        bail!("--{name} must lie in [0, 1], got {v}");
    }
    Ok(v)
}

pub(crate) fn at_least(name: &str, v: usize, min: usize) -> Result<usize> {
    if v < min {
        bail!("--{name} must be at least {min}, got {v}");
    }
    Ok(v)
}
