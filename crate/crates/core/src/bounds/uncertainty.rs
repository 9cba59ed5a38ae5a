use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::{entropy_bits_of, power_density, BITS_PER_NAT};
use crate::{Error, Result};

/// Grid used for the phase distribution of an `(n+1)`-mode state: the next
/// power of two at or above `64 (n + 1)`.
pub fn posterior_grid_size(n: usize) -> usize {
    (64 * (n + 1)).next_power_of_two()
}

/// Both sides of `H(phase) + H(number) >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyCheck {
    pub h_phase: f64,
    pub h_number: f64,
    pub sum: f64,
}

/// Phase entropy is the differential entropy of `p(theta) = |sum_k c_k e^{i 2 pi k theta}|^2`
/// on `[0, 1)`; number entropy is that of `|c_k|^2`.
pub fn entropic_uncertainty_check(c: &[Complex64]) -> Result<UncertaintyCheck> {
    if c.is_empty() {
        return Err(Error::Domain("empty amplitude vector".into()));
    }
    let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized {
            what: "amplitude vector",
            total,
        });
    }
    let g = posterior_grid_size(c.len() - 1);
    let p = power_density(c, g)?;
    let h_phase = -p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
        / g as f64
        * BITS_PER_NAT;
    let weights: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
    let h_number = entropy_bits_of(&weights);
    Ok(UncertaintyCheck {
        h_phase,
        h_number,
        sum: h_phase + h_number,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    #[test]
    fn grid_sizes() {
        assert_eq!(posterior_grid_size(0), 64);
        assert_eq!(posterior_grid_size(3), 256);
        assert_eq!(posterior_grid_size(4), 512);
    }

    #[test]
    fn fock_state_saturates() {
        let r = entropic_uncertainty_check(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        assert!(r.h_phase.abs() < 1e-14 && r.h_number.abs() < 1e-14 && r.sum.abs() < 1e-14);
    }

    #[test]
    fn flat_four_mode_state_matches_fejer_quadrature() {
        // Oracle: direct evaluation of the Fejer kernel sin^2(4 pi t) / (4 sin^2(pi t))
        // with a fine midpoint rule.
        let steps = 400_000;
        let oracle: f64 = (0..steps)
            .map(|i| {
                let t = (i as f64 + 0.5) / steps as f64;
                let p = (2.0 * TAU * t).sin().powi(2) / (4.0 * (0.5 * TAU * t).sin().powi(2));
                if p > 0.0 {
                    -p * p.log2()
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            / steps as f64;
        let r = entropic_uncertainty_check(&[Complex64::new(0.5, 0.0); 4]).unwrap();
        assert!((r.h_number - 2.0).abs() < 1e-14);
        // The posterior grid resolves the kernel zeros to a few 1e-6 bits.
        assert!(
            (r.h_phase - oracle).abs() < 5e-6,
            "{} vs {oracle}",
            r.h_phase
        );
        assert!(r.h_phase >= -2.0 && r.sum >= 0.0);
    }

    #[test]
    fn random_states_satisfy_the_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(0..=64usize);
            let mut c: Vec<Complex64> = (0..=n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            c.iter_mut().for_each(|z| *z /= norm);
            let r = entropic_uncertainty_check(&c).unwrap();
            assert!(r.sum >= -1e-6, "{r:?}");
        }
    }
}
