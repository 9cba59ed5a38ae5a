use std::f64::consts::{E, PI};

use serde::Serialize;

use super::model::score_term;
use super::{BoundReport, EstimationModel, FisherProfile, Flag, Method, PriorDensity};
use crate::numerics::{
    central_difference, gaussian_entropy_bound, second_difference, BITS_PER_NAT,
};
use crate::{Error, Result};

/// Source of the Fisher information entering `sigma^2`.
#[derive(Debug, Clone, Copy)]
pub enum FisherInformation<'a> {
    Model(&'a EstimationModel),
    Profile(&'a FisherProfile),
    Constant(f64),
}

/// A jump `|p[i+1] - p[i]|` counts as a discontinuity when it exceeds ten times
/// both neighbouring jumps and is not negligible against `max p`.
fn has_jump(p: &[f64]) -> bool {
    let g = p.len();
    let d: Vec<f64> = (0..g).map(|i| (p[(i + 1) % g] - p[i]).abs()).collect();
    let scale = 1e-3 * p.iter().cloned().fold(0.0, f64::max);
    (0..g).any(|i| {
        let neighbours = d[(i + g - 1) % g].max(d[(i + 1) % g]);
        d[i] > 10.0 * neighbours && d[i] > scale
    })
}

/// `(L^2 / 16 pi^2) integral [p_dot^2 / p + p F]`, or `+inf` when the prior
/// jumps or the Fisher information diverges on the grid.
pub fn sigma_squared(prior: &PriorDensity, info: FisherInformation<'_>) -> Result<f64> {
    let period = prior.period();
    let g = prior.grid_len();
    let p = prior.density_values();
    let h = period / g as f64;

    let check_grid = |len: usize, other: f64| {
        if len != g || (other - period).abs() > 1e-12 * period {
            Err(Error::GridMismatch(format!(
                "prior has {g} points on period {period}, Fisher data {len} on {other}"
            )))
        } else {
            Ok(())
        }
    };
    let fisher: Vec<f64> = match info {
        FisherInformation::Model(m) => {
            check_grid(m.grid_len(), m.period())?;
            m.fisher().values().to_vec()
        }
        FisherInformation::Profile(f) => {
            check_grid(f.len(), f.period())?;
            f.values().to_vec()
        }
        FisherInformation::Constant(f) => {
            if !(f.is_finite() && f >= 0.0) {
                return Err(Error::Domain(format!(
                    "Fisher information must be finite and nonnegative, got {f}"
                )));
            }
            vec![f; g]
        }
    };

    if has_jump(&p) {
        return Ok(f64::INFINITY);
    }
    let d1 = central_difference(&p, h);
    let d2 = second_difference(&p, h);
    let mut integral = 0.0;
    for j in 0..g {
        integral += score_term(p[j], d1[j], d2[j]);
        if p[j] > 0.0 {
            integral += p[j] * fisher[j];
        }
    }
    Ok(period * period / (16.0 * PI * PI) * integral * h)
}

fn report_from_sigma2(sigma2: f64, period: f64, prior_entropy_bits: f64) -> BoundReport {
    let bound = gaussian_entropy_bound(sigma2) - period.log2() + prior_entropy_bits;
    let mut report = BoundReport::new(Method::Fisher, bound, prior_entropy_bits);
    report.sigma2 = Some(sigma2);
    if !sigma2.is_finite() {
        report.flag(Flag::Divergent);
    }
    report
}

/// `1/2 log2(1 + 2 pi e sigma^2) - log2 L + H(phi)`.
pub fn fisher_bound(prior: &PriorDensity, info: FisherInformation<'_>) -> Result<BoundReport> {
    let sigma2 = sigma_squared(prior, info)?;
    Ok(report_from_sigma2(
        sigma2,
        prior.period(),
        prior.entropy_bits(),
    ))
}

/// Uniform prior on `[0, L)` and `n` repetitions of a unit with constant
/// Fisher information `f`: `1/2 log2(1 + e L^2 n f / (8 pi))`.
pub fn fisher_bound_constant(f: f64, n: u64, period: f64) -> Result<BoundReport> {
    if !(f.is_finite() && f >= 0.0) || n == 0 || !(period.is_finite() && period > 0.0) {
        return Err(Error::Domain(format!(
            "need F >= 0, N >= 1, L > 0; got F = {f}, N = {n}, L = {period}"
        )));
    }
    let sigma2 = period * period * n as f64 * f / (16.0 * PI * PI);
    Ok(report_from_sigma2(sigma2, period, period.log2()))
}

/// Asymptotic lower bound `1/2 log2(L^2 N F / (2 pi e))` achieved by maximum
/// likelihood estimation. Negative values are kept and tagged.
pub fn mle_lower_bound(n: u64, f: f64, period: f64) -> Result<BoundReport> {
    if !(f.is_finite() && f > 0.0) || n == 0 || !(period.is_finite() && period > 0.0) {
        return Err(Error::Domain(format!(
            "need F > 0, N >= 1, L > 0; got F = {f}, N = {n}, L = {period}"
        )));
    }
    let bound = 0.5 * (period * period * n as f64 * f / (2.0 * PI * E)).log2();
    let mut report = BoundReport::new(Method::MleLower, bound, period.log2());
    report.flag(Flag::Asymptotic);
    Ok(report)
}

/// The chain `1/2 log2(1 + (e/8pi) F) <= log2(1 + sqrt(e/8pi) sqrt F) <= log2(1 + sqrt F / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompanionBounds {
    pub fisher: f64,
    pub fisher_form: f64,
    pub sqrt_form: f64,
    pub reference_form: f64,
}

impl CompanionBounds {
    pub fn is_ordered(&self) -> bool {
        self.fisher_form <= self.sqrt_form && self.sqrt_form <= self.reference_form
    }
}

pub fn companion_bound_comparison(f: f64) -> Result<CompanionBounds> {
    if !(f.is_finite() && f >= 0.0) {
        return Err(Error::Domain(format!(
            "Fisher information must be finite and nonnegative, got {f}"
        )));
    }
    let a = E / (8.0 * PI);
    Ok(CompanionBounds {
        fisher: f,
        fisher_form: 0.5 * (a * f).ln_1p() * BITS_PER_NAT,
        sqrt_form: (a.sqrt() * f.sqrt()).ln_1p() * BITS_PER_NAT,
        reference_form: (0.5 * f.sqrt()).ln_1p() * BITS_PER_NAT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::logspace;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    const GAP: f64 = 0.442_695_040_888_963_4; // log2(e / 2)

    fn uniform() -> PriorDensity {
        PriorDensity::uniform(1.0, 4096).unwrap()
    }

    #[test]
    fn sigma_squared_of_constant_information() {
        let s = sigma_squared(&uniform(), FisherInformation::Constant(16.0 * PI * PI)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_squared_of_binary_phase_model() {
        let m = EstimationModel::sample(1.0, 4096, 2, |x| {
            vec![(PI * x).cos().powi(2), (PI * x).sin().powi(2)]
        })
        .unwrap();
        let s = sigma_squared(&uniform(), FisherInformation::Model(&m)).unwrap();
        assert!((s - 0.25).abs() < 1e-6);
    }

    #[test]
    fn step_prior_diverges() {
        let prior = PriorDensity::sample(1.0, 1024, |x| if x < 0.5 { 1.5 } else { 0.5 }).unwrap();
        let r = fisher_bound(&prior, FisherInformation::Constant(1.0)).unwrap();
        assert!(r.is_divergent());
        assert_eq!(r.bound_bits, f64::INFINITY);
        assert_eq!(r.sigma2, Some(f64::INFINITY));
    }

    #[test]
    fn smooth_prior_is_not_flagged() {
        let prior = PriorDensity::sample(1.0, 4096, |x| 1.0 + 0.9 * (TAU * x).cos()).unwrap();
        let r = fisher_bound(&prior, FisherInformation::Constant(1.0)).unwrap();
        assert!(!r.is_divergent());
        // Prior term: (1/16 pi^2) integral p_dot^2 / p with p = 1 + a cos, which is
        // (4 pi^2 / 16 pi^2) (1 - sqrt(1 - a^2)) in closed form.
        let a: f64 = 0.9;
        let exact = 0.25 * (1.0 - (1.0 - a * a).sqrt()) + 1.0 / (16.0 * PI * PI);
        assert!((r.sigma2.unwrap() - exact).abs() < 1e-6);
    }

    #[test]
    fn zero_information_gives_zero_bound() {
        let r = fisher_bound(&uniform(), FisherInformation::Constant(0.0)).unwrap();
        assert!(r.bound_bits.abs() < 1e-12);
    }

    #[test]
    fn constant_phase_information_bound() {
        let expect = 0.5 * (1.0 + E * PI / 2.0).log2();
        let r = fisher_bound(&uniform(), FisherInformation::Constant(4.0 * PI * PI)).unwrap();
        assert!((r.bound_bits - expect).abs() < 1e-12);
        assert!((expect - 1.198_883_291_155_852).abs() < 1e-12);
        let c = fisher_bound_constant(4.0 * PI * PI, 1, 1.0).unwrap();
        assert!((c.bound_bits - expect).abs() < 1e-12);
    }

    #[test]
    fn repeated_units_scale_information() {
        let (f, n) = (3.0, 40);
        let r = fisher_bound_constant(f, n, 1.0).unwrap();
        let expect = 0.5 * (1.0 + E / (8.0 * PI) * n as f64 * f).log2();
        assert!((r.bound_bits - expect).abs() < 1e-12);
        let wide = fisher_bound_constant(f, n, 2.0).unwrap();
        assert!(
            (wide.bound_bits - 0.5 * (1.0 + E * 4.0 * n as f64 * f / (8.0 * PI)).log2()).abs()
                < 1e-12
        );
    }

    #[test]
    fn mle_lower_bound_values() {
        let r = mle_lower_bound(1, 2.0 * PI * E, 1.0).unwrap();
        assert!(r.bound_bits.abs() < 1e-14);
        assert!(r.has_flag(Flag::Asymptotic));
        let r = mle_lower_bound(4, 2.0 * PI * E, 1.0).unwrap();
        assert!((r.bound_bits - 1.0).abs() < 1e-14);
        assert!(mle_lower_bound(1, 1.0, 1.0).unwrap().bound_bits < 0.0);
        assert!(mle_lower_bound(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gap_decreases_towards_log_e_over_two() {
        let gap = |nf: f64| {
            fisher_bound_constant(nf, 1, 1.0).unwrap().bound_bits
                - mle_lower_bound(1, nf, 1.0).unwrap().bound_bits
        };
        let grid = logspace(10.0, 1e6, 200);
        for w in grid.windows(2) {
            assert!(gap(w[1]) < gap(w[0]));
        }
        assert!((gap(1e6) - GAP).abs() < 0.01);
        assert!(gap(1e6) > GAP);
    }

    #[test]
    fn companion_chain() {
        let z = companion_bound_comparison(0.0).unwrap();
        assert_eq!(
            (z.fisher_form, z.sqrt_form, z.reference_form),
            (0.0, 0.0, 0.0)
        );
        let c = companion_bound_comparison(100.0).unwrap();
        assert!(c.fisher_form < c.sqrt_form && c.sqrt_form < c.reference_form);
        for f in logspace(1e-2, 1e6, 100) {
            assert!(companion_bound_comparison(f).unwrap().is_ordered());
        }
        assert!(companion_bound_comparison(-1.0).is_err());
    }

    #[test]
    fn rejects_mismatched_profile() {
        let f = FisherProfile::constant(1.0, 64, 1.0).unwrap();
        assert!(matches!(
            sigma_squared(&uniform(), FisherInformation::Profile(&f)),
            Err(Error::GridMismatch(_))
        ));
    }

    proptest! {
        #[test]
        fn companion_chain_is_strict(f in 1e-9f64..1e9) {
            let c = companion_bound_comparison(f).unwrap();
            prop_assert!(c.fisher_form < c.sqrt_form);
            prop_assert!(c.sqrt_form < c.reference_form);
        }
    }
}
