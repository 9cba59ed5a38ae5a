use num_complex::Complex64;
use serde::Serialize;

use super::{BoundReport, CompactPrior, Flag, Method, PriorDensity, StateFamily};
use crate::numerics::{
    check_aliasing, forward_dft, fourier_coefficients, FourierSpectrum, KRange,
    PeriodicGridFunction, TRUNCATION_MASS,
};
use crate::{Error, Result};

/// Spectral mass outside the requested modes above which a report is flagged.
const TAIL_WARNING: f64 = 1e-6;

fn bin(k: i64, g: usize) -> usize {
    k.rem_euclid(g as i64) as usize
}

fn bounds_of(range: KRange, g: usize) -> Result<(i64, i64)> {
    match range {
        KRange::Explicit { min, max } => {
            check_aliasing(g, min, max)?;
            Ok((min, max))
        }
        KRange::Full => Ok((-(g as i64) / 2, g as i64 / 2 - 1)),
    }
}

/// `f_k = (1/L) <psi_k|psi_k>` with `|psi_k> = integral q(phi) e^{-i 2 pi k phi / L} |psi_phi>`.
pub fn state_spectrum(
    family: &StateFamily,
    prior: &PriorDensity,
    range: KRange,
) -> Result<FourierSpectrum> {
    let g = family.grid_len();
    if g != prior.grid_len() || (family.period() - prior.period()).abs() > 1e-12 * prior.period() {
        return Err(Error::GridMismatch(format!(
            "family has {g} points on period {}, prior {} on {}",
            family.period(),
            prior.grid_len(),
            prior.period()
        )));
    }
    let (k_min, k_max) = bounds_of(range, g)?;
    let period = family.period();
    let q = prior.amplitude().samples();
    let dim = family.dim();

    let mut power = vec![0.0; g];
    let mut column = vec![Complex64::new(0.0, 0.0); g];
    for d in 0..dim {
        for (j, x) in column.iter_mut().enumerate() {
            *x = q[j] * family.state(j)[d];
        }
        for (acc, z) in power.iter_mut().zip(forward_dft(&column)) {
            *acc += z.norm_sqr();
        }
    }
    let scale = period / (g * g) as f64;
    let weights = (k_min..=k_max).map(|k| power[bin(k, g)] * scale).collect();
    let mut spectrum = FourierSpectrum::from_weights(k_min, weights, None)?;
    let tail = (1.0 - spectrum.total()).max(0.0);
    spectrum = FourierSpectrum::from_weights(k_min, spectrum.weights().to_vec(), Some(tail))?;
    Ok(spectrum.trimmed(TRUNCATION_MASS))
}

fn report_from_spectrum(
    method: Method,
    spectrum: FourierSpectrum,
    period: f64,
    prior_entropy_bits: f64,
) -> BoundReport {
    let bound = spectrum.entropy_bits() - period.log2() + prior_entropy_bits;
    let mut report = BoundReport::new(method, bound, prior_entropy_bits);
    report.tail_mass_bound = spectrum.tail_mass_bound();
    if report.tail_mass_bound.is_some_and(|t| t > TAIL_WARNING) {
        report.flag(Flag::TailMass);
    }
    report.spectrum = Some(spectrum);
    report
}

/// Fourier bound `-sum f_k log2 f_k - log2 L + H(phi)` of an explicit state family.
pub fn fourier_bound_from_states(
    family: &StateFamily,
    prior: &PriorDensity,
    range: KRange,
) -> Result<BoundReport> {
    let spectrum = state_spectrum(family, prior, range)?;
    Ok(report_from_spectrum(
        Method::Fourier,
        spectrum,
        prior.period(),
        prior.entropy_bits(),
    ))
}

/// Fourier bound of a unitary encoding from its overlap `f(phi) = <psi_0|psi_phi>`.
/// Only valid for a uniform prior.
pub fn fourier_bound_from_overlap(
    f: &PeriodicGridFunction,
    prior: &PriorDensity,
    range: KRange,
) -> Result<BoundReport> {
    if !prior.is_uniform() {
        return Err(Error::NonUniformPrior);
    }
    if (f.period() - prior.period()).abs() > 1e-12 * prior.period() {
        return Err(Error::GridMismatch(format!(
            "overlap period {} but prior period {}",
            f.period(),
            prior.period()
        )));
    }
    let origin = f.samples()[0];
    if (origin - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::Domain(format!(
            "overlap must satisfy f(0) = 1, got {origin}"
        )));
    }
    let spectrum = fourier_coefficients(f, range)?.trimmed(TRUNCATION_MASS);
    Ok(report_from_spectrum(
        Method::Fourier,
        spectrum,
        prior.period(),
        prior.entropy_bits(),
    ))
}

/// Window schedule for the non-periodic bound.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowOptions {
    /// Window lengths as multiples of the prior support, in increasing order.
    pub factors: Vec<usize>,
    /// Two successive windows closer than this count as converged.
    pub tolerance: f64,
    /// Above this final change the computation is a failure rather than a warning.
    pub failure: f64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self {
            factors: vec![4, 8, 16, 32, 64],
            tolerance: 1e-4,
            failure: 1e-3,
        }
    }
}

/// A non-periodic bound together with the value at every window tried.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonperiodicBound {
    pub report: BoundReport,
    /// `(window_length, bound_bits)` pairs.
    pub history: Vec<(f64, f64)>,
}

/// Bound for a prior with finite support: the family is embedded in periodic
/// windows of growing length and the periodic bound is evaluated until two
/// successive windows agree.
///
/// `family(phi)` must return `dim` amplitudes of a normalized state.
pub fn nonperiodic_fourier_bound(
    prior: &CompactPrior,
    dim: usize,
    family: impl Fn(f64) -> Vec<Complex64>,
    options: &WindowOptions,
) -> Result<NonperiodicBound> {
    if options.factors.len() < 2
        || options.factors.windows(2).any(|w| w[1] <= w[0])
        || options.factors[0] < 1
    {
        return Err(Error::Domain(
            "window factors must be increasing and at least two".into(),
        ));
    }
    let n = prior.density().len();
    let h = prior.spacing();
    let mut columns = vec![Vec::with_capacity(n); dim];
    for (phi, &p) in prior.points().zip(prior.density()) {
        let state = family(phi);
        if state.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "state at {phi} has {} components, expected {dim}",
                state.len()
            )));
        }
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized {
                what: "state",
                total: norm,
            });
        }
        let q = p.sqrt();
        for (col, z) in columns.iter_mut().zip(state) {
            col.push(z * q * h);
        }
    }

    let mut history = Vec::with_capacity(options.factors.len());
    let mut last_spectrum = None;
    for &factor in &options.factors {
        let g = n * factor;
        let window = factor as f64 * prior.support_length();
        let mut power = vec![0.0; g];
        let mut buf = vec![Complex64::new(0.0, 0.0); g];
        for col in &columns {
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            buf[..n].copy_from_slice(col);
            for (acc, z) in power.iter_mut().zip(forward_dft(&buf)) {
                *acc += z.norm_sqr() / window;
            }
        }
        let k_min = -(g as i64) / 2;
        let weights = (k_min..g as i64 / 2).map(|k| power[bin(k, g)]).collect();
        let mut spectrum = FourierSpectrum::from_weights(k_min, weights, None)?;
        let tail = (1.0 - spectrum.total()).max(0.0);
        spectrum = FourierSpectrum::from_weights(k_min, spectrum.weights().to_vec(), Some(tail))?;
        let bound = spectrum.entropy_bits() - window.log2() + prior.entropy_bits();
        history.push((window, bound));
        last_spectrum = Some(spectrum);
        if history.len() >= 2 && (bound - history[history.len() - 2].1).abs() < options.tolerance {
            break;
        }
    }

    let spectrum = last_spectrum.expect("at least one window");
    let &(window, _) = history.last().expect("at least one window");
    let change = (history[history.len() - 1].1 - history[history.len() - 2].1).abs();
    let mut report =
        report_from_spectrum(Method::Nonperiodic, spectrum, window, prior.entropy_bits());
    if change >= options.tolerance {
        if change > options.failure {
            return Err(Error::NonConvergence(format!(
                "non-periodic bound changed by {change:.3e} bits at window length {window}"
            )));
        }
        report.flag(Flag::WindowUnconverged);
    }
    Ok(NonperiodicBound { report, history })
}
