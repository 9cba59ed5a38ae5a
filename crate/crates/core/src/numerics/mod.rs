//! Periodic quadrature, Fourier spectra and entropy functionals.
//!
//! Integrals over one period use the rectangle rule on a uniform grid, which is
//! exact for trigonometric polynomials below the Nyquist mode and spectrally
//! accurate for smooth periodic integrands.

mod entropy;
mod fourier;
mod gaussian;
mod grid;

pub use entropy::{
    binary_entropy, differential_entropy, entropy_bits_of, shannon_entropy, ProbabilityVector,
};
pub(crate) use fourier::{check_aliasing, forward_dft};
pub use fourier::{fourier_coefficients, fourier_series, power_density, FourierSpectrum, KRange};
pub use gaussian::{
    discrete_gaussian_fit, gaussian_entropy_bound, gaussian_entropy_vs_bound, logspace,
    DiscreteGaussian, SigmaRow,
};
pub use grid::{central_difference, second_difference, PeriodicGridFunction};

/// Default number of grid points per period.
pub const DEFAULT_GRID: usize = 4096;

/// Tolerance below which negative spectral weights are treated as roundoff.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Spectral mass below which the ends of a spectrum are dropped.
pub const TRUNCATION_MASS: f64 = 1e-12;

pub(crate) const BITS_PER_NAT: f64 = std::f64::consts::LOG2_E;
