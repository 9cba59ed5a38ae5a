//! Upper and lower bounds on the mutual information returned by
//! parameter-estimation strategies.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: periodic grids, Fourier spectra, entropy functionals and the
//!   discrete-Gaussian maximum-entropy solver.
//! - [`bounds`]: the Fourier bound (spectrum of a prior-weighted state family),
//!   the Fisher bound, the non-periodic window extension, the asymptotic
//!   maximum-likelihood lower bound and the companion square-root bound.
//! - [`channels`]: noisy phase-estimation circuits under dephasing, amplitude
//!   damping and erasure, with closed-form and numeric Holevo-type ceilings.
//! - [`qpe`]: repeated phase-estimation blocks, quantum-enhancement curves and
//!   block-size selection.
//! - [`protocols`]: noiseless entangled probes read out by the covariant
//!   measurement, posterior-entropy optimisation and the two-seed POVM
//!   experiment.
//!
//! All information quantities are reported in bits.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod channels;
mod error;
pub mod numerics;
pub mod protocols;
pub mod qpe;

pub use error::{Error, Result};
pub use num_complex::Complex64;
