//! Noisy phase-estimation circuits: `M` qubits, qubit `j` querying a noisy
//! phase gate `2^j` times.
//!
//! For every channel the purified output is a unitary encoding whose overlap
//! factorizes as `f(phi) = prod_j (1 - w_j + w_j e^{i 2 pi 2^j phi})`, so the
//! Fourier spectrum is a product of two-point distributions and
//! `chi = sum_j H_bin(w_j)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::bounds::{FisherProfile, StateFamily};
use crate::numerics::{
    binary_entropy, fourier_coefficients, FourierSpectrum, KRange, PeriodicGridFunction,
};
use crate::{Error, Result};

/// Largest qubit count accepted; `eta^(2^j)` has long underflowed to zero by then.
pub const MAX_QUBITS: u32 = 30;

/// Largest qubit count for which the purified family is materialized (`3^M` amplitudes per point).
pub const MAX_PURIFIED_QUBITS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Dephasing,
    AmplitudeDamping,
    Erasure,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::Dephasing,
        ChannelKind::AmplitudeDamping,
        ChannelKind::Erasure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::AmplitudeDamping => "amplitude-damping",
            ChannelKind::Erasure => "erasure",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "unknown channel {s:?}; expected dephasing, amplitude-damping or erasure"
                ))
            })
    }
}

/// An `M`-qubit phase-estimation circuit under one noise channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyQpeModel {
    pub kind: ChannelKind,
    pub qubits: u32,
    pub eta: f64,
}

impl NoisyQpeModel {
    pub fn new(kind: ChannelKind, qubits: u32, eta: f64) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&qubits) {
            return Err(Error::Domain(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {qubits}"
            )));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!(
                "noise parameter must lie in [0, 1], got {eta}"
            )));
        }
        Ok(Self { kind, qubits, eta })
    }

    /// Calls to the phase gate, `2^M - 1`.
    pub fn n_calls(&self) -> u64 {
        (1u64 << self.qubits) - 1
    }

    /// `eta^(2^j)`.
    fn decay(&self, j: u32) -> f64 {
        self.eta.powf((j as f64).exp2())
    }

    /// Weight of the phase-carrying term of qubit `j`.
    pub fn weight(&self, j: u32) -> f64 {
        let x = self.decay(j);
        match self.kind {
            ChannelKind::Dephasing => x * x / 2.0,
            ChannelKind::AmplitudeDamping => x / (4.0 - 2.0 * x),
            ChannelKind::Erasure => x / 2.0,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.qubits).map(|j| self.weight(j)).collect()
    }

    /// `f(phi) = <psi_0|psi_phi>` from the closed-form product.
    pub fn overlap_at(&self, phi: f64) -> Complex64 {
        (0..self.qubits)
            .map(|j| {
                let w = self.weight(j);
                Complex64::new(1.0 - w, 0.0)
                    + Complex64::from_polar(w, TAU * (j as f64).exp2() * phi)
            })
            .product()
    }

    pub fn overlap_function(&self, grid: usize) -> Result<PeriodicGridFunction> {
        PeriodicGridFunction::sample(1.0, grid, |phi| self.overlap_at(phi))
    }

    /// `sum_j H_bin(w_j)`.
    pub fn chi_closed_form(&self) -> f64 {
        self.weights()
            .into_iter()
            .map(|w| binary_entropy(w).expect("weights lie in [0, 1/2]"))
            .sum()
    }

    /// Smallest grid resolving all modes `0..2^M` without aliasing, and at least 4096.
    pub fn default_grid(&self) -> usize {
        (1usize << (self.qubits + 1)).max(crate::numerics::DEFAULT_GRID)
    }

    /// Spectrum of the sampled overlap function.
    pub fn numeric_spectrum(&self, grid: usize) -> Result<FourierSpectrum> {
        let k_max = self.n_calls() as i64;
        fourier_coefficients(&self.overlap_function(grid)?, KRange::new(0, k_max))
    }

    /// `chi` from the FFT of the sampled overlap.
    pub fn chi_numeric(&self) -> Result<f64> {
        self.chi_numeric_with_grid(self.default_grid())
    }

    pub fn chi_numeric_with_grid(&self, grid: usize) -> Result<f64> {
        Ok(self.numeric_spectrum(grid)?.entropy_bits())
    }

    /// Per-qubit purification restricted to its three-dimensional support:
    /// component 0 carries no phase, component 1 carries `e^{i 2 pi 2^j phi}`,
    /// component 2 is the environment branch.
    fn qubit_amplitudes(&self, j: u32, phi: f64) -> [Complex64; 3] {
        let x = self.decay(j);
        let phase = Complex64::from_polar(1.0, TAU * (j as f64).exp2() * phi);
        let r = |v: f64| Complex64::new(v, 0.0);
        match self.kind {
            ChannelKind::Dephasing => [
                r(FRAC_1_SQRT_2),
                phase * (x * FRAC_1_SQRT_2),
                r(((1.0 - x * x) / 2.0).max(0.0).sqrt()),
            ],
            ChannelKind::AmplitudeDamping => {
                let s = 2.0 - x;
                [
                    r((s / 2.0).sqrt()),
                    phase * (x / (2.0 * s)).sqrt(),
                    r((x * (1.0 - x) / (2.0 * s)).max(0.0).sqrt()),
                ]
            }
            ChannelKind::Erasure => [
                r((x / 2.0).sqrt()),
                phase * (x / 2.0).sqrt(),
                r((1.0 - x).max(0.0).sqrt()),
            ],
        }
    }

    /// The purified output state family on `[0, 1)`, of dimension `3^M`.
    pub fn purified_family(&self, grid: usize) -> Result<StateFamily> {
        if self.qubits > MAX_PURIFIED_QUBITS {
            return Err(Error::Domain(format!(
                "purified family limited to {MAX_PURIFIED_QUBITS} qubits, got {}",
                self.qubits
            )));
        }
        let dim = 3usize.pow(self.qubits);
        StateFamily::sample(1.0, grid, dim, |phi| {
            let mut state = vec![Complex64::new(1.0, 0.0)];
            for j in 0..self.qubits {
                let q = self.qubit_amplitudes(j, phi);
                state = state
                    .iter()
                    .flat_map(|a| q.iter().map(move |b| a * b))
                    .collect();
            }
            state
        })
    }

    /// Quantum Fisher information of the purified family,
    /// `4 (2 pi)^2 sum_j 4^j w_j (1 - w_j)`: the variance of the generator.
    pub fn purified_qfi(&self) -> f64 {
        16.0 * PI
            * PI
            * (0..self.qubits)
                .map(|j| (2.0 * j as f64).exp2() * self.weight(j) * (1.0 - self.weight(j)))
                .sum::<f64>()
    }

    pub fn purified_qfi_profile(&self, grid: usize) -> Result<FisherProfile> {
        FisherProfile::constant(1.0, grid, self.purified_qfi())
    }
}

/// `F = (2 pi)^2 sum_j 4^j eta^(2^j)` for the dephasing circuit.
pub fn dephasing_qfi(qubits: u32, eta: f64) -> Result<f64> {
    let model = NoisyQpeModel::new(ChannelKind::Dephasing, qubits, eta)?;
    Ok(4.0
        * PI
        * PI
        * (0..qubits)
            .map(|j| (2.0 * j as f64).exp2() * model.decay(j))
            .sum::<f64>())
}
