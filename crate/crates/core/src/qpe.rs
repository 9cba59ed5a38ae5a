//! Repeating a small dephased phase-estimation block `R` times.
//!
//! With `N = R (2^M - 1)` calls in total, the Fisher bound splits as
//! `1/2 log2 N + 1/2 log2(e F / (8 pi (2^M - 1)))`; the second term is the
//! per-call enhancement of an `M`-qubit block.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{dephasing_qfi, ChannelKind, NoisyQpeModel};
use crate::{Error, Result};

/// `R` repetitions of an `M`-qubit dephased block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepeatedStrategy {
    pub qubits: u32,
    pub repetitions: u64,
    pub eta: f64,
}

impl RepeatedStrategy {
    pub fn new(qubits: u32, repetitions: u64, eta: f64) -> Result<Self> {
        NoisyQpeModel::new(ChannelKind::Dephasing, qubits, eta)?;
        if repetitions == 0 {
            return Err(Error::Domain("need at least one repetition".into()));
        }
        Ok(Self {
            qubits,
            repetitions,
            eta,
        })
    }

    /// `R (2^M - 1)`.
    pub fn n_total(&self) -> u64 {
        self.repetitions * ((1u64 << self.qubits) - 1)
    }

    /// Total Fisher information `R F(M, eta)`.
    pub fn total_fisher(&self) -> f64 {
        self.repetitions as f64
            * dephasing_qfi(self.qubits, self.eta).expect("validated on construction")
    }
}

/// Enhancement differences below this many bits count as ties.
const TIE_BITS: f64 = 1e-12;

/// `1/2 log2(e F / (8 pi (2^M - 1)))`; `-inf` at `eta = 0`.
pub fn enhancement_term(qubits: u32, eta: f64) -> Result<f64> {
    let f = dephasing_qfi(qubits, eta)?;
    Ok(0.5 * (E * f / (8.0 * PI * ((1u64 << qubits) - 1) as f64)).log2())
}

/// `1/2 log2 N + enhancement_term(M, eta)`, the large-`N` form of the Fisher
/// bound; `-inf` when the block carries no Fisher information.
pub fn asymptotic_mi_bound(strategy: &RepeatedStrategy) -> f64 {
    0.5 * (strategy.n_total() as f64).log2()
        + enhancement_term(strategy.qubits, strategy.eta).expect("validated on construction")
}

/// The block size in `1..=m_max` with the largest enhancement; ties go to the
/// smaller block.
pub fn optimal_block_size(eta: f64, m_max: u32) -> Result<u32> {
    if m_max == 0 {
        return Err(Error::Domain("m_max must be at least 1".into()));
    }
    let mut best = (1, enhancement_term(1, eta)?);
    for m in 2..=m_max {
        let e = enhancement_term(m, eta)?;
        if e > best.1 + TIE_BITS {
            best = (m, e);
        }
    }
    Ok(best.0)
}

/// The `eta` in `(lo, hi)` where blocks of size `a` and `b` give equal
/// enhancement, by bisection to `1e-10`. An endpoint where the two are tied is
/// returned as is; `None` when the difference keeps its sign on the interval.
pub fn enhancement_crossing(a: u32, b: u32, lo: f64, hi: f64) -> Result<Option<f64>> {
    if !(0.0 < lo && lo < hi && hi <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < lo < hi <= 1, got ({lo}, {hi})"
        )));
    }
    let diff =
        |eta: f64| -> Result<f64> { Ok(enhancement_term(b, eta)? - enhancement_term(a, eta)?) };
    let (mut lo, mut hi) = (lo, hi);
    let (d_lo, d_hi) = (diff(lo)?, diff(hi)?);
    if d_lo.abs() <= TIE_BITS {
        return Ok(Some(lo));
    }
    if d_hi.abs() <= TIE_BITS {
        return Ok(Some(hi));
    }
    if d_lo.signum() == d_hi.signum() {
        return Ok(None);
    }
    let lo_sign = d_lo.signum();
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let d = diff(mid)?;
        if d == 0.0 {
            return Ok(Some(mid));
        }
        if d.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// One point of the `chi` versus circuit size dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiRow {
    pub eta: f64,
    pub qubits: u32,
    pub n_calls: u64,
    pub chi_bits: f64,
}

/// `chi` for every `(eta, M)` pair, `eta` outermost.
pub fn chi_vs_resources_table(
    kind: ChannelKind,
    etas: &[f64],
    qubits: std::ops::RangeInclusive<u32>,
) -> Result<Vec<ChiRow>> {
    let pairs: Vec<(f64, u32)> = etas
        .iter()
        .flat_map(|&eta| qubits.clone().map(move |m| (eta, m)))
        .collect();
    pairs
        .par_iter()
        .map(|&(eta, m)| {
            let model = NoisyQpeModel::new(kind, m, eta)?;
            Ok(ChiRow {
                eta,
                qubits: m,
                n_calls: model.n_calls(),
                chi_bits: model.chi_closed_form(),
            })
        })
        .collect()
}

/// One point of the enhancement-term dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionRow {
    pub eta: f64,
    pub qubits: u32,
    pub enhancement_bits: f64,
}

/// Enhancement for every `(eta, M)` pair with `M` in `1..=m_max`, `eta` outermost.
pub fn transition_table(etas: &[f64], m_max: u32) -> Result<Vec<TransitionRow>> {
    let pairs: Vec<(f64, u32)> = etas
        .iter()
        .flat_map(|&eta| (1..=m_max).map(move |m| (eta, m)))
        .collect();
    pairs
        .par_iter()
        .map(|&(eta, m)| {
            Ok(TransitionRow {
                eta,
                qubits: m,
                enhancement_bits: enhancement_term(m, eta)?,
            })
        })
        .collect()
}
