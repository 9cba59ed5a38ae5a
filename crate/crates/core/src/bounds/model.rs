use std::sync::OnceLock;

use num_complex::Complex64;

use super::StateFamily;
use crate::numerics::{central_difference, second_difference, PeriodicGridFunction};
use crate::{Error, Result};

/// Probabilities below this are treated as zero in `p_dot^2 / p`.
pub(crate) const ZERO_PROBABILITY: f64 = 1e-14;
/// Largest derivative allowed at a zero-probability point before the Fisher
/// information is declared divergent.
pub(crate) const ZERO_SLOPE: f64 = 1e-7;

/// Outcome distributions `p(m|phi)`, `m = 0..outcomes`, on a common periodic grid.
#[derive(Debug)]
pub struct EstimationModel {
    period: f64,
    outcomes: Vec<Vec<f64>>,
    fisher: OnceLock<FisherProfile>,
}

impl Clone for EstimationModel {
    fn clone(&self) -> Self {
        Self {
            period: self.period,
            outcomes: self.outcomes.clone(),
            fisher: OnceLock::new(),
        }
    }
}

impl EstimationModel {
    pub fn new(outcomes: Vec<PeriodicGridFunction>) -> Result<Self> {
        let first = outcomes
            .first()
            .ok_or_else(|| Error::Domain("model needs at least one outcome".into()))?;
        if outcomes.iter().any(|o| !o.same_grid(first)) {
            return Err(Error::GridMismatch(
                "outcome distributions use different grids".into(),
            ));
        }
        if outcomes.iter().any(|o| o.max_imag() > 1e-12) {
            return Err(Error::Domain("outcome probabilities must be real".into()));
        }
        let period = first.period();
        let rows: Vec<Vec<f64>> = outcomes.iter().map(|o| o.real_parts()).collect();
        for j in 0..first.len() {
            let mut total = 0.0;
            for row in &rows {
                if row[j] < -1e-12 {
                    return Err(Error::Domain(format!(
                        "negative probability {} at grid point {j}",
                        row[j]
                    )));
                }
                total += row[j];
            }
            if (total - 1.0).abs() > 1e-8 {
                return Err(Error::NotNormalized {
                    what: "outcome distribution",
                    total,
                });
            }
        }
        let outcomes = rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.max(0.0)).collect())
            .collect();
        Ok(Self {
            period,
            outcomes,
            fisher: OnceLock::new(),
        })
    }

    /// Samples `f(phi)`, which returns one probability per outcome.
    pub fn sample(
        period: f64,
        grid: usize,
        outcomes: usize,
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<Self> {
        let h = period / grid as f64;
        let mut rows = vec![Vec::with_capacity(grid); outcomes];
        for j in 0..grid {
            let p = f(j as f64 * h);
            if p.len() != outcomes {
                return Err(Error::Domain(format!(
                    "{} probabilities at grid point {j}, expected {outcomes}",
                    p.len()
                )));
            }
            for (row, v) in rows.iter_mut().zip(p) {
                row.push(v);
            }
        }
        let outcomes = rows
            .into_iter()
            .map(|r| PeriodicGridFunction::from_real(period, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn grid_len(&self) -> usize {
        self.outcomes[0].len()
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn probabilities(&self, m: usize) -> &[f64] {
        &self.outcomes[m]
    }

    /// Cached classical Fisher information profile.
    pub fn fisher(&self) -> &FisherProfile {
        self.fisher.get_or_init(|| fisher_profile(self))
    }

    /// The family `sum_m sqrt(p(m|phi)) |m>`, whose Fourier bound also bounds
    /// the information carried by the outcome `m`.
    pub fn as_state_family(&self) -> Result<StateFamily> {
        let dim = self.outcome_count();
        let mut states = Vec::with_capacity(self.grid_len() * dim);
        for j in 0..self.grid_len() {
            states.extend(
                self.outcomes
                    .iter()
                    .map(|row| Complex64::new(row[j].sqrt(), 0.0)),
            );
        }
        StateFamily::new(self.period, dim, states)
    }
}

/// Fisher information sampled on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherProfile {
    period: f64,
    values: Vec<f64>,
    divergent: bool,
}

impl FisherProfile {
    pub fn new(period: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !values.len().is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "grid size must be even and at least 2, got {}",
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::Domain(format!(
                "Fisher information must be nonnegative, got {v}"
            )));
        }
        let divergent = values.iter().any(|v| v.is_infinite());
        Ok(Self {
            period,
            values,
            divergent,
        })
    }

    pub fn constant(period: f64, grid: usize, value: f64) -> Result<Self> {
        Self::new(period, vec![value; grid])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_divergent(&self) -> bool {
        self.divergent
    }

    /// `(1/L) integral F`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// `p_dot^2 / p` with the zero-probability convention: at a double zero the
/// ratio tends to `2 p_ddot`; a zero with nonzero slope is divergent.
pub(crate) fn score_term(p: f64, dp: f64, ddp: f64) -> f64 {
    if p >= ZERO_PROBABILITY {
        dp * dp / p
    } else if dp.abs() < ZERO_SLOPE {
        (2.0 * ddp).max(0.0)
    } else {
        f64::INFINITY
    }
}

/// `F(phi) = sum_m p_dot(m|phi)^2 / p(m|phi)` by periodic central differences.
pub fn fisher_profile(model: &EstimationModel) -> FisherProfile {
    let g = model.grid_len();
    let h = model.period / g as f64;
    let mut values = vec![0.0; g];
    for row in &model.outcomes {
        let d1 = central_difference(row, h);
        let d2 = second_difference(row, h);
        for j in 0..g {
            values[j] += score_term(row[j], d1[j], d2[j]);
        }
    }
    let divergent = values.iter().any(|v| v.is_infinite());
    FisherProfile {
        period: model.period,
        values,
        divergent,
    }
}
