use serde::Serialize;

use crate::numerics::FourierSpectrum;

/// Which bound produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fourier,
    Fisher,
    Nonperiodic,
    MleLower,
    Companion,
}

/// Conditions attached to a bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// The prior or the model is discontinuous on the grid; the Fisher bound is `+inf`.
    Divergent,
    /// More than `1e-6` of the spectral mass lies outside the requested modes.
    TailMass,
    /// The value is an asymptotic statement and may be negative.
    Asymptotic,
    /// Window doubling changed the non-periodic bound by more than `1e-4` bits.
    WindowUnconverged,
}

/// Result of a bound evaluation. Serializes to
/// `{method, bound_bits, sigma2, prior_entropy_bits, tail_mass_bound, flags}`;
/// an infinite `bound_bits` or `sigma2` is written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub method: Method,
    pub bound_bits: f64,
    pub sigma2: Option<f64>,
    pub prior_entropy_bits: f64,
    pub tail_mass_bound: Option<f64>,
    pub flags: Vec<Flag>,
    #[serde(skip)]
    pub spectrum: Option<FourierSpectrum>,
}

impl BoundReport {
    pub fn new(method: Method, bound_bits: f64, prior_entropy_bits: f64) -> Self {
        Self {
            method,
            bound_bits,
            sigma2: None,
            prior_entropy_bits,
            tail_mass_bound: None,
            flags: Vec::new(),
            spectrum: None,
        }
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn is_divergent(&self) -> bool {
        self.has_flag(Flag::Divergent)
    }

    pub(crate) fn flag(&mut self, flag: Flag) {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_with_documented_keys() {
        let mut r = BoundReport::new(Method::MleLower, f64::INFINITY, 0.0);
        r.flag(Flag::Divergent);
        r.flag(Flag::Divergent);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 6);
        for k in [
            "method",
            "bound_bits",
            "sigma2",
            "prior_entropy_bits",
            "tail_mass_bound",
            "flags",
        ] {
            assert!(keys.contains(&k), "{k}");
        }
        assert_eq!(v["method"], "mle_lower");
        assert!(v["bound_bits"].is_null());
        assert_eq!(v["flags"], serde_json::json!(["divergent"]));
    }
}
