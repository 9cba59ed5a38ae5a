//! Command-line and config-file schema.
//!
//! Every parameter can come from a flag or from a flat TOML file passed with
//! `--config`; the file uses the long flag name as its key (`eta-min = 0.5`,
//! `M = 3`). Flags win over the file and unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "qmi",
    version,
    about = "Mutual-information bounds for phase estimation"
)]
pub struct Cli {
    /// Flat TOML file with parameters for the chosen subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound and print a JSON report.
    Bound(BoundParams),
    /// Write the dataset behind one figure as CSV (and optionally SVG).
    Figure {
        #[arg(value_enum)]
        name: FigureName,
        #[command(flatten)]
        params: FigureParams,
    },
    /// Run an invariant suite and write a pass/fail CSV.
    Check {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        params: CheckParams,
    },
    /// Minimize the covariant posterior entropy over entangled inputs.
    Optimize(OptimizeParams),
    /// Random two-seed POVM trials.
    TwoSeed(TwoSeedParams),
}

macro_rules! layered {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl $ty {
            /// Fills every field not given on the command line from `file`.
            pub fn or(self, file: Self) -> Self {
                Self { $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    Fourier,
    Fisher,
    Companion,
    MleLower,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BoundParams {
    /// Bound to evaluate [default: fourier].
    #[arg(long, value_enum)]
    pub method: Option<BoundMethod>,
    /// Built-in channel: dephasing, amplitude-damping or erasure.
    #[arg(long)]
    pub channel: Option<String>,
    /// Qubits of the built-in circuit.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub qubits: Option<u32>,
    /// Channel parameter in [0, 1].
    #[arg(long)]
    pub eta: Option<f64>,
    /// CSV of conditional probabilities with columns `phi,p_0,p_1,...`.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// CSV of overlap samples `<psi_0|psi_phi>` with columns `phi,re,im`.
    #[arg(long, value_name = "FILE")]
    pub overlap: Option<PathBuf>,
    /// `uniform`, or a CSV with columns `phi,p` [default: uniform].
    #[arg(long)]
    pub prior: Option<String>,
    /// Fisher information of one call, for a model given only by its Fisher information.
    #[arg(long)]
    pub fisher_constant: Option<f64>,
    /// Number of calls multiplying the Fisher information [default: 1].
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    /// Length of the parameter period [default: 1].
    #[arg(long)]
    pub period: Option<f64>,
    /// Grid points per period for built-in channels.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

layered!(BoundParams {
    method,
    channel,
    qubits,
    eta,
    model,
    overlap,
    prior,
    fisher_constant,
    n,
    period,
    grid,
    out
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    #[value(name = "chi_qpe")]
    ChiQpe,
    #[value(name = "transition")]
    Transition,
    #[value(name = "b_sigma")]
    BSigma,
    #[value(name = "entropy2")]
    Entropy2,
}

impl FigureName {
    pub fn file_stem(self) -> &'static str {
        match self {
            FigureName::ChiQpe => "chi_qpe",
            FigureName::Transition => "transition",
            FigureName::BSigma => "b_sigma",
            FigureName::Entropy2 => "entropy2",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FigureParams {
    /// chi_qpe: channel name or `all` [default: dephasing].
    #[arg(long)]
    pub channel: Option<String>,
    /// chi_qpe: comma-separated noise levels.
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,
    /// chi_qpe and transition: largest qubit count.
    #[arg(long = "M-max")]
    #[serde(rename = "M-max")]
    pub m_max: Option<u32>,
    /// transition: smallest eta [default: 0.5].
    #[arg(long)]
    pub eta_min: Option<f64>,
    /// transition: largest eta [default: 1].
    #[arg(long)]
    pub eta_max: Option<f64>,
    /// transition: number of eta samples [default: 101].
    #[arg(long)]
    pub eta_points: Option<usize>,
    /// b_sigma: smallest sigma [default: 0.01].
    #[arg(long)]
    pub sigma_min: Option<f64>,
    /// b_sigma: largest sigma [default: 100].
    #[arg(long)]
    pub sigma_max: Option<f64>,
    /// b_sigma: number of log-spaced sigma values [default: 200].
    #[arg(long)]
    pub points: Option<usize>,
    /// entropy2: number of calls [default: 255].
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// entropy2: optimizer restarts [default: 8].
    #[arg(long)]
    pub restarts: Option<usize>,
    /// entropy2: optimizer seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory receiving the CSV and SVG files [default: .].
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Also render an SVG line plot.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub svg: Option<bool>,
}

layered!(FigureParams {
    channel,
    etas,
    m_max,
    eta_min,
    eta_max,
    eta_points,
    sigma_min,
    sigma_max,
    points,
    n,
    restarts,
    seed,
    out_dir,
    svg
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Bounds,
    Channels,
    Protocols,
    Numerics,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CheckParams {
    /// Random two-seed trials in the protocols suite [default: 100].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Seed for every randomized check [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

layered!(CheckParams { trials, seed, out });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct OptimizeParams {
    /// Number of calls [default: 255].
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Independent starts [default: 8].
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Seed of the random starts [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Iteration cap per restart [default: 5000].
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Stop when an iteration gains less than this many bits [default: 1e-10].
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

layered!(OptimizeParams {
    n,
    restarts,
    seed,
    max_iterations,
    tolerance,
    out
});

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct TwoSeedParams {
    /// Number of random seed pairs [default: 120].
    #[arg(long)]
    pub trials: Option<usize>,
    /// RNG seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Quadrature points per axis [default: 256].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Comma-separated call counts to cycle through [default: 2,3,4].
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N")]
    pub n_values: Option<Vec<usize>>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

layered!(TwoSeedParams {
    trials,
    seed,
    grid,
    n_values,
    out
});

/// Reads a flat TOML parameter file, or the empty parameter set.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
