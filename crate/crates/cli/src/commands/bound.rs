use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use clap::ValueEnum;
use qmi::bounds::{
    companion_bound_comparison, fisher_bound, fisher_bound_constant, fourier_bound_from_overlap,
    fourier_bound_from_states, mle_lower_bound, BoundReport, CompanionBounds, EstimationModel,
    FisherInformation, PriorDensity,
};
use qmi::channels::{ChannelKind, NoisyQpeModel, MAX_PURIFIED_QUBITS};
use qmi::numerics::{KRange, PeriodicGridFunction, DEFAULT_GRID};
use qmi::Complex64;
use serde::Serialize;

use super::{positive, unit_interval};
use crate::args::{BoundMethod, BoundParams};
use crate::output::{emit, render_json, Meta};
use crate::Outcome;

/// Largest circuit whose overlap is sampled for the numeric Fourier route.
const MAX_SAMPLED_QUBITS: u32 = 20;

/// A numeric CSV with a header row; `#` lines are skipped.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let header = reader.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: record {}", path.display(), i + 1))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .with_context(|| format!("{}: bad number {field:?}", path.display()))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

impl Table {
    /// Checks the `phi` column against the grid `j * period / G` and returns `G`.
    fn grid(&self, path: &Path, period: f64) -> Result<usize> {
        ensure!(
            self.header.first().map(String::as_str) == Some("phi"),
            "{}: first column must be `phi`",
            path.display()
        );
        let g = self.rows.len();
        ensure!(
            g >= 2 && g.is_multiple_of(2),
            "{}: need an even number (>= 2) of grid rows, got {g}",
            path.display()
        );
        for (j, row) in self.rows.iter().enumerate() {
            let expect = j as f64 * period / g as f64;
            ensure!(
                (row[0] - expect).abs() <= 1e-9 * period,
                "{}: phi = {} at row {j}, expected {expect} for a uniform grid of period {period}",
                path.display(),
                row[0]
            );
        }
        Ok(g)
    }

    fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }
}

fn read_model(path: &Path, period: f64) -> Result<EstimationModel> {
    let table = read_table(path)?;
    ensure!(
        table.header.len() >= 2,
        "{}: expected columns phi,p_0,p_1,...",
        path.display()
    );
    table.grid(path, period)?;
    let outcomes = (1..table.header.len())
        .map(|c| PeriodicGridFunction::from_real(period, table.column(c)))
        .collect::<qmi::Result<Vec<_>>>()?;
    Ok(EstimationModel::new(outcomes)?)
}

fn read_overlap(path: &Path, period: f64) -> Result<PeriodicGridFunction> {
    let table = read_table(path)?;
    ensure!(
        table.header == ["phi", "re", "im"],
        "{}: expected columns phi,re,im",
        path.display()
    );
    table.grid(path, period)?;
    let samples = table
        .rows
        .iter()
        .map(|r| Complex64::new(r[1], r[2]))
        .collect();
    Ok(PeriodicGridFunction::new(period, samples)?)
}

fn read_prior(path: &Path, period: f64) -> Result<PriorDensity> {
    let table = read_table(path)?;
    ensure!(
        table.header == ["phi", "p"],
        "{}: expected columns phi,p",
        path.display()
    );
    let g = table.grid(path, period)?;
    let p = table.column(1);
    ensure!(
        p.iter().all(|&v| v >= 0.0),
        "{}: prior density must be nonnegative",
        path.display()
    );
    let mass = p.iter().sum::<f64>() * period / g as f64;
    ensure!(
        (mass - 1.0).abs() <= 1e-6,
        "{}: prior integrates to {mass}, not 1",
        path.display()
    );
    Ok(PriorDensity::from_density(
        PeriodicGridFunction::from_real(period, p)?,
    )?)
}

enum PriorChoice<'a> {
    Uniform,
    File(&'a Path),
}

impl PriorChoice<'_> {
    /// The prior on `grid` points; a file prior fixes its own grid.
    fn resolve(&self, period: f64, grid: usize) -> Result<PriorDensity> {
        match self {
            PriorChoice::Uniform => Ok(PriorDensity::uniform(period, grid)?),
            PriorChoice::File(path) => {
                let prior = read_prior(path, period)?;
                ensure!(
                    prior.grid_len() == grid,
                    "prior has {} grid points but the model has {grid}",
                    prior.grid_len()
                );
                Ok(prior)
            }
        }
    }

    fn grid_hint(&self, period: f64) -> Result<Option<usize>> {
        match self {
            PriorChoice::Uniform => Ok(None),
            PriorChoice::File(path) => Ok(Some(read_prior(path, period)?.grid_len())),
        }
    }
}

enum Source {
    Channel(NoisyQpeModel),
    Model(EstimationModel),
    Overlap(PeriodicGridFunction),
    Constant { f: f64, n: u64 },
}

fn resolve_source(p: &BoundParams, period: f64) -> Result<Source> {
    let given = [
        p.channel.is_some(),
        p.model.is_some(),
        p.overlap.is_some(),
        p.fisher_constant.is_some(),
    ];
    ensure!(
        given.iter().filter(|&&g| g).count() == 1,
        "name exactly one model source: --channel, --model, --overlap or --fisher-constant"
    );
    if let Some(name) = &p.channel {
        let kind: ChannelKind = name.parse()?;
        let qubits = p.qubits.context("--channel needs --M")?;
        let eta = unit_interval("eta", p.eta.context("--channel needs --eta")?)?;
        ensure!(
            period == 1.0,
            "built-in channels are defined on a unit period"
        );
        return Ok(Source::Channel(NoisyQpeModel::new(kind, qubits, eta)?));
    }
    if let Some(path) = &p.model {
        return Ok(Source::Model(read_model(path, period)?));
    }
    if let Some(path) = &p.overlap {
        return Ok(Source::Overlap(read_overlap(path, period)?));
    }
    let f = p.fisher_constant.expect("one source is present");
    ensure!(
        f.is_finite() && f >= 0.0,
        "--fisher-constant must be finite and nonnegative, got {f}"
    );
    let n = p.n.unwrap_or(1);
    ensure!(n >= 1, "--N must be at least 1");
    Ok(Source::Constant { f, n })
}

fn fourier(
    source: &Source,
    prior: &PriorChoice<'_>,
    period: f64,
    grid: Option<usize>,
) -> Result<BoundReport> {
    match source {
        Source::Channel(model) => {
            let top = model.n_calls() as i64;
            if let PriorChoice::File(_) = prior {
                ensure!(
                    model.qubits <= MAX_PURIFIED_QUBITS,
                    "a non-uniform prior needs the purified family, available for M <= {MAX_PURIFIED_QUBITS}"
                );
                let g = prior.grid_hint(period)?.expect("file prior");
                let family = model.purified_family(g)?;
                return Ok(fourier_bound_from_states(
                    &family,
                    &prior.resolve(period, g)?,
                    KRange::Full,
                )?);
            }
            ensure!(
                model.qubits <= MAX_SAMPLED_QUBITS,
                "the sampled Fourier route supports M <= {MAX_SAMPLED_QUBITS}, got {}",
                model.qubits
            );
            let g = grid.unwrap_or_else(|| model.default_grid());
            let overlap = model.overlap_function(g)?;
            Ok(fourier_bound_from_overlap(
                &overlap,
                &prior.resolve(period, g)?,
                KRange::new(0, top),
            )?)
        }
        Source::Model(model) => {
            let prior = prior.resolve(period, model.grid_len())?;
            Ok(fourier_bound_from_states(
                &model.as_state_family()?,
                &prior,
                KRange::Full,
            )?)
        }
        Source::Overlap(f) => Ok(fourier_bound_from_overlap(
            f,
            &prior.resolve(period, f.len())?,
            KRange::Full,
        )?),
        Source::Constant { .. } => {
            bail!("the Fourier bound needs states: use --channel, --model or --overlap")
        }
    }
}

fn fisher(
    source: &Source,
    prior: &PriorChoice<'_>,
    period: f64,
    grid: Option<usize>,
) -> Result<BoundReport> {
    let grid_for = |fallback: usize| -> Result<usize> {
        Ok(prior.grid_hint(period)?.or(grid).unwrap_or(fallback))
    };
    match source {
        Source::Channel(model) => {
            let prior = prior.resolve(period, grid_for(DEFAULT_GRID)?)?;
            Ok(fisher_bound(
                &prior,
                FisherInformation::Constant(model.purified_qfi()),
            )?)
        }
        Source::Model(model) => {
            let prior = prior.resolve(period, model.grid_len())?;
            Ok(fisher_bound(&prior, FisherInformation::Model(model))?)
        }
        Source::Constant { f, n } => match prior {
            PriorChoice::Uniform => Ok(fisher_bound_constant(*f, *n, period)?),
            PriorChoice::File(_) => {
                let prior = prior.resolve(period, grid_for(DEFAULT_GRID)?)?;
                Ok(fisher_bound(
                    &prior,
                    FisherInformation::Constant(*f * *n as f64),
                )?)
            }
        },
        Source::Overlap(_) => {
            bail!("the Fisher bound needs --model, --channel or --fisher-constant")
        }
    }
}

/// Total Fisher information `N F` for the methods that only use a number.
fn total_fisher(source: &Source) -> Result<(f64, u64)> {
    match source {
        Source::Constant { f, n } => Ok((*f, *n)),
        Source::Channel(model) => Ok((model.purified_qfi(), 1)),
        _ => bail!("this method needs --fisher-constant or --channel"),
    }
}

#[derive(Serialize)]
struct CompanionReport {
    method: &'static str,
    n: u64,
    #[serde(flatten)]
    bounds: CompanionBounds,
}

fn command_line(p: &BoundParams, method: BoundMethod) -> String {
    let mut parts = vec![
        "bound".to_string(),
        "--method".into(),
        method
            .to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string(),
    ];
    let mut push = |flag: &str, value: Option<String>| {
        if let Some(v) = value {
            parts.push(format!("--{flag}"));
            parts.push(v);
        }
    };
    push("channel", p.channel.clone());
    push("M", p.qubits.map(|v| v.to_string()));
    push("eta", p.eta.map(|v| v.to_string()));
    push("model", p.model.as_ref().map(|v| v.display().to_string()));
    push(
        "overlap",
        p.overlap.as_ref().map(|v| v.display().to_string()),
    );
    push("prior", p.prior.clone());
    push("fisher-constant", p.fisher_constant.map(|v| v.to_string()));
    push("N", p.n.map(|v| v.to_string()));
    push("period", p.period.map(|v| v.to_string()));
    push("grid", p.grid.map(|v| v.to_string()));
    parts.join(" ")
}

pub fn run(p: BoundParams) -> Result<Outcome> {
    let method = p.method.unwrap_or(BoundMethod::Fourier);
    let period = positive("period", p.period.unwrap_or(1.0))?;
    if let Some(g) = p.grid {
        ensure!(
            g >= 2 && g % 2 == 0,
            "--grid must be even and at least 2, got {g}"
        );
    }
    let prior = match p.prior.as_deref() {
        None | Some("uniform") => PriorChoice::Uniform,
        Some(path) => PriorChoice::File(Path::new(path)),
    };
    let source = resolve_source(&p, period)?;
    let meta = Meta::new(command_line(&p, method), None);

    let bytes = match method {
        BoundMethod::Fourier | BoundMethod::Fisher => {
            let report = if method == BoundMethod::Fourier {
                fourier(&source, &prior, period, p.grid)?
            } else {
                fisher(&source, &prior, period, p.grid)?
            };
            let divergent = report.is_divergent();
            emit(p.out.as_deref(), &render_json(&meta, &report)?)?;
            return Ok(if divergent {
                Outcome::Divergent
            } else {
                Outcome::Success
            });
        }
        BoundMethod::Companion => {
            let (f, n) = total_fisher(&source)?;
            render_json(
                &meta,
                &CompanionReport {
                    method: "companion",
                    n,
                    bounds: companion_bound_comparison(f * n as f64)?,
                },
            )?
        }
        BoundMethod::MleLower => {
            let (f, n) = total_fisher(&source)?;
            ensure!(
                f > 0.0,
                "the maximum-likelihood bound needs positive Fisher information"
            );
            render_json(&meta, &mle_lower_bound(n, f, period)?)?
        }
    };
    emit(p.out.as_deref(), &bytes)?;
    Ok(Outcome::Success)
}
