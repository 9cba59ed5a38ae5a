use anyhow::{ensure, Result};
use qmi::protocols::{optimize_en_state, posterior_entropy, EntangledState, OptimizeOptions};
use serde::Serialize;

use super::at_least;
use crate::args::OptimizeParams;
use crate::output::{emit, num, render_json, Meta};
use crate::Outcome;

#[derive(Serialize)]
struct Report {
    n: usize,
    entropy_bits: f64,
    mi_bits: f64,
    ceiling_bits: f64,
    uniform_entropy_bits: f64,
    converged: bool,
    iterations: usize,
    restart_entropies: Vec<f64>,
    coefficients: Vec<f64>,
}

pub fn run(p: OptimizeParams) -> Result<Outcome> {
    let n = at_least("N", p.n.unwrap_or(255), 1)?;
    let defaults = OptimizeOptions::default();
    let options = OptimizeOptions {
        restarts: at_least("restarts", p.restarts.unwrap_or(defaults.restarts), 1)?,
        seed: p.seed.unwrap_or(defaults.seed),
        max_iterations: at_least(
            "max-iterations",
            p.max_iterations.unwrap_or(defaults.max_iterations),
            1,
        )?,
        tolerance: p.tolerance.unwrap_or(defaults.tolerance),
        memory: defaults.memory,
    };
    ensure!(
        options.tolerance.is_finite() && options.tolerance > 0.0,
        "--tolerance must be positive"
    );
    let best = optimize_en_state(n, &options)?;
    if !best.converged {
        eprintln!(
            "note: best restart hit the iteration cap of {}",
            options.max_iterations
        );
    }
    let meta = Meta::new(
        format!(
            "optimize --N {n} --restarts {} --seed {} --max-iterations {} --tolerance {}",
            options.restarts,
            options.seed,
            options.max_iterations,
            num(options.tolerance)
        ),
        Some(options.seed),
    );
    let report = Report {
        n,
        entropy_bits: best.entropy_bits,
        mi_bits: best.mi_bits,
        ceiling_bits: best.ceiling_bits,
        uniform_entropy_bits: posterior_entropy(&EntangledState::uniform(n)),
        converged: best.converged,
        iterations: best.trace.len(),
        restart_entropies: best.restart_entropies,
        coefficients: best.state.coefficients().to_vec(),
    };
    emit(p.out.as_deref(), &render_json(&meta, &report)?)?;
    Ok(Outcome::Success)
}
