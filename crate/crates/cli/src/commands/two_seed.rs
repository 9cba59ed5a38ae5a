use anyhow::{ensure, Result};
use qmi::protocols::{run_two_seed_trials, BaseState, PairStyle, TrialOptions};

use super::at_least;
use crate::args::TwoSeedParams;
use crate::output::{emit, num, render_csv, Meta};
use crate::Outcome;

fn style_name(s: PairStyle) -> &'static str {
    match s {
        PairStyle::Real => "real",
        PairStyle::Signed => "signed",
        PairStyle::Complex => "complex",
    }
}

fn base_name(b: BaseState) -> &'static str {
    match b {
        BaseState::Uniform => "uniform",
        BaseState::Optimized => "optimized",
    }
}

const HEADER: [&str; 15] = [
    "trial",
    "N[calls]",
    "style",
    "base",
    "lambda1[1]",
    "lambda2[1]",
    "lambda_spread[1]",
    "I_single[bits]",
    "I_merged[bits]",
    "I_seed1[bits]",
    "I_seed2[bits]",
    "I_split[bits]",
    "always_ok",
    "wonder_violated",
    "convex_ok",
];

pub fn run(p: TwoSeedParams) -> Result<Outcome> {
    let defaults = TrialOptions::default();
    let options = TrialOptions {
        trials: at_least("trials", p.trials.unwrap_or(defaults.trials), 1)?,
        seed: p.seed.unwrap_or(defaults.seed),
        grid: at_least("grid", p.grid.unwrap_or(defaults.grid), 8)?,
        n_values: p.n_values.unwrap_or(defaults.n_values),
    };
    ensure!(
        !options.n_values.is_empty() && options.n_values.iter().all(|&n| n >= 1),
        "--N needs values >= 1"
    );
    ensure!(
        options.grid.is_multiple_of(2),
        "--grid must be even, got {}",
        options.grid
    );

    let trials = run_two_seed_trials(&options)?;
    let n_text: Vec<String> = options.n_values.iter().map(|n| n.to_string()).collect();
    let meta = Meta::new(
        format!(
            "two-seed --trials {} --seed {} --grid {} --N {}",
            options.trials,
            options.seed,
            options.grid,
            n_text.join(",")
        ),
        Some(options.seed),
    );
    let rows: Vec<Vec<String>> = trials
        .iter()
        .map(|t| {
            let r = &t.report;
            vec![
                t.index.to_string(),
                r.n.to_string(),
                style_name(t.style).into(),
                base_name(t.base).into(),
                num(r.lambda1),
                num(r.lambda2),
                num(r.lambda_spread),
                num(r.i_single),
                num(r.i_merged),
                num(r.i_seed1),
                num(r.i_seed2),
                num(r.i_split),
                r.always_ok.to_string(),
                r.wonder_violated.to_string(),
                r.convex_ok.to_string(),
            ]
        })
        .collect();
    emit(p.out.as_deref(), &render_csv(&meta, &HEADER, &rows)?)?;

    let always_fail = trials.iter().filter(|t| !t.report.always_ok).count();
    let wonder = trials.iter().filter(|t| t.report.wonder_violated).count();
    eprintln!(
        "{} trials: {always_fail} with I_merged > I_single, {wonder} with I_split > I_single",
        trials.len()
    );
    Ok(if always_fail == 0 && wonder == 0 {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    })
}
