//! Invariant suites with fixed seeds. Every check reports its worst observed
//! value next to the limit it is held to.

use std::f64::consts::{E, TAU};

use anyhow::Result;
use qmi::bounds::{
    companion_bound_comparison, entropic_uncertainty_check, fisher_bound, fisher_bound_constant,
    fourier_bound_from_overlap, fourier_bound_from_states, mle_lower_bound,
    nonperiodic_fourier_bound, CompactPrior, FisherInformation, PriorDensity, WindowOptions,
};
use qmi::channels::{ChannelKind, NoisyQpeModel};
use qmi::numerics::{
    discrete_gaussian_fit, gaussian_entropy_vs_bound, logspace, power_density, KRange,
};
use qmi::protocols::{
    optimize_en_state, posterior_entropy, run_two_seed_trials, EntangledState, OptimizeOptions,
    TrialOptions,
};
use qmi::qpe::{enhancement_crossing, enhancement_term, optimal_block_size};
use qmi::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::at_least;
use crate::args::{CheckParams, Suite};
use crate::output::{emit, num, render_csv, Meta};
use crate::Outcome;

struct Row {
    suite: &'static str,
    name: &'static str,
    pass: bool,
    observed: f64,
    limit: String,
    unit: &'static str,
}

fn at_most(
    suite: &'static str,
    name: &'static str,
    observed: f64,
    limit: f64,
    unit: &'static str,
) -> Row {
    Row {
        suite,
        name,
        pass: observed <= limit,
        observed,
        limit: format!("<= {}", num(limit)),
        unit,
    }
}

fn at_least_value(
    suite: &'static str,
    name: &'static str,
    observed: f64,
    limit: f64,
    unit: &'static str,
) -> Row {
    Row {
        suite,
        name,
        pass: observed >= limit,
        observed,
        limit: format!(">= {}", num(limit)),
        unit,
    }
}

fn above(
    suite: &'static str,
    name: &'static str,
    observed: f64,
    limit: f64,
    unit: &'static str,
) -> Row {
    Row {
        suite,
        name,
        pass: observed > limit,
        observed,
        limit: format!("> {}", num(limit)),
        unit,
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn random_state(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<Complex64> {
    let n = rng.random_range(0..=max_n);
    let mut c: Vec<Complex64> = (0..=n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|z| *z /= norm);
    c
}

fn numerics(seed: u64) -> Result<Vec<Row>> {
    const S: &str = "numerics";
    let sigmas = logspace(1e-2, 1e2, 200);
    let scan = gaussian_entropy_vs_bound(&sigmas)?;
    let mut rows = vec![at_least_value(
        S,
        "chi_sigma_scan",
        min_of(scan.iter().map(|r| r.margin_bits)),
        -1e-9,
        "bits",
    )];

    let mut moment_err: f64 = 0.0;
    for &s in &sigmas {
        let fit = discrete_gaussian_fit(s * s)?;
        moment_err = moment_err.max((fit.spectrum.second_moment() - s * s).abs() / (s * s));
    }
    rows.push(at_most(
        S,
        "discrete_gaussian_second_moment",
        moment_err,
        1e-9,
        "relative",
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mass_err: f64 = 0.0;
    for _ in 0..200 {
        let c = random_state(&mut rng, 64);
        let g = qmi::bounds::posterior_grid_size(c.len() - 1);
        let p = power_density(&c, g)?;
        mass_err = mass_err.max((p.iter().sum::<f64>() / g as f64 - 1.0).abs());
    }
    rows.push(at_most(S, "posterior_normalization", mass_err, 1e-12, "1"));
    Ok(rows)
}

fn bounds(seed: u64) -> Result<Vec<Row>> {
    const S: &str = "bounds";
    let mut rows = Vec::new();

    let mut gap: f64 = f64::INFINITY;
    for f in logspace(1e-2, 1e6, 100) {
        let c = companion_bound_comparison(f)?;
        gap = gap.min((c.sqrt_form - c.fisher_form).min(c.reference_form - c.sqrt_form));
    }
    rows.push(above(S, "companion_chain_order", gap, 0.0, "bits"));

    let target = (E / 2.0).log2();
    let gaps: Vec<f64> = (2..=6)
        .map(|e| {
            let nf = 10f64.powi(e);
            Ok(fisher_bound_constant(nf, 1, 1.0)?.bound_bits
                - mle_lower_bound(1, nf, 1.0)?.bound_bits)
        })
        .collect::<Result<_>>()?;
    let monotone = gaps
        .windows(2)
        .all(|w| (w[1] - target).abs() < (w[0] - target).abs());
    let mut row = at_most(S, "fisher_mle_gap", (gaps[4] - target).abs(), 0.01, "bits");
    row.pass &= monotone;
    rows.push(row);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        worst = worst.min(entropic_uncertainty_check(&random_state(&mut rng, 64))?.sum);
    }
    rows.push(at_least_value(
        S,
        "entropic_uncertainty",
        worst,
        -1e-6,
        "bits",
    ));

    let mut path_err: f64 = 0.0;
    let mut order: f64 = f64::NEG_INFINITY;
    for kind in ChannelKind::ALL {
        for m in 1..=6 {
            for eta in [0.0, 0.25, 0.5, 0.75, 0.9, 1.0] {
                let model = NoisyQpeModel::new(kind, m, eta)?;
                let g = model.default_grid();
                let prior = PriorDensity::uniform(1.0, g)?;
                let range = KRange::new(0, model.n_calls() as i64);
                let via_overlap =
                    fourier_bound_from_overlap(&model.overlap_function(g)?, &prior, range)?
                        .bound_bits;
                let via_states =
                    fourier_bound_from_states(&model.purified_family(g)?, &prior, range)?
                        .bound_bits;
                let profile = model.purified_qfi_profile(g)?;
                let fisher = fisher_bound(&prior, FisherInformation::Profile(&profile))?.bound_bits;
                path_err = path_err.max((via_overlap - via_states).abs());
                order = order.max(via_states - fisher);
            }
        }
    }
    rows.push(at_most(
        S,
        "fourier_path_consistency",
        path_err,
        1e-8,
        "bits",
    ));
    rows.push(at_most(S, "fourier_below_fisher", order, 1e-9, "bits"));

    let prior = CompactPrior::truncated_gaussian(0.0, 0.05, 8.0, 400)?;
    let family = |phi: f64| {
        vec![
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, TAU * phi),
        ]
        .into_iter()
        .map(|z| z / 2f64.sqrt())
        .collect()
    };
    let r = nonperiodic_fourier_bound(&prior, 2, family, &WindowOptions::default())?;
    let h = &r.history;
    let change = (h[h.len() - 1].1 - h[h.len() - 2].1).abs();
    rows.push(at_most(
        S,
        "nonperiodic_window_convergence",
        change,
        1e-4,
        "bits",
    ));
    Ok(rows)
}

fn channels() -> Result<Vec<Row>> {
    const S: &str = "channels";
    let mut rows = Vec::new();
    let saturation = max_of(
        (1..=20)
            .map(|m| {
                Ok(
                    (NoisyQpeModel::new(ChannelKind::Dephasing, m, 1.0)?.chi_closed_form()
                        - m as f64)
                        .abs(),
                )
            })
            .collect::<Result<Vec<f64>>>()?,
    );
    rows.push(at_most(
        S,
        "noiseless_saturation",
        saturation,
        1e-12,
        "bits",
    ));

    let mut err: f64 = 0.0;
    for kind in ChannelKind::ALL {
        for m in 1..=8 {
            for i in 0..=10 {
                let model = NoisyQpeModel::new(kind, m, i as f64 / 10.0)?;
                err = err.max((model.chi_numeric()? - model.chi_closed_form()).abs());
            }
        }
    }
    rows.push(at_most(S, "closed_form_vs_numeric", err, 1e-8, "bits"));

    let at_one = (1..=5)
        .map(|m| enhancement_term(m, 1.0))
        .collect::<qmi::Result<Vec<f64>>>()?;
    rows.push(above(
        S,
        "enhancement_increasing_at_eta_1",
        min_of(at_one.windows(2).map(|w| w[1] - w[0])),
        0.0,
        "bits",
    ));

    let crossing = enhancement_crossing(1, 2, 0.01, 1.0)?.unwrap_or(f64::NAN);
    let below = optimal_block_size(crossing - 1e-6, 5)? == 1;
    let mut row = above(S, "single_qubit_optimal_below_crossing", crossing, 0.0, "1");
    row.pass &= below && crossing.is_finite();
    rows.push(row);
    Ok(rows)
}

fn protocols(seed: u64, trials: usize) -> Result<Vec<Row>> {
    const S: &str = "protocols";
    let results = run_two_seed_trials(&TrialOptions {
        trials,
        seed,
        ..Default::default()
    })?;
    let always = max_of(
        results
            .iter()
            .map(|t| t.report.i_merged - t.report.i_single),
    );
    let wonder = max_of(results.iter().map(|t| t.report.i_split - t.report.i_single));
    let mut rows = vec![
        at_most(S, "two_seed_merged_below_single", always, 1e-9, "bits"),
        at_most(S, "two_seed_split_below_single", wonder, 1e-9, "bits"),
    ];

    let mut gain = f64::INFINITY;
    let mut excess = f64::NEG_INFINITY;
    for n in [7usize, 31] {
        let best = optimize_en_state(
            n,
            &OptimizeOptions {
                seed,
                ..Default::default()
            },
        )?;
        gain = gain.min(posterior_entropy(&EntangledState::uniform(n)) - best.entropy_bits);
        excess = excess.max(best.mi_bits - ((n + 1) as f64).log2());
    }
    rows.push(at_least_value(
        S,
        "optimized_beats_uniform",
        gain,
        1e-3,
        "bits",
    ));
    rows.push(at_most(
        S,
        "optimized_below_log_dimension",
        excess,
        1e-6,
        "bits",
    ));
    Ok(rows)
}

pub fn run(suite: Suite, p: CheckParams) -> Result<Outcome> {
    let seed = p.seed.unwrap_or(0);
    let trials = at_least("trials", p.trials.unwrap_or(100), 1)?;
    let want = |s: Suite| suite == Suite::All || suite == s;
    let mut rows = Vec::new();
    if want(Suite::Numerics) {
        rows.extend(numerics(seed)?);
    }
    if want(Suite::Bounds) {
        rows.extend(bounds(seed)?);
    }
    if want(Suite::Channels) {
        rows.extend(channels()?);
    }
    if want(Suite::Protocols) {
        rows.extend(protocols(seed, trials)?);
    }

    let name = format!("{suite:?}").to_lowercase();
    let meta = Meta::new(
        format!("check {name} --trials {trials} --seed {seed}"),
        Some(seed),
    );
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let status = if r.pass { "pass" } else { "fail" };
            vec![
                r.suite.into(),
                r.name.into(),
                status.into(),
                num(r.observed),
                r.limit.clone(),
                r.unit.into(),
            ]
        })
        .collect();
    emit(
        p.out.as_deref(),
        &render_csv(
            &meta,
            &["suite", "check", "status", "observed", "limit", "unit"],
            &csv_rows,
        )?,
    )?;

    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    eprintln!(
        "{} of {} checks passed",
        rows.len() - failed.len(),
        rows.len()
    );
    if failed.is_empty() {
        Ok(Outcome::Success)
    } else {
        eprintln!("failed: {}", failed.join(", "));
        Ok(Outcome::ChecksFailed)
    }
}
