use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use qmi::bounds::posterior_grid_size;
use qmi::channels::{ChannelKind, MAX_QUBITS};
use qmi::numerics::{gaussian_entropy_vs_bound, logspace};
use qmi::protocols::{covariant_posterior, optimize_en_state, EntangledState, OptimizeOptions};
use qmi::qpe::{chi_vs_resources_table, enhancement_crossing, transition_table};

use super::{at_least, positive, unit_interval};
use crate::args::{FigureName, FigureParams};
use crate::output::{line_plot, num, render_csv, Meta, PlotSpec, Series};
use crate::Outcome;

const DEFAULT_ETAS: [f64; 6] = [1.0, 0.999, 0.99, 0.95, 0.9, 0.8];

/// Files produced by one figure, written only after every dataset is built.
struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn new(dir: PathBuf) -> Self {
        Self {
            dir,
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    fn write(self) -> Result<()> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating {}", self.dir.display()))?;
        for (name, bytes) in &self.files {
            let path = self.dir.join(name);
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn channels(name: &str) -> Result<Vec<ChannelKind>> {
    if name == "all" {
        Ok(ChannelKind::ALL.to_vec())
    } else {
        Ok(vec![name.parse()?])
    }
}

fn chi_qpe(p: &FigureParams, out: &mut Artifacts, svg: bool) -> Result<()> {
    let channel = p.channel.clone().unwrap_or_else(|| "dephasing".into());
    let kinds = channels(&channel)?;
    let etas = p.etas.clone().unwrap_or_else(|| DEFAULT_ETAS.to_vec());
    ensure!(!etas.is_empty(), "--etas must not be empty");
    for &eta in &etas {
        unit_interval("etas", eta)?;
    }
    let m_max = p.m_max.unwrap_or(16);
    ensure!(
        (1..=MAX_QUBITS).contains(&m_max),
        "--M-max must lie in 1..={MAX_QUBITS}, got {m_max}"
    );

    let etas_text: Vec<String> = etas.iter().map(|e| e.to_string()).collect();
    let meta = Meta::new(
        format!(
            "figure chi_qpe --channel {channel} --etas {} --M-max {m_max}",
            etas_text.join(",")
        ),
        None,
    );
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for kind in kinds {
        let table = chi_vs_resources_table(kind, &etas, 1..=m_max)?;
        for &eta in &etas {
            let points = table
                .iter()
                .filter(|r| r.eta == eta)
                .map(|r| (r.n_calls as f64, r.chi_bits))
                .collect();
            series.push(Series {
                label: format!("{kind} eta={eta}"),
                points,
            });
        }
        rows.extend(table.iter().map(|r| {
            vec![
                kind.name().to_string(),
                num(r.eta),
                r.qubits.to_string(),
                r.n_calls.to_string(),
                num(r.chi_bits),
            ]
        }));
    }
    out.add(
        "chi_qpe.csv",
        render_csv(
            &meta,
            &["channel", "eta[1]", "M[qubits]", "N[calls]", "chi[bits]"],
            &rows,
        )?,
    );
    if svg {
        let spec = PlotSpec {
            title: "Holevo ceiling of noisy QPE",
            x_label: "N (calls)",
            y_label: "chi (bits)",
            log_x: true,
        };
        out.add("chi_qpe.svg", line_plot(&spec, &series).into_bytes());
    }
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn transition(p: &FigureParams, out: &mut Artifacts, svg: bool) -> Result<()> {
    let eta_min = p.eta_min.unwrap_or(0.5);
    let eta_max = unit_interval("eta-max", p.eta_max.unwrap_or(1.0))?;
    ensure!(
        eta_min > 0.0 && eta_min < eta_max,
        "need 0 < --eta-min < --eta-max, got {eta_min} and {eta_max}"
    );
    let points = at_least("eta-points", p.eta_points.unwrap_or(101), 2)?;
    let m_max = p.m_max.unwrap_or(5);
    ensure!(
        (1..=MAX_QUBITS).contains(&m_max),
        "--M-max must lie in 1..={MAX_QUBITS}, got {m_max}"
    );

    let etas = linspace(eta_min, eta_max, points);
    let table = transition_table(&etas, m_max)?;
    let meta = Meta::new(
        format!("figure transition --eta-min {eta_min} --eta-max {eta_max} --eta-points {points} --M-max {m_max}"),
        None,
    );
    let mut header: Vec<String> = vec!["eta[1]".into()];
    header.extend((1..=m_max).map(|m| format!("enhancement_M{m}[bits]")));
    header.push("best_M[qubits]".into());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = table
        .chunks(m_max as usize)
        .map(|chunk| {
            let mut row = vec![num(chunk[0].eta)];
            row.extend(chunk.iter().map(|r| num(r.enhancement_bits)));
            let mut best = &chunk[0];
            for r in &chunk[1..] {
                if r.enhancement_bits > best.enhancement_bits + 1e-12 {
                    best = r;
                }
            }
            row.push(best.qubits.to_string());
            row
        })
        .collect();
    out.add("transition.csv", render_csv(&meta, &header_refs, &rows)?);

    let mut crossings = Vec::new();
    for m in 1..m_max {
        let eta = enhancement_crossing(m, m + 1, eta_min, eta_max)?;
        crossings.push(vec![
            m.to_string(),
            (m + 1).to_string(),
            eta.map_or_else(|| "none".into(), num),
        ]);
    }
    out.add(
        "transition_crossings.csv",
        render_csv(
            &meta,
            &["M_small[qubits]", "M_large[qubits]", "eta_cross[1]"],
            &crossings,
        )?,
    );
    if svg {
        let series: Vec<Series> = (1..=m_max)
            .map(|m| Series {
                label: format!("M={m}"),
                points: table
                    .iter()
                    .filter(|r| r.qubits == m)
                    .map(|r| (r.eta, r.enhancement_bits))
                    .collect(),
            })
            .collect();
        let spec = PlotSpec {
            title: "Quantum enhancement per call",
            x_label: "eta",
            y_label: "enhancement (bits)",
            log_x: false,
        };
        out.add("transition.svg", line_plot(&spec, &series).into_bytes());
    }
    Ok(())
}

fn b_sigma(p: &FigureParams, out: &mut Artifacts, svg: bool) -> Result<()> {
    let lo = positive("sigma-min", p.sigma_min.unwrap_or(1e-2))?;
    let hi = positive("sigma-max", p.sigma_max.unwrap_or(1e2))?;
    ensure!(lo < hi, "--sigma-min must be below --sigma-max");
    let points = at_least("points", p.points.unwrap_or(200), 2)?;
    let rows = gaussian_entropy_vs_bound(&logspace(lo, hi, points))?;
    let meta = Meta::new(
        format!("figure b_sigma --sigma-min {lo} --sigma-max {hi} --points {points}"),
        None,
    );
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.sigma),
                num(r.entropy_bits),
                num(r.bound_bits),
                num(r.margin_bits),
            ]
        })
        .collect();
    out.add(
        "b_sigma.csv",
        render_csv(
            &meta,
            &["sigma[1]", "entropy[bits]", "bound[bits]", "margin[bits]"],
            &csv_rows,
        )?,
    );

    let negative: Vec<_> = rows.iter().filter(|r| r.margin_bits < -1e-9).collect();
    if let Some(worst) = negative
        .iter()
        .min_by(|a, b| a.margin_bits.total_cmp(&b.margin_bits))
    {
        eprintln!(
            "note: {} of {points} rows have negative margin (largest sigma {}, worst {} bits at sigma {})",
            negative.len(),
            num(negative.iter().map(|r| r.sigma).fold(0.0, f64::max)),
            num(worst.margin_bits),
            num(worst.sigma)
        );
    }
    if svg {
        let series = vec![
            Series {
                label: "entropy".into(),
                points: rows.iter().map(|r| (r.sigma, r.entropy_bits)).collect(),
            },
            Series {
                label: "ceiling".into(),
                points: rows.iter().map(|r| (r.sigma, r.bound_bits)).collect(),
            },
        ];
        let spec = PlotSpec {
            title: "Discrete Gaussian entropy vs ceiling",
            x_label: "sigma",
            y_label: "bits",
            log_x: true,
        };
        out.add("b_sigma.svg", line_plot(&spec, &series).into_bytes());
    }
    Ok(())
}

/// Samples centred on `theta = 0`, as `(theta, p)` for `theta` in `[-1/2, 1/2)`.
fn centred(p: &[f64]) -> Vec<(f64, f64)> {
    let g = p.len();
    (0..g)
        .map(|i| {
            let j = (i + g / 2) % g;
            let theta = if j >= g / 2 {
                j as f64 - g as f64
            } else {
                j as f64
            } / g as f64;
            (theta, p[j])
        })
        .collect()
}

fn entropy2(p: &FigureParams, out: &mut Artifacts, svg: bool) -> Result<()> {
    let n = at_least("N", p.n.unwrap_or(255), 1)?;
    let restarts = at_least("restarts", p.restarts.unwrap_or(8), 1)?;
    let seed = p.seed.unwrap_or(0);
    let best = optimize_en_state(
        n,
        &OptimizeOptions {
            restarts,
            seed,
            ..Default::default()
        },
    )?;
    let uniform = EntangledState::uniform(n);
    let grid = posterior_grid_size(n);
    let p_opt = covariant_posterior(&best.state, grid)?;
    let p_uni = covariant_posterior(&uniform, grid)?;
    let meta = Meta::new(
        format!("figure entropy2 --N {n} --restarts {restarts} --seed {seed}"),
        Some(seed),
    );

    let opt = centred(&p_opt.density.real_parts());
    let uni = centred(&p_uni.density.real_parts());
    let rows: Vec<Vec<String>> = opt
        .iter()
        .zip(&uni)
        .map(|(a, b)| vec![num(a.0), num(a.1), num(b.1)])
        .collect();
    out.add(
        "entropy2_posterior.csv",
        render_csv(
            &meta,
            &[
                "theta[period]",
                "p_optimal[1/period]",
                "p_uniform[1/period]",
            ],
            &rows,
        )?,
    );

    let w_opt = best.state.weights();
    let w_uni = uniform.weights();
    let rows: Vec<Vec<String>> = (0..=n)
        .map(|k| vec![k.to_string(), num(w_opt[k]), num(w_uni[k])])
        .collect();
    out.add(
        "entropy2_amplitudes.csv",
        render_csv(&meta, &["k[1]", "c2_optimal[1]", "c2_uniform[1]"], &rows)?,
    );

    let summary = vec![
        vec![
            "optimal".into(),
            num(p_opt.entropy_bits),
            num(-p_opt.entropy_bits),
            num(best.ceiling_bits),
        ],
        vec![
            "uniform".into(),
            num(p_uni.entropy_bits),
            num(-p_uni.entropy_bits),
            num(qmi::protocols::fourier_bound_ceiling(&uniform)),
        ],
    ];
    out.add(
        "entropy2_summary.csv",
        render_csv(
            &meta,
            &[
                "state",
                "posterior_entropy[bits]",
                "mutual_information[bits]",
                "ceiling[bits]",
            ],
            &summary,
        )?,
    );
    if svg {
        let window = (10.0 / (n + 1) as f64).min(0.5);
        let keep = |v: &[(f64, f64)]| {
            v.iter()
                .copied()
                .filter(|(t, _)| t.abs() <= window)
                .collect()
        };
        let series = vec![
            Series {
                label: "optimal".into(),
                points: keep(&opt),
            },
            Series {
                label: "uniform weights".into(),
                points: keep(&uni),
            },
        ];
        let spec = PlotSpec {
            title: "Covariant posterior",
            x_label: "theta (periods)",
            y_label: "p(theta)",
            log_x: false,
        };
        out.add("entropy2.svg", line_plot(&spec, &series).into_bytes());
    }
    Ok(())
}

pub fn run(name: FigureName, p: FigureParams) -> Result<Outcome> {
    let dir = p
        .out_dir
        .clone()
        .unwrap_or_else(|| Path::new(".").to_path_buf());
    let svg = p.svg.unwrap_or(false);
    let mut out = Artifacts::new(dir);
    match name {
        FigureName::ChiQpe => chi_qpe(&p, &mut out, svg)?,
        FigureName::Transition => transition(&p, &mut out, svg)?,
        FigureName::BSigma => b_sigma(&p, &mut out, svg)?,
        FigureName::Entropy2 => entropy2(&p, &mut out, svg)?,
    }
    out.write()?;
    Ok(Outcome::Success)
}
