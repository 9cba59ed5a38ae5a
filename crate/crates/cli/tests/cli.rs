use std::f64::consts::{E, PI, TAU};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qmi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmi"))
        .args(args)
        .output()
        .expect("spawn qmi")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

fn write_grid_csv(path: &Path, header: &str, grid: usize, row: impl Fn(f64) -> Vec<f64>) {
    let mut text = format!("# test fixture\n{header}\n");
    for j in 0..grid {
        let phi = j as f64 / grid as f64;
        let values: Vec<String> = std::iter::once(phi)
            .chain(row(phi))
            .map(|v| format!("{v:e}"))
            .collect();
        text.push_str(&values.join(","));
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

#[test]
fn dephasing_fourier_bound_matches_closed_form() {
    let out = qmi(&[
        "bound",
        "--channel",
        "dephasing",
        "--M",
        "3",
        "--eta",
        "0.9",
        "--method",
        "fourier",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    // Per-qubit dephased weight eta^(2^(j+1)) / 2.
    let oracle: f64 = (0..3)
        .map(|j| binary_entropy(0.9f64.powi(1 << (j + 1)) / 2.0))
        .sum();
    assert!((v["bound_bits"].as_f64().unwrap() - oracle).abs() < 1e-9);
    assert_eq!(v["method"], "fourier");
    assert_eq!(
        v["command"],
        "bound --method fourier --channel dephasing --M 3 --eta 0.9"
    );
    assert!(v["timestamp"].is_string());
    assert!(v["flags"].as_array().unwrap().is_empty());
}

#[test]
fn noiseless_two_qubit_circuit_carries_two_bits() {
    let v = json(&qmi(&[
        "bound",
        "--channel",
        "dephasing",
        "--M",
        "2",
        "--eta",
        "1",
    ]));
    assert!((v["bound_bits"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn fisher_bound_from_model_file() {
    // p(0|phi) = cos^2(pi phi) has Fisher information 4 pi^2 everywhere, so
    // sigma^2 = 1/4 under the uniform prior. Central differences leave an
    // O(h^2) error, about 2e-7 here.
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("model.csv");
    write_grid_csv(&model, "phi,p_0,p_1", 4096, |phi| {
        vec![(PI * phi).cos().powi(2), (PI * phi).sin().powi(2)]
    });
    let out = qmi(&[
        "bound",
        "--model",
        model.to_str().unwrap(),
        "--method",
        "fisher",
        "--prior",
        "uniform",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    let oracle = 0.5 * (1.0 + 2.0 * PI * E * 0.25).log2();
    assert!(
        (v["bound_bits"].as_f64().unwrap() - oracle).abs() < 1e-6,
        "{v}"
    );
    assert!((v["sigma2"].as_f64().unwrap() - 0.25).abs() < 1e-6);

    let fourier = json(&qmi(&[
        "bound",
        "--model",
        model.to_str().unwrap(),
        "--method",
        "fourier",
    ]));
    assert!(fourier["bound_bits"].as_f64().unwrap() <= v["bound_bits"].as_f64().unwrap() + 1e-9);
}

#[test]
fn overlap_file_of_a_balanced_qubit_gives_one_bit() {
    let dir = TempDir::new().unwrap();
    let overlap = dir.path().join("overlap.csv");
    write_grid_csv(&overlap, "phi,re,im", 64, |phi| {
        vec![(1.0 + (TAU * phi).cos()) / 2.0, (TAU * phi).sin() / 2.0]
    });
    let v = json(&qmi(&["bound", "--overlap", overlap.to_str().unwrap()]));
    assert!((v["bound_bits"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn discontinuous_prior_exits_with_divergence_code() {
    let dir = TempDir::new().unwrap();
    let prior = dir.path().join("prior.csv");
    write_grid_csv(&prior, "phi,p", 256, |phi| {
        vec![if phi < 0.5 { 2.0 } else { 0.0 }]
    });
    let out = qmi(&[
        "bound",
        "--fisher-constant",
        "1",
        "--method",
        "fisher",
        "--prior",
        prior.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert!(v["bound_bits"].is_null());
    assert_eq!(v["flags"], serde_json::json!(["divergent"]));
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    assert_eq!(
        qmi(&["bound", "--model", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qmi(&["bound", "--channel", "dephasing", "--M", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qmi(&[
            "bound",
            "--channel",
            "dephasing",
            "--M",
            "2",
            "--eta",
            "1.5"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        qmi(&[
            "bound",
            "--channel",
            "erasure",
            "--M",
            "2",
            "--eta",
            "1",
            "--fisher-constant",
            "2"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(qmi(&["figure", "nope"]).status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "phi,p_0\n0,1\n0.3,1\n").unwrap();
    assert_eq!(
        qmi(&["bound", "--model", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bound.toml");
    fs::write(&cfg, "channel = \"dephasing\"\nM = 2\neta = 1.0\n").unwrap();
    let base = json(&qmi(&["bound", "--config", cfg.to_str().unwrap()]));
    assert!((base["bound_bits"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let over = json(&qmi(&[
        "bound",
        "--config",
        cfg.to_str().unwrap(),
        "--M",
        "3",
    ]));
    assert!((over["bound_bits"].as_f64().unwrap() - 3.0).abs() < 1e-12);

    fs::write(&cfg, "channel = \"dephasing\"\nqubits = 2\n").unwrap();
    assert_eq!(
        qmi(&["bound", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn mle_lower_bound_is_flagged_asymptotic() {
    let v = json(&qmi(&[
        "bound",
        "--fisher-constant",
        "2",
        "--N",
        "50",
        "--method",
        "mle-lower",
    ]));
    let oracle = 0.5 * (100.0 / (2.0 * PI * E)).log2();
    assert!((v["bound_bits"].as_f64().unwrap() - oracle).abs() < 1e-12);
    assert_eq!(v["flags"], serde_json::json!(["asymptotic"]));
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn b_sigma_figure_has_header_units_and_two_hundred_rows() {
    let dir = TempDir::new().unwrap();
    let out = qmi(&[
        "figure",
        "b_sigma",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--svg",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("b_sigma.csv")).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.starts_with("# command: figure b_sigma"));
    let lines = data_lines(&text);
    assert_eq!(lines[0], "sigma[1],entropy[bits],bound[bits],margin[bits]");
    assert_eq!(lines.len(), 201);
    let svg = fs::read_to_string(dir.path().join("b_sigma.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn transition_figure_reports_crossings() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = qmi(&[
        "figure",
        "transition",
        "--eta-min",
        "0.5",
        "--eta-max",
        "1",
        "--M-max",
        "5",
        "--out-dir",
        d,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("transition_crossings.csv")).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines.len(), 5);
    let etas: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!((etas[0] - 0.5).abs() < 1e-9);
    assert!(etas.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn figures_are_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let out = qmi(&[
            "figure",
            "entropy2",
            "--N",
            "15",
            "--restarts",
            "3",
            "--seed",
            "7",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in [
        "entropy2_posterior.csv",
        "entropy2_amplitudes.csv",
        "entropy2_summary.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn channel_suite_passes() {
    let out = qmi(&["check", "channels"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "suite,check,status,observed,limit,unit");
    assert!(lines[1..]
        .iter()
        .all(|l| l.starts_with("channels,") && l.contains(",pass,")));
}

#[test]
fn two_seed_trials_write_one_row_each() {
    let out = qmi(&["two-seed", "--trials", "12", "--N", "2,3", "--grid", "128"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data_lines(&text).len(), 13);
}

#[test]
fn optimize_reports_a_better_than_uniform_state() {
    let v = json(&qmi(&["optimize", "--N", "7", "--seed", "3"]));
    assert_eq!(v["seed"], 3);
    let c: Vec<f64> = v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(c.len(), 8);
    assert!((c.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10);
    assert!(v["entropy_bits"].as_f64().unwrap() < v["uniform_entropy_bits"].as_f64().unwrap());
}
