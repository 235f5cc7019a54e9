mod common;

use std::fs;

use common::{csv_files, read_table, run, run_ok, write};
use multirate::commands::surface_csv;
use multirate_core::likelihood::{default_omega_grid, mc_average_surface, ExperimentDesign};
use tempfile::tempdir;

const AR2: &str = r#"{"spectrum":{"model":{"peak":{"omega0":0.08333333333333333,"modulus":0.9},"sigma2":1}},"n":1024}"#;

#[test]
fn white_noise_simulation_is_byte_stable() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    for out in ["a", "b"] {
        run_ok(d, &["simulate", "--n", "16", "--seed", "1", "--out", out]);
    }
    let a = fs::read(d.join("a/series.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b/series.csv")).unwrap());
    let (header, rows) = read_table(&d.join("a/series.csv"));
    assert_eq!(header, ["index", "value"]);
    assert_eq!(rows.len(), 16);
    assert!(!a.contains(&b'\r'));
}

#[test]
fn manifest_echoes_flag_overrides() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "cfg.json", r#"{"n": 40, "seed": 3}"#);
    run_ok(d, &["simulate", "--config", "cfg.json", "--seed", "9", "--out", "o"]);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["tool"], "multirate");
    assert_eq!(m["config"]["seed"], 9);
    assert_eq!(m["config"]["n"], 40);
    assert!(m["version"].is_string());
}

#[test]
fn missing_sigma2_exits_2_naming_the_field() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "cfg.json", r#"{"spectrum":{"model":{"ar":[0.5]}},"n":32}"#);
    let out = run(d, &["simulate", "--config", "cfg.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma2"));
}

#[test]
fn noncausal_model_exits_3() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "cfg.json", r#"{"spectrum":{"model":{"ar":[1.2],"sigma2":1}},"n":32}"#);
    let out = run(d, &["simulate", "--config", "cfg.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn corrupt_series_row_exits_2_with_row_number() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["simulate", "--n", "64", "--out", "s"]);
    let path = d.join("s/series.csv");
    let mut lines: Vec<String> = fs::read_to_string(&path).unwrap().lines().map(String::from).collect();
    lines[7] = "6,oops".into();
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let out = run(d, &["estimate", "--series", "s/series.csv", "--out", "e"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 8"));
}

#[test]
fn empty_grid_exits_2() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "cfg.json", r#"{"grid": [], "replicates": 1}"#);
    let out = run(d, &["loglik-surface", "--config", "cfg.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(d, &["loglik-surface", "--grid-size", "0", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kolmogorov_of_flat_spectrum_prints_sigma2() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "cfg.json", r#"{"spectrum":{"model":{"sigma2":2.5}}}"#);
    let out = run_ok(d, &["kolmogorov", "--config", "cfg.json", "--out", "k"]);
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v - 2.5).abs() < 1e-12, "{v}");
}

#[test]
fn simulated_ar2_variance_matches_closed_form() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "cfg.json", AR2);
    // closed-form AR(2) variance from the root parametrisation
    let (r, w0) = (0.9_f64, 1.0 / 12.0);
    let phi1 = 2.0 * r * (2.0 * std::f64::consts::PI * w0).cos();
    let phi2 = -r * r;
    let gamma0 = (1.0 - phi2) / ((1.0 + phi2) * ((1.0 - phi2).powi(2) - phi1 * phi1));
    // one path of 1024 has roughly 10% sampling error in its variance at this
    // persistence, so pool eight seeds
    let mut pooled = 0.0;
    for seed in 0..8 {
        let out = format!("s{seed}");
        run_ok(d, &["simulate", "--config", "cfg.json", "--seed", &seed.to_string(), "--out", &out]);
        let (_, rows) = read_table(&d.join(out).join("series.csv"));
        let x: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let m = x.iter().sum::<f64>() / x.len() as f64;
        pooled += x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64 / 8.0;
    }
    assert!((pooled / gamma0 - 1.0).abs() < 0.1, "{pooled} vs {gamma0}");
}

#[test]
fn single_replicate_surface_matches_library() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "cfg.json", r#"{"n_low": 32, "n_high": 8, "replicates": 1, "grid_size": 41, "seed": 5}"#);
    run_ok(d, &["loglik-surface", "--config", "cfg.json", "--out", "o"]);
    let design = ExperimentDesign {
        n_low: 32,
        n_high: 8,
        delta_low: 2,
        replicates: 1,
        omega_true: 1.0 / 12.0,
        modulus: 0.9,
        grid: default_omega_grid(41),
        seed: 5,
    };
    let expected = surface_csv(&mc_average_surface(&design).unwrap()).render();
    assert_eq!(fs::read_to_string(d.join("o/surface.csv")).unwrap(), expected);
}

#[test]
fn sweep_emits_one_labelled_curve_per_value() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    run_ok(
        d,
        &["loglik-surface", "--n-low", "32", "--n-high", "0,4,8", "--replicates", "2", "--grid-size", "21", "--out", "o"],
    );
    let svg = fs::read_to_string(d.join("o/surface.svg")).unwrap();
    for v in [0, 4, 8] {
        assert!(d.join(format!("o/surface_n_high_{v}.csv")).exists());
        assert!(svg.contains(&format!("n_high={v}")));
    }
    assert!(svg.contains(">true<"));
}

#[test]
fn two_series_estimate_writes_stage_snapshots() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "sim.json", AR2);
    run_ok(d, &["simulate", "--config", "sim.json", "--n", "256", "--out", "fine"]);
    run_ok(d, &["simulate", "--config", "sim.json", "--n", "768", "--stride", "3", "--seed", "1", "--out", "coarse"]);
    write(
        d,
        "est.json",
        r#"{"series":[{"csv":"fine/series.csv"},{"csv":"coarse/series.csv"}],"order":[2,1],"mc_samples":600}"#,
    );
    run_ok(d, &["estimate", "--config", "est.json", "--out", "e"]);
    for f in ["stage_1.json", "stage_2.json", "stage_1_summary.csv", "stage_2_summary.csv", "belief.json", "summary.csv", "bands.svg"] {
        assert!(d.join("e").join(f).exists(), "{f}");
    }
    assert_eq!(
        fs::read(d.join("e/stage_2_summary.csv")).unwrap(),
        fs::read(d.join("e/summary.csv")).unwrap()
    );
}

#[test]
fn stride_two_estimate_has_symmetric_bands() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "sim.json", AR2);
    run_ok(d, &["simulate", "--config", "sim.json", "--n", "512", "--stride", "2", "--out", "s"]);
    run_ok(d, &["estimate", "--series", "s/series.csv", "--mc-samples", "600", "--out", "e"]);
    let (header, rows) = read_table(&d.join("e/summary.csv"));
    assert_eq!(header, ["omega", "mean", "lo50", "hi50", "lo90", "hi90"]);
    let n = rows.len();
    for k in 0..n {
        let (a, b) = (&rows[k], &rows[n - 1 - k]);
        assert!((a[0] + b[0] - 0.5).abs() < 1e-12);
        let (wa, wb) = (a[5] - a[4], b[5] - b[4]);
        assert!((wa / wb - 1.0).abs() < 0.05, "width {wa} vs {wb}");
    }
}

#[test]
fn diff_grid_off_diagonals_are_antisymmetric() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    let beliefs = [
        r#"{"mean":[0.0,0.5,-0.2],"variance":[[1,0,0],[0,0.5,0],[0,0,0.1]]}"#,
        r#"{"mean":[0.3,-0.1,0.4],"variance":[[1,0,0],[0,0.5,0],[0,0,0.1]]}"#,
        r#"{"mean":[-0.2,0.2,0.0],"variance":[[0.5,0.1,0],[0.1,0.5,0],[0,0,0.1]]}"#,
    ];
    for (i, b) in beliefs.iter().enumerate() {
        write(d, &format!("b{i}.json"), b);
    }
    run_ok(
        d,
        &["diff-grid", "--belief", "b0.json", "--belief", "b1.json", "--belief", "b2.json", "--grid-size", "33", "--out", "g"],
    );
    let (_, rows) = read_table(&d.join("g/diff_grid.csv"));
    assert_eq!(rows.len(), 9 * 33);
    let at = |i: usize, j: usize, k: usize| rows[((i - 1) * 3 + (j - 1)) * 33 + k][3];
    for i in 1..=3 {
        for j in 1..=3 {
            for k in 0..33 {
                if i != j {
                    assert_eq!(at(i, j, k), -at(j, i, k));
                    assert!((at(i, j, k) - (at(i, i, k) - at(j, j, k))).abs() < 1e-14);
                }
            }
        }
    }
    assert_eq!(fs::read_to_string(d.join("g/diff_grid.svg")).unwrap().matches("<rect x=").count(), 9);
}

#[test]
fn pc_fan_rejects_component_zero() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    write(d, "b.json", r#"{"mean":[0.0,0.5],"variance":[[1,0],[0,0.5]]}"#);
    let out = run(d, &["pc-fan", "--belief", "b.json", "--components", "0", "--out", "f"]);
    assert_eq!(out.status.code(), Some(2));
    run_ok(d, &["pc-fan", "--belief", "b.json", "--components", "1,2", "--out", "f"]);
    let (header, rows) = read_table(&d.join("f/fan_pc1.csv"));
    assert_eq!(header.len(), 10);
    assert_eq!(rows.len(), 128);
    assert_eq!(csv_files(&d.join("f")).len(), 2);
}

#[test]
fn quadrature_grid_has_unit_weight() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    run_ok(d, &["quadrature", "--out", "q"]);
    let (header, rows) = read_table(&d.join("q/quadrature.csv"));
    assert_eq!(header, ["w", "x1", "x2", "x3", "x4"]);
    assert!((rows.iter().map(|r| r[0]).sum::<f64>() - 1.0).abs() < 1e-12);
    let out = run(d, &["quadrature", "--dimension", "11", "--out", "q2"]);
    assert_eq!(out.status.code(), Some(2));
}
