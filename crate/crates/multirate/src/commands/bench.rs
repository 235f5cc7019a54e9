use std::path::Path;

use multirate_core::bench::{
    design_product, power_fraction_below, table_sweep, BenchDesign, BenchResult,
    InterpolationScenario, InterpolationStudy, DEFAULT_SCORE_GRID,
};
use multirate_core::blm::DEFAULT_MC_SAMPLES;
use serde::{Deserialize, Serialize};

use super::{bad_config, prepare};
use crate::error::{CliError, CliResult};
use crate::formats::{fmt_f64, write_json, write_text, Csv, PriorJson};
use crate::svg::Plot;

/// Rows and columns are `(δ, N)` pairs. When absent they default to every
/// combination of `deltas` and `sizes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub rows: Option<Vec<(usize, usize)>>,
    pub cols: Option<Vec<(usize, usize)>>,
    pub deltas: Vec<usize>,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub score_grid: usize,
    pub prior: PriorJson,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            rows: None,
            cols: None,
            deltas: vec![1, 2, 3],
            sizes: vec![16, 128],
            replicates: 100,
            score_grid: DEFAULT_SCORE_GRID,
            prior: PriorJson::default(),
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }
}

fn cell_value(cell: &Option<BenchResult>, f: impl Fn(&BenchResult) -> f64) -> String {
    match cell {
        Some(r) if r.failures == 0 => fmt_f64(f(r)),
        _ => "NA".into(),
    }
}

/// Writes `table.csv` (cell means), `table_stderr.csv` and the long-form
/// `cells.csv`. In the two tables the first two lines carry δ₂ and N₂ of each
/// column and data rows start with δ₁ and N₁. Cells with any failed
/// replicate are `NA` there; `cells.csv` keeps the partial statistics.
pub fn bench(cfg: &BenchConfig, out: &Path) -> CliResult<()> {
    let product = design_product(&cfg.deltas, &cfg.sizes);
    let rows = cfg.rows.clone().unwrap_or_else(|| product.clone());
    let cols = cfg.cols.clone().unwrap_or(product);
    if rows.is_empty() || cols.is_empty() {
        return Err(CliError::input("the table needs at least one row and one column"));
    }
    let mut template = BenchDesign::new(rows[0], cols[0], cfg.replicates, cfg.seed);
    template.score_grid = cfg.score_grid;
    template.prior = cfg.prior.build()?;
    template.mc_samples = cfg.mc_samples;
    for &r in &rows {
        for &c in &cols {
            BenchDesign::new(r, c, cfg.replicates, cfg.seed)
                .validate()
                .map_err(|e| CliError::input(format!("cell {r:?} | {c:?}: {e}")))?;
        }
    }
    template.validate().map_err(bad_config)?;
    prepare(out, "bench", cfg)?;

    let table = table_sweep(&rows, &cols, &template)?;
    let grid = |f: &dyn Fn(&BenchResult) -> f64| {
        let mut t = Csv::new(
            ["delta2".to_string(), String::new()]
                .into_iter()
                .chain(cols.iter().map(|c| c.0.to_string())),
        );
        t.push(
            ["n2".to_string(), String::new()]
                .into_iter()
                .chain(cols.iter().map(|c| c.1.to_string()))
                .collect(),
        );
        t.push(
            ["delta1".to_string(), "n1".to_string()]
                .into_iter()
                .chain(cols.iter().map(|_| String::new()))
                .collect(),
        );
        for (r, cells) in rows.iter().zip(&table.cells) {
            t.push(
                [r.0.to_string(), r.1.to_string()]
                    .into_iter()
                    .chain(cells.iter().map(|c| cell_value(c, f)))
                    .collect(),
            );
        }
        t
    };
    grid(&|r| r.mean).write(&out.join("table.csv"))?;
    grid(&|r| r.stderr).write(&out.join("table_stderr.csv"))?;

    let mut long = Csv::new([
        "delta1", "n1", "delta2", "n2", "mean", "stderr", "successes", "failures",
    ]);
    for (r, cells) in rows.iter().zip(&table.cells) {
        for (c, cell) in cols.iter().zip(cells) {
            let mut row = vec![r.0, r.1, c.0, c.1].into_iter().map(|v| v.to_string()).collect::<Vec<_>>();
            match cell {
                Some(res) => row.extend([
                    fmt_f64(res.mean),
                    fmt_f64(res.stderr),
                    res.successes.to_string(),
                    res.failures.to_string(),
                ]),
                None => row.extend(["NA", "NA", "0", "NA"].map(String::from)),
            }
            long.push(row);
        }
    }
    long.write(&out.join("cells.csv"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareInterpConfig {
    pub omega0: f64,
    pub modulus: f64,
    pub innovation_variance: f64,
    pub total_len: usize,
    pub history_len: usize,
    pub history_stride: usize,
    pub score_grid: usize,
    pub prior: PriorJson,
    pub mc_samples: usize,
    /// Cutoff for the reported low-frequency power share.
    pub cutoff: f64,
    pub seed: u64,
}

impl Default for CompareInterpConfig {
    fn default() -> Self {
        let s = InterpolationScenario::default();
        Self {
            omega0: s.omega0,
            modulus: s.modulus,
            innovation_variance: s.innovation_variance,
            total_len: s.total_len,
            history_len: s.history_len,
            history_stride: s.history_stride,
            score_grid: s.score_grid,
            prior: PriorJson::default(),
            mc_samples: s.mc_samples,
            cutoff: 0.25,
            seed: 0,
        }
    }
}

#[derive(Serialize)]
struct PowerShares {
    truth: f64,
    blm_raw: f64,
    blm_interpolated: f64,
    ar_fit: f64,
    smoothed_periodogram: f64,
}

#[derive(Serialize)]
struct InterpMetrics {
    cutoff: f64,
    power_below_cutoff: PowerShares,
    ar_order: usize,
    honesty_gap: f64,
    honesty_bound: f64,
}

/// Writes `overlay.csv` with the five log-spectra, `overlay.svg` and
/// `metrics.json` (low-frequency power shares and the history-only
/// aliasing-honesty check).
pub fn compare_interp(cfg: &CompareInterpConfig, out: &Path) -> CliResult<()> {
    let scenario = InterpolationScenario {
        omega0: cfg.omega0,
        modulus: cfg.modulus,
        innovation_variance: cfg.innovation_variance,
        total_len: cfg.total_len,
        history_len: cfg.history_len,
        history_stride: cfg.history_stride,
        score_grid: cfg.score_grid,
        prior: cfg.prior.build()?,
        mc_samples: cfg.mc_samples,
        seed: cfg.seed,
    };
    scenario.validate().map_err(bad_config)?;
    if !(cfg.cutoff > 0.0 && cfg.cutoff < 0.5) {
        return Err(CliError::input("cutoff must lie in (0, 1/2)"));
    }
    prepare(out, "compare-interp", cfg)?;
    let study = InterpolationStudy::new(scenario)?;
    let c = study.run(cfg.seed)?;

    let mut t = Csv::new([
        "omega",
        "truth",
        "blm_raw",
        "blm_interpolated",
        "ar_fit",
        "smoothed_periodogram",
    ]);
    for k in 0..c.omegas.len() {
        t.push(
            [
                c.omegas[k],
                c.truth[k],
                c.blm_raw.mean[k],
                c.blm_interpolated.mean[k],
                c.baselines.ar_log[k],
                c.baselines.smoothed_log[k],
            ]
            .map(fmt_f64)
            .to_vec(),
        );
    }
    t.write(&out.join("overlay.csv"))?;

    let share = |curve: &[f64]| power_fraction_below(&c.omegas, curve, cfg.cutoff);
    let metrics = InterpMetrics {
        cutoff: cfg.cutoff,
        power_below_cutoff: PowerShares {
            truth: share(&c.truth)?,
            blm_raw: share(&c.blm_raw.mean)?,
            blm_interpolated: share(&c.blm_interpolated.mean)?,
            ar_fit: share(&c.baselines.ar_log)?,
            smoothed_periodogram: share(&c.baselines.smoothed_log)?,
        },
        ar_order: c.baselines.ar.order,
        honesty_gap: c.honesty_gap,
        honesty_bound: c.honesty_bound,
    };
    write_json(&out.join("metrics.json"), &metrics)?;

    let mut plot = Plot::new(
        format!(
            "Peak at {}: raw mixed-rate data versus interpolated history",
            cfg.omega0
        ),
        "omega",
        "log f",
    );
    if let Some(b) = c.blm_raw.band(0.9) {
        plot = plot.band(&c.omegas, &b.lower, &b.upper, 0.15);
    }
    plot = plot
        .line("truth", &c.omegas, &c.truth)
        .line("BLM raw", &c.omegas, &c.blm_raw.mean)
        .dashed("BLM interpolated", &c.omegas, &c.blm_interpolated.mean)
        .dashed("AR fit", &c.omegas, &c.baselines.ar_log)
        .dashed("smoothed periodogram", &c.omegas, &c.baselines.smoothed_log)
        .marker(cfg.cutoff, "cutoff");
    write_text(&out.join("overlay.svg"), &plot.render(720.0, 460.0))
}
